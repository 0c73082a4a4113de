//! Shared instance setup for the criterion benchmarks.

use paroforge_core::bench::{fixtures, gen_facility_location, FacilityLocationConfig};
use paroforge_core::TwoStageProblem;

pub fn dosing_instance() -> TwoStageProblem {
    fixtures::rt_example(0.5)
}

/// Facility-location instance small enough for per-iteration timing.
pub fn small_facility_instance(seed: u64) -> TwoStageProblem {
    let config = FacilityLocationConfig {
        n: 5,
        m: 3,
        gamma: 34.0,
        ..FacilityLocationConfig::desk(seed)
    };
    gen_facility_location(&config).expect("valid configuration")
}

/// The desk-scale configuration used by the comparison protocol.
pub fn desk_facility_instance(seed: u64) -> TwoStageProblem {
    gen_facility_location(&FacilityLocationConfig::desk(seed)).expect("valid configuration")
}
