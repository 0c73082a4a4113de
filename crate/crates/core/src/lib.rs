//! Two-stage adaptive robust linear optimization: worst-case optimal (ARO)
//! solves over polytope vertices, Fourier-Motzkin elimination of recourse
//! variables, and Pareto refinement of worst-case optimal Stage-1 decisions.

pub mod bench;
pub mod error;
pub mod fme;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod pareto;
pub mod robust;

pub use bench::{
    gen_facility_location, run_benchmark, run_comparison, ComparisonOptions, ComparisonReport,
    ComparisonRow, FacilityLocationConfig,
};
pub use error::{Error, Result};
pub use fme::{
    eliminate, filter_redundant, reconstruct_recourse, BoundKind, BoundRecord, EliminationResult,
    FilterLevel, RecoursePolicy,
};
pub use geometry::{enumerate_vertices, interior_point, is_simplex, sample_uniform, VertexList};
pub use linalg::Matrix;
pub use lp::{solve_lp, solve_milp, LpProblem, LpSolution, LpStatus};
pub use model::{
    detect_structure, evaluate, parse_problem, parse_problem_unchecked, serialize_problem,
    validate, Scenario,
    StructureKind, StructureReport, TwoStageProblem, UncertaintySet, ValidationReport,
};
pub use pareto::{
    algorithm1, certify_unique, check_extension, check_extension_sampled, dr_paro, improvement,
    max_difference_scenario, pro_ldr, pro_ldr_masked, refine_d0, Algorithm1Options,
    Algorithm1Result, ImprovementMethod, ImprovementOptions, ImprovementResult, ValueLedger,
};
pub use robust::{
    optimal_recourse, solve_aro_vertices, solve_static_ldr, worst_case, AroSolveResult,
    DecisionRule, LinearRule, RuleMask,
};
