//! Instance generators, the solution-comparison protocol, and CSV reporting.

use crate::error::{Error, Result};
use crate::geometry::{interior_point, sample_uniform};
use crate::linalg::Matrix;
use crate::model::{evaluate, Scenario, TwoStageProblem, UncertaintySet};
use crate::pareto::{
    algorithm1, max_difference_scenario, pro_ldr, Algorithm1Options, ImprovementOptions,
};
use crate::robust::{optimal_recourse, solve_aro_vertices, worst_case, DecisionRule};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;
use std::time::Instant;

pub mod fixtures {
    //! Small worked instances used across the test suites and the CLI.

    use super::*;

    /// Two-stage dosing toy model: one here-and-now dose `x`, one adaptive
    /// dose `y`, demands `(d1, d2) in [50, 60]^2`, objective
    /// `delta * (x + y)`, both doses in `[20, 40]` and `x + y >= d_i`.
    pub fn rt_example(delta: f64) -> TwoStageProblem {
        assert!(delta > 0.0, "dose fraction must be positive");
        let a0 = Matrix::from_rows(vec![
            vec![-1.0],
            vec![-1.0],
            vec![1.0],
            vec![-1.0],
            vec![0.0],
            vec![0.0],
        ]);
        let b = Matrix::from_rows(vec![
            vec![-1.0],
            vec![-1.0],
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![-1.0],
        ]);
        let r0 = vec![0.0, 0.0, 40.0, -20.0, 40.0, -20.0];
        let r_z = Matrix::from_rows(vec![
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]);
        let mut uncertainty = UncertaintySet::box_set(&[50.0, 50.0], &[60.0, 60.0]);
        uncertainty.nominal = Some(Scenario::new(vec![55.0, 55.0]));
        TwoStageProblem {
            n_x: 1,
            n_y: 1,
            m: 6,
            l: 2,
            c0: vec![delta],
            c_z: Matrix::zeros(1, 2),
            d: vec![delta],
            a0,
            a_z: vec![Matrix::zeros(6, 1), Matrix::zeros(6, 1)],
            b,
            r0,
            r_z,
            integrality: vec![false],
            uncertainty,
        }
    }

    /// Epigraph form of [`rt_example`]: Stage-1 `(x, t)`, the adaptive dose
    /// moved fully into the constraints. Useful for elimination exercises.
    pub fn rt_epigraph(delta: f64) -> TwoStageProblem {
        assert!(delta > 0.0);
        let inv = 1.0 / delta;
        let a0 = Matrix::from_rows(vec![
            vec![-1.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, -inv],
            vec![-1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]);
        let b = Matrix::from_rows(vec![
            vec![0.0],
            vec![0.0],
            vec![1.0],
            vec![-1.0],
            vec![-1.0],
            vec![-1.0],
            vec![1.0],
        ]);
        let r0 = vec![-20.0, 40.0, 0.0, 0.0, 0.0, -20.0, 40.0];
        let r_z = Matrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]);
        TwoStageProblem {
            n_x: 2,
            n_y: 1,
            m: 7,
            l: 2,
            c0: vec![0.0, 1.0],
            c_z: Matrix::zeros(2, 2),
            d: vec![0.0],
            a0,
            a_z: vec![Matrix::zeros(7, 2), Matrix::zeros(7, 2)],
            b,
            r0,
            r_z,
            integrality: vec![false, false],
            uncertainty: UncertaintySet::box_set(&[50.0, 50.0], &[60.0, 60.0]),
        }
    }

    fn base_two_recourse(l: usize, r_row0: Vec<f64>, r_row1: Vec<f64>) -> TwoStageProblem {
        let a0 = Matrix::from_rows(vec![
            vec![1.0],
            vec![-1.0],
            vec![0.0],
            vec![0.0],
            vec![0.0],
        ]);
        let b = Matrix::from_rows(vec![
            vec![0.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![0.0, 1.0],
        ]);
        let r0 = vec![0.0, 2.0, -1.0, -1.5, 2.0];
        let mut r_z = Matrix::zeros(5, l);
        for (c, v) in r_row0.iter().enumerate() {
            r_z[(0, c)] = *v;
        }
        for (c, v) in r_row1.iter().enumerate() {
            r_z[(1, c)] = *v;
        }
        TwoStageProblem {
            n_x: 1,
            n_y: 2,
            m: 5,
            l,
            c0: vec![1.0],
            c_z: Matrix::zeros(1, l),
            d: vec![0.0, 0.0],
            a0,
            a_z: (0..l).map(|_| Matrix::zeros(5, 1)).collect(),
            b,
            r0,
            r_z,
            integrality: vec![false],
            uncertainty: UncertaintySet::box_set(&vec![0.0; l], &vec![1.0; l]),
        }
    }

    /// Each parameter touches exactly one constraint: `z1` the first,
    /// `(z2, z3)` the second. Minimizes `x` with two bounded recourse
    /// variables; the worst-case optimum is `x = 1/2` with the static rule
    /// `(1, 3/2)`.
    pub fn constraintwise_example() -> TwoStageProblem {
        base_two_recourse(3, vec![-0.5, 0.0, 0.0], vec![0.0, 0.5, 0.5])
    }

    /// Adds a shared parameter (index 0) to both constraints on top of the
    /// constraintwise pattern; the recourse rule `y2 = 3/2 + z0/2` becomes
    /// the only feasible rule at the optimum.
    pub fn hybrid_example() -> TwoStageProblem {
        base_two_recourse(4, vec![-1.0, -0.5, 0.0, 0.0], vec![1.0, 0.0, 0.5, 0.5])
    }

    /// Two independent groups: the hybrid instance plus a second group with
    /// its own recourse variable `y3` and parameters `(z4, z5)`.
    pub fn block_example() -> TwoStageProblem {
        let hybrid = hybrid_example();
        let l = 6;
        let mut a0 = hybrid.a0.to_rows();
        a0.push(vec![1.0]);
        a0.push(vec![-2.0]);
        let mut b_rows: Vec<Vec<f64>> = hybrid
            .b
            .iter_rows()
            .map(|r| vec![r[0], r[1], 0.0])
            .collect();
        b_rows.push(vec![0.0, 0.0, 1.0]);
        b_rows.push(vec![0.0, 0.0, -1.0]);
        let mut r0 = hybrid.r0.clone();
        r0.push(1.5);
        r0.push(-1.0);
        let mut r_z = Matrix::zeros(7, l);
        for i in 0..5 {
            for c in 0..4 {
                r_z[(i, c)] = hybrid.r_z[(i, c)];
            }
        }
        r_z[(5, 4)] = -0.5;
        r_z[(6, 5)] = -0.5;
        TwoStageProblem {
            n_x: 1,
            n_y: 3,
            m: 7,
            l,
            c0: vec![1.0],
            c_z: Matrix::zeros(1, l),
            d: vec![0.0, 0.0, 0.0],
            a0: Matrix::from_rows(a0),
            a_z: (0..l).map(|_| Matrix::zeros(7, 1)).collect(),
            b: Matrix::from_rows(b_rows),
            r0,
            r_z,
            integrality: vec![false],
            uncertainty: UncertaintySet::box_set(&vec![0.0; l], &vec![1.0; l]),
        }
    }

    /// Standard-simplex uncertainty over three parameters; a full linear
    /// rule is optimal, e.g. `y2 = (3 + z1 + z3) / 2`.
    pub fn simplex_example() -> TwoStageProblem {
        let mut p = base_two_recourse(3, vec![-1.0, -0.5, 0.0], vec![1.0, 0.0, 1.0]);
        p.r0[0] = -0.5;
        let mut rows = vec![vec![1.0, 1.0, 1.0]];
        let mut rhs = vec![1.0];
        for j in 0..3 {
            let mut row = vec![0.0; 3];
            row[j] = -1.0;
            rows.push(row);
            rhs.push(0.0);
        }
        p.uncertainty = UncertaintySet::new(Matrix::from_rows(rows), rhs);
        p
    }

    /// Both recourse variables price into the objective (`d = (-1, 1)`), so
    /// scenario-wise optimal rules are piecewise linear: greedy
    /// back-substitution picks `y2` at its lower bound and `y1` at its upper.
    pub fn objective_recourse_example() -> TwoStageProblem {
        let a0 = Matrix::from_rows(vec![
            vec![1.0],
            vec![-1.0],
            vec![0.0],
            vec![0.0],
            vec![0.0],
            vec![0.0],
        ]);
        let b = Matrix::from_rows(vec![
            vec![0.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, -1.0],
            vec![0.0, 1.0],
        ]);
        let r0 = vec![0.0, 2.0, -1.0, 2.0, -1.5, 2.0];
        let mut r_z = Matrix::zeros(6, 4);
        r_z[(0, 0)] = -1.0;
        r_z[(0, 1)] = -0.5;
        r_z[(1, 0)] = 1.0;
        r_z[(1, 2)] = 0.5;
        r_z[(1, 3)] = 0.5;
        TwoStageProblem {
            n_x: 1,
            n_y: 2,
            m: 6,
            l: 4,
            c0: vec![1.0],
            c_z: Matrix::zeros(1, 4),
            d: vec![-1.0, 1.0],
            a0,
            a_z: (0..4).map(|_| Matrix::zeros(6, 1)).collect(),
            b,
            r0,
            r_z,
            integrality: vec![false],
            uncertainty: UncertaintySet::box_set(&[0.0; 4], &[1.0; 4]),
        }
    }
}

// ---------------------------------------------------------------------------
// Facility location
// ---------------------------------------------------------------------------

/// Two-stage facility location: binary opening decisions, transport as
/// recourse, box-plus-budget demand uncertainty, integer cost draws.
#[derive(Clone, Debug)]
pub struct FacilityLocationConfig {
    /// Candidate facility count.
    pub n: usize,
    /// Demand location count.
    pub m: usize,
    /// Capacity per opened facility.
    pub s: f64,
    /// Inclusive integer range for opening costs.
    pub f_cost_range: (u32, u32),
    /// Inclusive integer range for transport costs.
    pub c_cost_range: (u32, u32),
    pub demand_lower: f64,
    pub demand_upper: f64,
    /// Cap on total demand.
    pub gamma: f64,
    pub seed: u64,
}

impl FacilityLocationConfig {
    /// Full-scale configuration: 20 facilities, 8 demand locations,
    /// capacity 15, demand in [8, 12] with total capped at 90.
    pub fn full(seed: u64) -> Self {
        FacilityLocationConfig {
            n: 20,
            m: 8,
            s: 15.0,
            f_cost_range: (4, 22),
            c_cost_range: (2, 12),
            demand_lower: 8.0,
            demand_upper: 12.0,
            gamma: 90.0,
            seed,
        }
    }

    /// Desk-scale configuration that keeps the vertex expansion small.
    pub fn desk(seed: u64) -> Self {
        FacilityLocationConfig {
            n: 10,
            m: 4,
            s: 15.0,
            f_cost_range: (4, 22),
            c_cost_range: (2, 12),
            demand_lower: 8.0,
            demand_upper: 12.0,
            gamma: 45.0,
            seed,
        }
    }
}

/// Build a facility-location instance. Costs are drawn from discrete uniform
/// ranges, opening costs first and then the transport matrix row-major, so
/// identical seeds give identical instances.
pub fn gen_facility_location(config: &FacilityLocationConfig) -> Result<TwoStageProblem> {
    let (n, m) = (config.n, config.m);
    if config.demand_lower > config.demand_upper {
        return Err(Error::Precondition("demand bounds are crossed".into()));
    }
    if config.gamma < config.demand_lower * m as f64 {
        return Err(Error::Precondition(
            "total-demand cap leaves the uncertainty set empty".into(),
        ));
    }
    if config.f_cost_range.0 > config.f_cost_range.1
        || config.c_cost_range.0 > config.c_cost_range.1
    {
        return Err(Error::Precondition("cost ranges are empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let f: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(config.f_cost_range.0..=config.f_cost_range.1) as f64)
        .collect();
    let mut d = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            d[i * m + j] = rng.gen_range(config.c_cost_range.0..=config.c_cost_range.1) as f64;
        }
    }

    let n_y = n * m;
    let rows = m + n + n_y + 2 * n;
    let mut a0 = Matrix::zeros(rows, n);
    let mut b = Matrix::zeros(rows, n_y);
    let mut r0 = vec![0.0; rows];
    let mut r_z = Matrix::zeros(rows, m);
    // demand coverage: -sum_i y_ij <= -z_j
    for j in 0..m {
        for i in 0..n {
            b[(j, i * m + j)] = -1.0;
        }
        r_z[(j, j)] = -1.0;
    }
    // capacity: sum_j y_ij - s x_i <= 0
    for i in 0..n {
        let row = m + i;
        a0[(row, i)] = -config.s;
        for j in 0..m {
            b[(row, i * m + j)] = 1.0;
        }
    }
    // transport nonnegativity
    for k in 0..n_y {
        b[(m + n + k, k)] = -1.0;
    }
    // binary box rows for the opening decisions
    for i in 0..n {
        let row = m + n + n_y + 2 * i;
        a0[(row, i)] = 1.0;
        r0[row] = 1.0;
        a0[(row + 1, i)] = -1.0;
    }

    let l_dim = m;
    let mut h_rows = vec![vec![1.0; l_dim]];
    let mut h_rhs = vec![config.gamma];
    for j in 0..l_dim {
        let mut up = vec![0.0; l_dim];
        up[j] = 1.0;
        h_rows.push(up);
        h_rhs.push(config.demand_upper);
        let mut lo = vec![0.0; l_dim];
        lo[j] = -1.0;
        h_rows.push(lo);
        h_rhs.push(-config.demand_lower);
    }
    let mut uncertainty = UncertaintySet::new(Matrix::from_rows(h_rows), h_rhs);
    uncertainty.nominal = Some(Scenario::new(vec![
        0.5 * (config.demand_lower + config.demand_upper);
        l_dim
    ]));

    Ok(TwoStageProblem {
        n_x: n,
        n_y,
        m: rows,
        l: l_dim,
        c0: f,
        c_z: Matrix::zeros(n, l_dim),
        d,
        a0,
        a_z: (0..l_dim).map(|_| Matrix::zeros(rows, n)).collect(),
        b,
        r0,
        r_z,
        integrality: vec![true; n],
        uncertainty,
    })
}

// ---------------------------------------------------------------------------
// Random instances for property suites
// ---------------------------------------------------------------------------

pub mod generators {
    //! Seeded random instance families used by the property suites.

    use super::*;

    /// Right-hand-side-uncertainty instance that is adaptive feasible for
    /// every `x` in `[0, 2]^n_x`: coverage rows with positive recourse
    /// weights plus generous recourse boxes.
    pub fn random_rhs_instance(seed: u64, zero_recourse_cost: bool) -> TwoStageProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_x = rng.gen_range(1..=3);
        let n_y = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=3);
        let coverage = rng.gen_range(1..=4);
        let y_cap = 30.0;

        let m = coverage + 2 * n_y + 2 * n_x;
        let mut a0 = Matrix::zeros(m, n_x);
        let mut b = Matrix::zeros(m, n_y);
        let mut r0 = vec![0.0; m];
        let mut r_z = Matrix::zeros(m, l);
        for t in 0..coverage {
            for j in 0..n_x {
                a0[(t, j)] = rng.gen_range(-1.0..1.0);
            }
            for k in 0..n_y {
                b[(t, k)] = -rng.gen_range(0.5..1.5);
            }
            r0[t] = -rng.gen_range(0.0..2.0);
            for c in 0..l {
                r_z[(t, c)] = -rng.gen_range(0.0..1.0);
            }
        }
        for k in 0..n_y {
            b[(coverage + 2 * k, k)] = 1.0;
            r0[coverage + 2 * k] = y_cap;
            b[(coverage + 2 * k + 1, k)] = -1.0;
        }
        for j in 0..n_x {
            let row = coverage + 2 * n_y + 2 * j;
            a0[(row, j)] = 1.0;
            r0[row] = 2.0;
            a0[(row + 1, j)] = -1.0;
        }

        let c0: Vec<f64> = (0..n_x).map(|_| rng.gen_range(0.5..1.5)).collect();
        let d: Vec<f64> = (0..n_y)
            .map(|_| {
                if zero_recourse_cost {
                    0.0
                } else {
                    rng.gen_range(0.1..1.0)
                }
            })
            .collect();

        TwoStageProblem {
            n_x,
            n_y,
            m,
            l,
            c0,
            c_z: Matrix::zeros(n_x, l),
            d,
            a0,
            a_z: (0..l).map(|_| Matrix::zeros(m, n_x)).collect(),
            b,
            r0,
            r_z,
            integrality: vec![false; n_x],
            uncertainty: UncertaintySet::box_set(&vec![0.0; l], &vec![1.0; l]),
        }
    }

    /// Unstructured instance for elimination equivalence tests: arbitrary
    /// signs everywhere, box uncertainty, no feasibility guarantee.
    pub fn random_elimination_instance(seed: u64) -> TwoStageProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_x = rng.gen_range(1..=2);
        let n_y = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=3);
        let m = rng.gen_range(n_y.max(2)..=8);
        let mut a0 = Matrix::zeros(m, n_x);
        let mut b = Matrix::zeros(m, n_y);
        let mut r0 = vec![0.0; m];
        let mut r_z = Matrix::zeros(m, l);
        for i in 0..m {
            for j in 0..n_x {
                a0[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            for k in 0..n_y {
                b[(i, k)] = if rng.gen_bool(0.6) {
                    rng.gen_range(-1.0..1.0)
                } else {
                    0.0
                };
            }
            r0[i] = rng.gen_range(-1.0..2.0);
            for c in 0..l {
                r_z[(i, c)] = rng.gen_range(-0.5..0.5);
            }
        }
        TwoStageProblem {
            n_x,
            n_y,
            m,
            l,
            c0: vec![1.0; n_x],
            c_z: Matrix::zeros(n_x, l),
            d: vec![0.0; n_y],
            a0,
            a_z: (0..l).map(|_| Matrix::zeros(m, n_x)).collect(),
            b,
            r0,
            r_z,
            integrality: vec![false; n_x],
            uncertainty: UncertaintySet::box_set(&vec![0.0; l], &vec![1.0; l]),
        }
    }
}

// ---------------------------------------------------------------------------
// Comparison protocol
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "instance,seed,opt,wc_aro,wc_paro,wc_pro,wc_pro_ldr,\
l1_paro_aro,l1_paro_pro,l1_aro_pro,imp_nom_aro,imp_nom_pro,imp_nom_proldr,\
imp_avg_aro,imp_avg_pro,imp_avg_proldr,imp_max_aro,imp_max_pro,imp_max_proldr,\
runtime_ms,status";

#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub instance: usize,
    pub seed: u64,
    pub opt: f64,
    pub wc_aro: f64,
    pub wc_paro: f64,
    pub wc_pro: f64,
    pub wc_pro_ldr: f64,
    pub l1_paro_aro: f64,
    pub l1_paro_pro: f64,
    pub l1_aro_pro: f64,
    pub imp_nom_aro: f64,
    pub imp_nom_pro: f64,
    pub imp_nom_proldr: f64,
    pub imp_avg_aro: f64,
    pub imp_avg_pro: f64,
    pub imp_avg_proldr: f64,
    pub imp_max_aro: f64,
    pub imp_max_pro: f64,
    pub imp_max_proldr: f64,
    pub runtime_ms: u128,
    pub status: String,
}

impl ComparisonRow {
    fn failed(instance: usize, seed: u64, status: String) -> Self {
        ComparisonRow {
            instance,
            seed,
            opt: 0.0,
            wc_aro: 0.0,
            wc_paro: 0.0,
            wc_pro: 0.0,
            wc_pro_ldr: 0.0,
            l1_paro_aro: 0.0,
            l1_paro_pro: 0.0,
            l1_aro_pro: 0.0,
            imp_nom_aro: 0.0,
            imp_nom_pro: 0.0,
            imp_nom_proldr: 0.0,
            imp_avg_aro: 0.0,
            imp_avg_pro: 0.0,
            imp_avg_proldr: 0.0,
            imp_max_aro: 0.0,
            imp_max_pro: 0.0,
            imp_max_proldr: 0.0,
            runtime_ms: 0,
            status: status.replace(',', ";"),
        }
    }

    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn metrics(&self) -> [f64; 17] {
        [
            self.opt,
            self.wc_aro,
            self.wc_paro,
            self.wc_pro,
            self.wc_pro_ldr,
            self.l1_paro_aro,
            self.l1_paro_pro,
            self.l1_aro_pro,
            self.imp_nom_aro,
            self.imp_nom_pro,
            self.imp_nom_proldr,
            self.imp_avg_aro,
            self.imp_avg_pro,
            self.imp_avg_proldr,
            self.imp_max_aro,
            self.imp_max_pro,
            self.imp_max_proldr,
        ]
    }

    fn to_csv(&self, deterministic: bool) -> String {
        let runtime = if deterministic { 0 } else { self.runtime_ms };
        let metrics: Vec<String> = self.metrics().iter().map(|v| format!("{v}")).collect();
        format!(
            "{},{},{},{},{}",
            self.instance,
            self.seed,
            metrics.join(","),
            runtime,
            self.status
        )
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonOptions {
    /// Scenario count for the average metric.
    pub sample_count: usize,
    pub seed: u64,
    pub deterministic: bool,
    pub improvement: ImprovementOptions,
    pub max_outer: usize,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions {
            sample_count: 10,
            seed: 0,
            deterministic: false,
            improvement: ImprovementOptions::default(),
            max_outer: 100,
        }
    }
}

fn relative_improvement(alt: f64, refined: f64) -> f64 {
    if alt.abs() < 1e-12 {
        0.0
    } else {
        100.0 * (alt - refined) / alt.abs()
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Compare the refined, worst-case-optimal, and PRO Stage-1 decisions on one
/// instance: worst cases, Stage-1 distances, and relative improvements at
/// the nominal scenario, averaged samples, and the maximum-difference
/// scenario.
pub fn run_comparison(
    problem: &TwoStageProblem,
    instance: usize,
    options: &ComparisonOptions,
) -> Result<ComparisonRow> {
    let started = Instant::now();
    let nominal = match &problem.uncertainty.nominal {
        Some(z) => z.clone(),
        None => interior_point(&problem.uncertainty)?.point,
    };

    let aro = solve_aro_vertices(problem)?;
    let mut alg_opts = Algorithm1Options {
        x0: Some(aro.x.clone()),
        opt: Some(aro.opt),
        tol: 1e-7,
        max_outer: options.max_outer,
        improvement: options.improvement.clone(),
    };
    alg_opts.improvement.seed = options.seed;
    let refined = algorithm1(problem, &alg_opts)?;
    let pro = pro_ldr(problem, &nominal)?;

    let wc_aro = worst_case(problem, &aro.x, &DecisionRule::OptimalRecourse)?.value;
    let wc_paro = worst_case(problem, &refined.x, &DecisionRule::OptimalRecourse)?.value;
    let wc_pro = worst_case(problem, &pro.x, &DecisionRule::OptimalRecourse)?.value;
    let wc_pro_ldr = pro.worst_case;

    let ldr_rule = DecisionRule::Linear(pro.rule.clone());
    let value_at = |x: &[f64], z: &Scenario| -> Result<f64> {
        Ok(optimal_recourse(problem, x, z)?.objective)
    };
    let ldr_value_at = |z: &Scenario| -> Result<f64> {
        let y = ldr_rule.evaluate(problem, &pro.x, z)?;
        Ok(evaluate(problem, &pro.x, &y, z)?.objective)
    };

    // nominal metric
    let paro_nom = value_at(&refined.x, &nominal)?;
    let imp_nom_aro = relative_improvement(value_at(&aro.x, &nominal)?, paro_nom);
    let imp_nom_pro = relative_improvement(value_at(&pro.x, &nominal)?, paro_nom);
    let imp_nom_proldr = relative_improvement(ldr_value_at(&nominal)?, paro_nom);

    // average metric over sampled scenarios
    let samples = sample_uniform(&problem.uncertainty, options.sample_count, options.seed)?;
    let mut sums = [0.0f64; 3];
    for z in &samples {
        let paro = value_at(&refined.x, z)?;
        sums[0] += relative_improvement(value_at(&aro.x, z)?, paro);
        sums[1] += relative_improvement(value_at(&pro.x, z)?, paro);
        sums[2] += relative_improvement(ldr_value_at(z)?, paro);
    }
    let count = samples.len().max(1) as f64;
    let (imp_avg_aro, imp_avg_pro, imp_avg_proldr) =
        (sums[0] / count, sums[1] / count, sums[2] / count);

    // maximum metric at the scenario separating the refined and worst-case
    // optimal decisions the most
    let md = max_difference_scenario(problem, &aro.x, &refined.x, &options.improvement)?;
    let paro_star = value_at(&refined.x, &md.scenario)?;
    let imp_max_aro = relative_improvement(value_at(&aro.x, &md.scenario)?, paro_star);
    let imp_max_pro = relative_improvement(value_at(&pro.x, &md.scenario)?, paro_star);
    let imp_max_proldr = relative_improvement(ldr_value_at(&md.scenario)?, paro_star);

    Ok(ComparisonRow {
        instance,
        seed: options.seed,
        opt: aro.opt,
        wc_aro,
        wc_paro,
        wc_pro,
        wc_pro_ldr,
        l1_paro_aro: l1(&refined.x, &aro.x),
        l1_paro_pro: l1(&refined.x, &pro.x),
        l1_aro_pro: l1(&aro.x, &pro.x),
        imp_nom_aro,
        imp_nom_pro,
        imp_nom_proldr,
        imp_avg_aro,
        imp_avg_pro,
        imp_avg_proldr,
        imp_max_aro,
        imp_max_pro,
        imp_max_proldr,
        runtime_ms: started.elapsed().as_millis(),
        status: "ok".into(),
    })
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub deterministic: bool,
}

impl ComparisonReport {
    /// Share of successful instances whose Stage-1 decision differs from the
    /// worst-case optimal or PRO one.
    pub fn differing_share(&self) -> f64 {
        let ok: Vec<&ComparisonRow> = self.rows.iter().filter(|r| r.ok()).collect();
        if ok.is_empty() {
            return 0.0;
        }
        let differing = ok
            .iter()
            .filter(|r| r.l1_paro_aro > 0.5 || r.l1_paro_pro > 0.5)
            .count();
        differing as f64 / ok.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        if !self.deterministic {
            let stamp = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(out, "# generated at unix time {stamp}")?;
        }
        writeln!(out, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(out, "{}", row.to_csv(self.deterministic))?;
        }
        let ok: Vec<&ComparisonRow> = self.rows.iter().filter(|r| r.ok()).collect();
        if !ok.is_empty() {
            let columns: Vec<Vec<f64>> = (0..17)
                .map(|c| ok.iter().map(|r| r.metrics()[c]).collect())
                .collect();
            for (label, pick) in [
                ("min", 0usize),
                ("median", 1),
                ("max", 2),
            ] {
                let stats: Vec<String> = columns
                    .iter()
                    .map(|col| {
                        let mut sorted = col.clone();
                        sorted.sort_by(f64::total_cmp);
                        let v = match pick {
                            0 => sorted[0],
                            1 => {
                                let n = sorted.len();
                                if n % 2 == 1 {
                                    sorted[n / 2]
                                } else {
                                    0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
                                }
                            }
                            _ => sorted[sorted.len() - 1],
                        };
                        format!("{v}")
                    })
                    .collect();
                writeln!(out, "{label},,{},0,summary", stats.join(","))?;
            }
            writeln!(out, "diff_share,,{},0,summary", self.differing_share())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Run the comparison over generated facility-location instances with
/// per-instance derived seeds. Failures become status rows and the run
/// continues; instance-level parallelism keeps row order deterministic.
pub fn run_benchmark(
    config: &FacilityLocationConfig,
    instances: usize,
    seed: u64,
    options: &ComparisonOptions,
) -> ComparisonReport {
    let rows: Vec<ComparisonRow> = (0..instances)
        .into_par_iter()
        .map(|idx| {
            let instance_seed = seed + idx as u64;
            let mut cfg = config.clone();
            cfg.seed = instance_seed;
            let mut opts = options.clone();
            opts.seed = instance_seed;
            opts.improvement.seed = instance_seed;
            match gen_facility_location(&cfg)
                .and_then(|problem| run_comparison(&problem, idx, &opts))
            {
                Ok(mut row) => {
                    row.seed = instance_seed;
                    row
                }
                Err(e) => ComparisonRow::failed(idx, instance_seed, e.to_string()),
            }
        })
        .collect();
    ComparisonReport {
        rows,
        deterministic: options.deterministic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_vertices;

    #[test]
    fn rt_values_scale_with_dose_fraction() {
        for delta in [0.5, 1.0] {
            let p = fixtures::rt_example(delta);
            let aro = solve_aro_vertices(&p).unwrap();
            assert!((aro.opt - 60.0 * delta).abs() < 1e-7);
        }
    }

    #[test]
    fn refined_band_is_dose_independent() {
        for delta in [0.5, 1.0, 2.0] {
            let p = fixtures::rt_example(delta);
            let mut opts = Algorithm1Options::default();
            opts.x0 = Some(vec![35.0]);
            let result = algorithm1(&p, &opts).unwrap();
            assert!(result.x[0] <= 30.0 + 1e-6, "delta {delta}: {:?}", result.x);
        }
    }

    #[test]
    fn facility_location_full_config_is_interior_at_nominal() {
        let cfg = FacilityLocationConfig::full(3);
        let p = gen_facility_location(&cfg).unwrap();
        let nominal = p.uncertainty.nominal.clone().unwrap();
        let slacks = p.uncertainty.slacks(&nominal.z);
        assert!(slacks.iter().all(|&s| s > 0.0));
        assert!((slacks[0] - 10.0).abs() < 1e-12); // 90 - 80
        let report = crate::model::validate(&p).unwrap();
        assert!(report.ok(), "{report}");
    }

    #[test]
    fn desk_config_vertex_count_is_small() {
        let cfg = FacilityLocationConfig::desk(1);
        let p = gen_facility_location(&cfg).unwrap();
        let vs = enumerate_vertices(&p.uncertainty).unwrap();
        assert_eq!(vs.len(), 19); // 15 box corners survive the cap, 4 cut points
    }

    #[test]
    fn single_demand_reduces_to_interval() {
        let mut cfg = FacilityLocationConfig::desk(1);
        cfg.m = 1;
        cfg.gamma = 20.0;
        let p = gen_facility_location(&cfg).unwrap();
        let vs = enumerate_vertices(&p.uncertainty).unwrap();
        assert_eq!(vs.len(), 2);
    }

    #[test]
    fn generator_is_seed_deterministic() {
        let cfg = FacilityLocationConfig::desk(11);
        let a = gen_facility_location(&cfg).unwrap();
        let b = gen_facility_location(&cfg).unwrap();
        assert_eq!(a.c0, b.c0);
        assert_eq!(a.d, b.d);
    }

    #[test]
    fn comparison_row_on_rt() {
        let p = fixtures::rt_example(0.5);
        let opts = ComparisonOptions {
            seed: 5,
            ..Default::default()
        };
        let row = run_comparison(&p, 0, &opts).unwrap();
        assert!(row.ok());
        assert!((row.opt - 30.0).abs() < 1e-6);
        assert!((row.wc_aro - row.wc_paro).abs() < 1e-6);
        // any linear rule is stuck at the worst case in the nominal scenario
        assert!((row.imp_nom_proldr - 100.0 * (30.0 - 27.5) / 30.0).abs() < 1e-6);
        assert!(row.imp_max_aro >= -1e-6);
    }

    #[test]
    fn csv_is_reproducible_when_deterministic() {
        let cfg = FacilityLocationConfig {
            n: 3,
            m: 2,
            gamma: 22.0,
            ..FacilityLocationConfig::desk(0)
        };
        let opts = ComparisonOptions {
            deterministic: true,
            sample_count: 3,
            ..Default::default()
        };
        let a = run_benchmark(&cfg, 2, 9, &opts).to_csv_string();
        let b = run_benchmark(&cfg, 2, 9, &opts).to_csv_string();
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 1 + 2 + 4); // header + rows + summary
    }
}
