//! Pareto refinement of worst-case optimal solutions: extension checks for a
//! fixed Stage-1 decision, zero-recourse-cost refinement over an interior
//! scenario, finite-subset uniqueness certificates, the two-step PRO solve,
//! the scenario-improvement problem (mountain-climbing and bilinear-dual
//! heuristics), the iterative improvement loop, and the maximum-difference
//! scenario finder.

use crate::error::{Error, Result};
use crate::geometry::{enumerate_vertices, interior_point, is_simplex, sample_uniform, VertexList};
use crate::linalg::dot;
use crate::lp::{solve_lp, solve_milp, LpProblem, LpStatus};
use crate::model::{Scenario, StructureKind, TwoStageProblem};
use crate::robust::{
    optimal_recourse, solve_aro_vertices, solve_static_ldr, DecisionRule, LinearRule, RuleMask,
    StaticLdrSolution,
};
use serde::Serialize;

const D_ZERO_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Value ledger
// ---------------------------------------------------------------------------

/// Scenarios paired with the objective value a competing Stage-1 decision
/// must attain there.
#[derive(Clone, Debug, Serialize)]
pub struct ValueLedger {
    pub entries: Vec<(Scenario, f64)>,
}

impl ValueLedger {
    pub fn from_vertices(vertices: &VertexList, opt: f64) -> Self {
        ValueLedger {
            entries: vertices.iter().map(|v| (v.clone(), opt)).collect(),
        }
    }

    pub fn push(&mut self, scenario: Scenario, value: f64) {
        self.entries.push((scenario, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Extension check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ExtensionCheck {
    /// Max over scenarios of the rule's objective excess over the best
    /// feasible recourse; at most ~0 certifies the rule scenario-wise optimal.
    pub bound: f64,
    pub z_star: Scenario,
    pub y_star: Vec<f64>,
    /// True for the exact LP path, false for the sampled fallback.
    pub certified: bool,
}

/// Exact check for affine rules: one LP over `(z, y)` maximizing
/// `d^T (y_rule(z) - y)` subject to recourse feasibility at `x` and `z in U`.
pub fn check_extension(
    problem: &TwoStageProblem,
    x: &[f64],
    rule: &DecisionRule,
) -> Result<ExtensionCheck> {
    let (w, w_mat_d): (Vec<f64>, Vec<f64>) = match rule {
        DecisionRule::Static(y) => (y.clone(), vec![0.0; problem.l]),
        DecisionRule::Linear(r) => (r.w.clone(), r.w_mat.tr_matvec(&problem.d)),
        _ => {
            return Err(Error::Precondition(
                "exact extension check needs a static or linear rule; use the sampled fallback"
                    .into(),
            ))
        }
    };
    let (l, n_y) = (problem.l, problem.n_y);
    // columns: z | y; maximize (W^T d)^T z - d^T y + d^T w
    let mut lp = LpProblem::new(l + n_y);
    for (c, obj) in w_mat_d.iter().enumerate() {
        lp.objective[c] = -obj;
    }
    for (k, &dk) in problem.d.iter().enumerate() {
        lp.objective[l + k] = dk;
    }
    for i in 0..problem.m {
        // A(z) x + B y <= r(z), affine in z for fixed x
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for c in 0..l {
            let coef = dot(problem.a_z[c].row(i), x) - problem.r_z[(i, c)];
            if coef != 0.0 {
                entries.push((c, coef));
            }
        }
        for k in 0..n_y {
            let bk = problem.b[(i, k)];
            if bk != 0.0 {
                entries.push((l + k, bk));
            }
        }
        lp.add_sparse_row(&entries, problem.r0[i] - dot(problem.a0.row(i), x));
    }
    for (i, row) in problem.uncertainty.h_mat.iter_rows().enumerate() {
        let entries: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|&(_, v)| *v != 0.0)
            .map(|(c, &v)| (c, v))
            .collect();
        lp.add_sparse_row(&entries, problem.uncertainty.h_vec[i]);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::NotAdaptiveFeasible { scenario: vec![] })
        }
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(0)),
    }
    let bound = -sol.objective + dot(&problem.d, &w);
    Ok(ExtensionCheck {
        bound,
        z_star: Scenario::new(sol.x[..l].to_vec()),
        y_star: sol.x[l..l + n_y].to_vec(),
        certified: true,
    })
}

/// Sampled fallback for non-affine rules: compares the rule's objective with
/// the optimal recourse at each given scenario. A heuristic lower bound only.
pub fn check_extension_sampled(
    problem: &TwoStageProblem,
    x: &[f64],
    rule: &DecisionRule,
    scenarios: &[Scenario],
) -> Result<ExtensionCheck> {
    let mut best: Option<ExtensionCheck> = None;
    for z in scenarios {
        let y_rule = rule.evaluate(problem, x, z)?;
        let rec = optimal_recourse(problem, x, z)?;
        let gap = dot(&problem.d, &y_rule) - dot(&problem.d, &rec.y);
        if best.as_ref().is_none_or(|b| gap > b.bound) {
            best = Some(ExtensionCheck {
                bound: gap,
                z_star: z.clone(),
                y_star: rec.y,
                certified: false,
            });
        }
    }
    best.ok_or_else(|| Error::Precondition("sampled check needs at least one scenario".into()))
}

// ---------------------------------------------------------------------------
// Refinement for d = 0
// ---------------------------------------------------------------------------

fn require_zero_d(problem: &TwoStageProblem) -> Result<()> {
    if problem.d.iter().any(|v| v.abs() > D_ZERO_TOL) {
        return Err(Error::Precondition(
            "refinement requires zero Stage-2 objective coefficients".into(),
        ));
    }
    Ok(())
}

/// With no Stage-2 objective, re-optimize the worst-case optimal set against
/// an interior scenario: minimize `c(z_bar)^T x` subject to per-vertex
/// feasibility and per-vertex optimality caps at `opt`.
pub fn refine_d0(problem: &TwoStageProblem, opt: f64, z_bar: &Scenario) -> Result<Vec<f64>> {
    require_zero_d(problem)?;
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let (n_x, n_y) = (problem.n_x, problem.n_y);
    let mut lp = LpProblem::new(n_x + vertices.len() * n_y);
    for (j, &is_bin) in problem.integrality.iter().enumerate() {
        if is_bin {
            lp.set_binary(j);
        }
    }
    let c_bar = problem.c_at(&z_bar.z);
    lp.objective[..n_x].copy_from_slice(&c_bar);
    for (v_idx, v) in vertices.iter().enumerate() {
        let y_base = n_x + v_idx * n_y;
        let r = problem.r_at(&v.z);
        for i in 0..problem.m {
            let a = problem.a_row_at(i, &v.z);
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for (j, &aj) in a.iter().enumerate() {
                if aj != 0.0 {
                    entries.push((j, aj));
                }
            }
            for k in 0..n_y {
                let bk = problem.b[(i, k)];
                if bk != 0.0 {
                    entries.push((y_base + k, bk));
                }
            }
            lp.add_sparse_row(&entries, r[i]);
        }
        let c = problem.c_at(&v.z);
        let entries: Vec<(usize, f64)> = c
            .iter()
            .enumerate()
            .filter(|&(_, v)| *v != 0.0)
            .map(|(j, &v)| (j, v))
            .collect();
        lp.add_sparse_row(&entries, opt + 1e-9);
    }
    lp.compact_singleton_rows();
    let sol = if problem.has_binaries() {
        solve_milp(&lp)?
    } else {
        solve_lp(&lp)?
    };
    match sol.status {
        LpStatus::Optimal => Ok(sol.x[..n_x].to_vec()),
        LpStatus::Infeasible => Err(Error::Precondition(
            "refinement infeasible: the supplied optimum is inconsistent".into(),
        )),
        LpStatus::Unbounded => Err(Error::Unbounded),
        LpStatus::IterationLimit => Err(Error::IterationLimit(sol.nodes_explored)),
    }
}

// ---------------------------------------------------------------------------
// Finite-subset uniqueness certificate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct UniquenessCertificate {
    pub x: Vec<f64>,
    pub unique: bool,
    /// Per-coordinate width of the optimal Stage-1 face.
    pub ranges: Vec<f64>,
    pub finite_value: f64,
    /// True when `x` is also adaptive feasible on the full set and the
    /// finite-program value matches the supplied full optimum.
    pub paro_certified: bool,
}

/// Solve the finite min-max program over `scenarios`, then measure the
/// optimal Stage-1 face coordinate-wise. A unique finite solution that is
/// adaptive feasible on the full set at the same value is a certificate.
pub fn certify_unique(
    problem: &TwoStageProblem,
    scenarios: &[Scenario],
    full_opt: Option<f64>,
) -> Result<UniquenessCertificate> {
    if scenarios.is_empty() {
        return Err(Error::Precondition("scenario list must be nonempty".into()));
    }
    let (n_x, n_y) = (problem.n_x, problem.n_y);
    let n = scenarios.len();
    let t_col = n_x + n * n_y;
    let build = |cap: Option<f64>| {
        let mut lp = LpProblem::new(t_col + 1);
        for (j, &is_bin) in problem.integrality.iter().enumerate() {
            if is_bin {
                lp.set_binary(j);
            }
        }
        for (s_idx, s) in scenarios.iter().enumerate() {
            let y_base = n_x + s_idx * n_y;
            let r = problem.r_at(&s.z);
            for i in 0..problem.m {
                let a = problem.a_row_at(i, &s.z);
                let mut entries: Vec<(usize, f64)> = Vec::new();
                for (j, &aj) in a.iter().enumerate() {
                    if aj != 0.0 {
                        entries.push((j, aj));
                    }
                }
                for k in 0..n_y {
                    let bk = problem.b[(i, k)];
                    if bk != 0.0 {
                        entries.push((y_base + k, bk));
                    }
                }
                lp.add_sparse_row(&entries, r[i]);
            }
            let c = problem.c_at(&s.z);
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for (j, &cj) in c.iter().enumerate() {
                if cj != 0.0 {
                    entries.push((j, cj));
                }
            }
            for (k, &dk) in problem.d.iter().enumerate() {
                if dk != 0.0 {
                    entries.push((y_base + k, dk));
                }
            }
            match cap {
                Some(value) => lp.add_sparse_row(&entries, value),
                None => {
                    entries.push((t_col, -1.0));
                    lp.add_sparse_row(&entries, 0.0);
                }
            }
        }
        lp
    };
    let solve = |lp: &LpProblem| -> Result<crate::lp::LpSolution> {
        let sol = if problem.has_binaries() {
            solve_milp(lp)?
        } else {
            solve_lp(lp)?
        };
        match sol.status {
            LpStatus::Optimal => Ok(sol),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
            LpStatus::IterationLimit => Err(Error::IterationLimit(sol.nodes_explored)),
        }
    };

    let mut base = build(None);
    base.objective[t_col] = 1.0;
    base.compact_singleton_rows();
    let first = solve(&base)?;
    let value = first.objective;

    let mut ranges = vec![0.0; n_x];
    let mut unique = true;
    for j in 0..n_x {
        let mut extreme = [0.0; 2];
        for (side, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let mut lp = build(Some(value + 1e-9));
            lp.objective[j] = sign;
            lp.compact_singleton_rows();
            extreme[side] = sign * solve(&lp)?.objective;
        }
        ranges[j] = (extreme[1] - extreme[0]).abs();
        if ranges[j] > 1e-6 {
            unique = false;
        }
    }

    // Adaptive feasibility of x on the full set, vertex-wise.
    let x = first.x[..n_x].to_vec();
    let mut arf = true;
    if unique {
        let vertices = enumerate_vertices(&problem.uncertainty)?;
        for v in vertices.iter() {
            if optimal_recourse(problem, &x, v).is_err() {
                arf = false;
                break;
            }
        }
    }
    let opt_matches = full_opt.is_some_and(|opt| (value - opt).abs() <= 1e-6);
    Ok(UniquenessCertificate {
        x,
        unique,
        ranges,
        finite_value: value,
        paro_certified: unique && arf && opt_matches,
    })
}

// ---------------------------------------------------------------------------
// PRO step (static LDR then nominal re-optimization)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ProLdrSolution {
    pub x: Vec<f64>,
    pub rule: LinearRule,
    pub worst_case: f64,
    pub nominal_value: f64,
}

/// Two-step PRO solve under a rule mask: first the worst-case optimal masked
/// LDR, then a re-optimization for the scenario `z_bar` constrained never to
/// deteriorate any scenario and to stay feasible everywhere.
pub fn pro_ldr_masked(
    problem: &TwoStageProblem,
    z_bar: &Scenario,
    mask: &RuleMask,
) -> Result<ProLdrSolution> {
    let step1: StaticLdrSolution = solve_static_ldr(problem, mask)?;
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let (n_x, n_y, l) = (problem.n_x, problem.n_y, problem.l);

    // columns: x | w | free W entries
    let w_base = n_x;
    let mut w_cols = vec![usize::MAX; n_y * l];
    let mut next = w_base + n_y;
    for k in 0..n_y {
        for c in 0..l {
            if mask.allows(k, c) {
                w_cols[k * l + c] = next;
                next += 1;
            }
        }
    }
    let mut lp = LpProblem::new(next);
    for (j, &is_bin) in problem.integrality.iter().enumerate() {
        if is_bin {
            lp.set_binary(j);
        }
    }
    let y_entries = |k: usize, z: &[f64], scale: f64, entries: &mut Vec<(usize, f64)>| {
        entries.push((w_base + k, scale));
        for (c, &zc) in z.iter().enumerate() {
            let col = w_cols[k * l + c];
            if col != usize::MAX && zc != 0.0 {
                entries.push((col, scale * zc));
            }
        }
    };
    let step1_value_at = |z: &[f64]| -> f64 {
        dot(&problem.c_at(z), &step1.x) + dot(&problem.d, &step1.rule.evaluate(z))
    };
    for v in vertices.iter() {
        // never deteriorate: value(x, w, W; v) <= value of step 1 at v
        let c = problem.c_at(&v.z);
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (j, &cj) in c.iter().enumerate() {
            if cj != 0.0 {
                entries.push((j, cj));
            }
        }
        for (k, &dk) in problem.d.iter().enumerate() {
            if dk != 0.0 {
                y_entries(k, &v.z, dk, &mut entries);
            }
        }
        lp.add_sparse_row(&entries, step1_value_at(&v.z) + 1e-9);

        // feasibility everywhere
        let r = problem.r_at(&v.z);
        for i in 0..problem.m {
            let a = problem.a_row_at(i, &v.z);
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for (j, &aj) in a.iter().enumerate() {
                if aj != 0.0 {
                    entries.push((j, aj));
                }
            }
            for k in 0..n_y {
                let bk = problem.b[(i, k)];
                if bk != 0.0 {
                    y_entries(k, &v.z, bk, &mut entries);
                }
            }
            lp.add_sparse_row(&entries, r[i]);
        }
    }
    // objective: value at z_bar
    let c_bar = problem.c_at(&z_bar.z);
    lp.objective[..n_x].copy_from_slice(&c_bar);
    for (k, &dk) in problem.d.iter().enumerate() {
        if dk != 0.0 {
            lp.objective[w_base + k] += dk;
            for (c, &zc) in z_bar.z.iter().enumerate() {
                let col = w_cols[k * l + c];
                if col != usize::MAX {
                    lp.objective[col] += dk * zc;
                }
            }
        }
    }
    lp.compact_singleton_rows();
    let sol = if problem.has_binaries() {
        solve_milp(&lp)?
    } else {
        solve_lp(&lp)?
    };
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::StructureInfeasible),
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(sol.nodes_explored)),
    }
    let x = sol.x[..n_x].to_vec();
    let w = sol.x[w_base..w_base + n_y].to_vec();
    let mut w_mat = crate::linalg::Matrix::zeros(n_y, l);
    for k in 0..n_y {
        for c in 0..l {
            let col = w_cols[k * l + c];
            if col != usize::MAX {
                w_mat[(k, c)] = sol.x[col];
            }
        }
    }
    let rule = LinearRule { w, w_mat };
    let wc = crate::robust::worst_case(problem, &x, &DecisionRule::Linear(rule.clone()))?;
    Ok(ProLdrSolution {
        x,
        rule,
        worst_case: wc.value,
        nominal_value: sol.objective,
    })
}

/// Full-LDR PRO solve at the given nominal scenario.
pub fn pro_ldr(problem: &TwoStageProblem, z_bar: &Scenario) -> Result<ProLdrSolution> {
    pro_ldr_masked(problem, z_bar, &RuleMask::full(problem.n_y, problem.l))
}

// ---------------------------------------------------------------------------
// Structure-driven refinement (d = 0)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureBranch {
    Constraintwise,
    Hybrid,
    Block,
    Simplex,
}

#[derive(Clone, Debug)]
pub struct DrParoSolution {
    pub x: Vec<f64>,
    pub rule: LinearRule,
    pub branch: StructureBranch,
    pub worst_case: f64,
}

/// Pick the decision-rule structure the instance supports, solve the masked
/// static problem, and apply the PRO step restricted to the same mask.
/// Requires a zero Stage-2 objective.
pub fn dr_paro(problem: &TwoStageProblem) -> Result<DrParoSolution> {
    require_zero_d(problem)?;
    let report = crate::model::detect_structure(problem);
    let (n_y, l) = (problem.n_y, problem.l);
    let (branch, mask) = match report.kind {
        StructureKind::Constraintwise => (
            StructureBranch::Constraintwise,
            RuleMask::static_rule(n_y, l),
        ),
        StructureKind::Hybrid => (
            StructureBranch::Hybrid,
            RuleMask::columns(n_y, l, &report.non_constraintwise_params),
        ),
        StructureKind::Block => (StructureBranch::Block, RuleMask::blocks(&report, n_y, l)),
        _ => {
            let witness = is_simplex(&problem.uncertainty)?;
            if witness.is_simplex {
                (StructureBranch::Simplex, RuleMask::full(n_y, l))
            } else {
                return Err(Error::NoApplicableStructure(format!(
                    "occurrence pattern is {:?} and the set has {} vertices at rank {}",
                    report.kind, witness.vertex_count, witness.rank
                )));
            }
        }
    };
    let z_bar = match &problem.uncertainty.nominal {
        Some(z) => z.clone(),
        None => interior_point(&problem.uncertainty)?.point,
    };
    let pro = pro_ldr_masked(problem, &z_bar, &mask)?;
    Ok(DrParoSolution {
        x: pro.x,
        rule: pro.rule,
        branch,
        worst_case: pro.worst_case,
    })
}

// ---------------------------------------------------------------------------
// Improvement problem
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ImprovementMethod {
    Mountain,
    Bilinear,
}

impl std::str::FromStr for ImprovementMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mountain" => Ok(ImprovementMethod::Mountain),
            "bilinear" => Ok(ImprovementMethod::Bilinear),
            other => Err(format!("unknown improvement method `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ImprovementOptions {
    pub method: ImprovementMethod,
    /// Explicit warm-start scenarios; defaults to the interior point plus
    /// `sample_count` sampled scenarios.
    pub warm_starts: Option<Vec<Scenario>>,
    pub sample_count: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ImprovementOptions {
    fn default() -> Self {
        ImprovementOptions {
            method: ImprovementMethod::Mountain,
            warm_starts: None,
            sample_count: 4,
            seed: 2024,
            tol: 1e-7,
            max_iters: 100,
        }
    }
}

/// Final dual block of the bilinear form: `B^T lambda = d`, `lambda <= 0`.
#[derive(Clone, Debug, Serialize)]
pub struct BilinearState {
    pub lambda: Vec<f64>,
    /// `r(z_bar) - A x_hat` at the final scenario.
    pub inner_rhs: Vec<f64>,
    /// `min d^T y` over the inner feasible set at the final scenario.
    pub inner_value: f64,
}

#[derive(Clone, Debug)]
pub struct ImprovementResult {
    /// Heuristic value of the improvement problem; nonpositive because the
    /// no-change solution is always feasible.
    pub p: f64,
    pub z_bar: Scenario,
    pub x_bar: Vec<f64>,
    pub y_bar: Vec<f64>,
    pub ledger_recourse: Vec<Vec<f64>>,
    pub method: ImprovementMethod,
    pub iterations: usize,
    pub converged: bool,
    /// Both methods are heuristics; never true.
    pub certified: bool,
    pub bilinear: Option<BilinearState>,
}

struct BlockLayout {
    l: usize,
    n_x: usize,
    n_y: usize,
    n_entries: usize,
}

impl BlockLayout {
    fn z(&self, c: usize) -> usize {
        c
    }
    fn x(&self, j: usize) -> usize {
        self.l + j
    }
    fn y(&self, k: usize) -> usize {
        self.l + self.n_x + k
    }
    fn y_i(&self, i: usize, k: usize) -> usize {
        self.l + self.n_x + self.n_y + i * self.n_y + k
    }
    fn total(&self) -> usize {
        self.l + self.n_x + self.n_y * (1 + self.n_entries)
    }
}

/// Shared LP over `(z_bar, x_bar, y_bar, y^1..y^|V|)` with ledger rows. The
/// mountain variant freezes the adversary recourse `y_hat` and keeps it
/// admissible at the chosen scenario; the bilinear variant prices the
/// adversary through `lambda` in the objective instead.
#[allow(clippy::too_many_arguments)]
fn solve_block_step(
    problem: &TwoStageProblem,
    x_hat: &[f64],
    ledger: &ValueLedger,
    frozen_y_hat: Option<&[f64]>,
    lambda: Option<&[f64]>,
    pinned_x_bar: Option<&[f64]>,
) -> Result<(Vec<f64>, BlockLayout)> {
    let layout = BlockLayout {
        l: problem.l,
        n_x: problem.n_x,
        n_y: problem.n_y,
        n_entries: ledger.len(),
    };
    let mut lp = LpProblem::new(layout.total());
    match pinned_x_bar {
        Some(x_bar) => {
            for (j, &v) in x_bar.iter().enumerate() {
                lp.set_bounds(layout.x(j), v, v);
            }
        }
        None => {
            for (j, &is_bin) in problem.integrality.iter().enumerate() {
                if is_bin {
                    lp.set_binary(layout.x(j));
                }
            }
        }
    }

    // objective: c^T x_bar + d^T y_bar (- lambda^T R z_bar for bilinear)
    for (j, &cj) in problem.c0.iter().enumerate() {
        lp.objective[layout.x(j)] = cj;
    }
    for (k, &dk) in problem.d.iter().enumerate() {
        lp.objective[layout.y(k)] = dk;
    }
    if let Some(lam) = lambda {
        let rt_lambda = problem.r_z.tr_matvec(lam);
        for (c, &v) in rt_lambda.iter().enumerate() {
            lp.objective[layout.z(c)] -= v;
        }
    }

    // A x_bar + B y_bar - R z_bar <= r0
    for i in 0..problem.m {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for j in 0..problem.n_x {
            let a = problem.a0[(i, j)];
            if a != 0.0 {
                entries.push((layout.x(j), a));
            }
        }
        for k in 0..problem.n_y {
            let b = problem.b[(i, k)];
            if b != 0.0 {
                entries.push((layout.y(k), b));
            }
        }
        for c in 0..problem.l {
            let r = problem.r_z[(i, c)];
            if r != 0.0 {
                entries.push((layout.z(c), -r));
            }
        }
        lp.add_sparse_row(&entries, problem.r0[i]);
    }
    // ledger rows: feasibility and value caps at each recorded scenario
    for (i, (z_i, v_i)) in ledger.entries.iter().enumerate() {
        let r = problem.r_at(&z_i.z);
        for row in 0..problem.m {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for j in 0..problem.n_x {
                let a = problem.a0[(row, j)];
                if a != 0.0 {
                    entries.push((layout.x(j), a));
                }
            }
            for k in 0..problem.n_y {
                let b = problem.b[(row, k)];
                if b != 0.0 {
                    entries.push((layout.y_i(i, k), b));
                }
            }
            lp.add_sparse_row(&entries, r[row]);
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for j in 0..problem.n_x {
            let c = problem.c0[j];
            if c != 0.0 {
                entries.push((layout.x(j), c));
            }
        }
        for k in 0..problem.n_y {
            let d = problem.d[k];
            if d != 0.0 {
                entries.push((layout.y_i(i, k), d));
            }
        }
        lp.add_sparse_row(&entries, *v_i + 1e-9);
    }
    // z_bar in U
    for (i, row) in problem.uncertainty.h_mat.iter_rows().enumerate() {
        let entries: Vec<(usize, f64)> = row
            .iter()
            .enumerate()
            .filter(|&(_, v)| *v != 0.0)
            .map(|(c, &v)| (layout.z(c), v))
            .collect();
        lp.add_sparse_row(&entries, problem.uncertainty.h_vec[i]);
    }
    // keep the frozen adversary admissible: A x_hat + B y_hat <= r(z_bar)
    if let Some(y_hat) = frozen_y_hat {
        for i in 0..problem.m {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for c in 0..problem.l {
                let r = problem.r_z[(i, c)];
                if r != 0.0 {
                    entries.push((layout.z(c), -r));
                }
            }
            let rhs = problem.r0[i]
                - dot(problem.a0.row(i), x_hat)
                - dot(problem.b.row(i), y_hat);
            lp.add_sparse_row(&entries, rhs);
        }
    }

    lp.compact_singleton_rows();
    let sol = if problem.has_binaries() && pinned_x_bar.is_none() {
        solve_milp(&lp)?
    } else {
        solve_lp(&lp)?
    };
    match sol.status {
        LpStatus::Optimal => Ok((sol.x, layout)),
        LpStatus::Infeasible => Err(Error::Precondition(
            "improvement block step infeasible: the ledger does not admit a robust optimal x"
                .into(),
        )),
        LpStatus::Unbounded => Err(Error::Unbounded),
        LpStatus::IterationLimit => Err(Error::IterationLimit(sol.nodes_explored)),
    }
}

struct Candidate {
    p: f64,
    z_bar: Scenario,
    x_bar: Vec<f64>,
    y_bar: Vec<f64>,
    ledger_recourse: Vec<Vec<f64>>,
    iterations: usize,
    converged: bool,
    bilinear: Option<BilinearState>,
}

fn value_of(problem: &TwoStageProblem, x: &[f64], y: &[f64]) -> f64 {
    dot(&problem.c0, x) + dot(&problem.d, y)
}

fn run_one_start(
    problem: &TwoStageProblem,
    x_hat: &[f64],
    ledger: &ValueLedger,
    start: &Scenario,
    options: &ImprovementOptions,
    pinned_x_bar: Option<&[f64]>,
) -> Result<Candidate> {
    let mut inner = optimal_recourse(problem, x_hat, start)?;
    let mut best: Option<Candidate> = None;
    let mut prev_value: Option<f64> = None;
    let mut iterations = 0;
    let mut converged = false;

    // With a pinned competitor the warm-start point itself is a valid
    // candidate; record it before alternating.
    if let Some(x_bar) = pinned_x_bar {
        let rec = optimal_recourse(problem, x_bar, start)?;
        best = Some(Candidate {
            p: value_of(problem, x_bar, &rec.y) - inner.objective,
            z_bar: start.clone(),
            x_bar: x_bar.to_vec(),
            y_bar: rec.y,
            ledger_recourse: Vec::new(),
            iterations: 0,
            converged: false,
            bilinear: None,
        });
    }

    while iterations < options.max_iters {
        iterations += 1;
        let (frozen, lambda): (Option<Vec<f64>>, Option<Vec<f64>>) = match options.method {
            ImprovementMethod::Mountain => (Some(inner.y.clone()), None),
            ImprovementMethod::Bilinear => (None, Some(inner.dual.clone())),
        };
        let (sol, layout) = solve_block_step(
            problem,
            x_hat,
            ledger,
            frozen.as_deref(),
            lambda.as_deref(),
            pinned_x_bar,
        )?;
        let z_bar = Scenario::new((0..layout.l).map(|c| sol[layout.z(c)]).collect());
        let x_bar: Vec<f64> = (0..layout.n_x).map(|j| sol[layout.x(j)]).collect();
        let y_bar: Vec<f64> = (0..layout.n_y).map(|k| sol[layout.y(k)]).collect();
        let ledger_recourse: Vec<Vec<f64>> = (0..ledger.len())
            .map(|i| (0..layout.n_y).map(|k| sol[layout.y_i(i, k)]).collect())
            .collect();
        let block_value = match options.method {
            ImprovementMethod::Mountain => {
                value_of(problem, &x_bar, &y_bar)
                    - (dot(&problem.c0, x_hat) + dot(&problem.d, frozen.as_ref().unwrap()))
            }
            ImprovementMethod::Bilinear => {
                let lam = lambda.as_ref().unwrap();
                let rhs: Vec<f64> = problem
                    .r_at(&z_bar.z)
                    .iter()
                    .zip(problem.a0.matvec(x_hat))
                    .map(|(r, ax)| r - ax)
                    .collect();
                value_of(problem, &x_bar, &y_bar)
                    - (dot(&problem.c0, x_hat) + dot(lam, &rhs))
            }
        };

        // adversary step: exact inner optimum at the new scenario
        inner = optimal_recourse(problem, x_hat, &z_bar)?;
        let exact_p = value_of(problem, &x_bar, &y_bar) - inner.objective;

        let is_better = best.as_ref().is_none_or(|b| exact_p < b.p - 1e-12);
        if is_better {
            let rhs: Vec<f64> = problem
                .r_at(&z_bar.z)
                .iter()
                .zip(problem.a0.matvec(x_hat))
                .map(|(r, ax)| r - ax)
                .collect();
            best = Some(Candidate {
                p: exact_p,
                z_bar: z_bar.clone(),
                x_bar,
                y_bar,
                ledger_recourse,
                iterations,
                converged: false,
                bilinear: Some(BilinearState {
                    lambda: inner.dual.clone(),
                    inner_value: inner.objective - dot(&problem.c0, x_hat),
                    inner_rhs: rhs,
                }),
            });
        }

        if let Some(prev) = prev_value {
            if (exact_p - prev).abs() <= options.tol {
                converged = true;
                break;
            }
        }
        if (exact_p - block_value).abs() <= options.tol {
            converged = true;
            break;
        }
        prev_value = Some(exact_p);
    }

    let mut candidate = best.expect("at least one block step ran");
    candidate.converged = converged;
    candidate.iterations = iterations;
    Ok(candidate)
}

fn default_warm_starts(
    problem: &TwoStageProblem,
    options: &ImprovementOptions,
) -> Result<Vec<Scenario>> {
    match &options.warm_starts {
        Some(list) => Ok(list.clone()),
        None => {
            let mut starts = vec![interior_point(&problem.uncertainty)?.point];
            starts.extend(sample_uniform(
                &problem.uncertainty,
                options.sample_count,
                options.seed,
            )?);
            Ok(starts)
        }
    }
}

/// Scenario-improvement problem: find a scenario where `x_hat` is most
/// suboptimal and a robust optimal competitor improving there. Requires
/// right-hand-side uncertainty. Heuristic: alternating LPs from each warm
/// start, best result kept, never certified globally optimal.
pub fn improvement(
    problem: &TwoStageProblem,
    x_hat: &[f64],
    ledger: &ValueLedger,
    options: &ImprovementOptions,
) -> Result<ImprovementResult> {
    if !problem.is_rhs_uncertainty_only() {
        return Err(Error::Precondition(
            "improvement requires right-hand-side uncertainty only".into(),
        ));
    }
    let starts = default_warm_starts(problem, options)?;
    if starts.is_empty() {
        return Err(Error::Precondition("no warm starts available".into()));
    }
    let mut best: Option<Candidate> = None;
    for start in &starts {
        let candidate = run_one_start(problem, x_hat, ledger, start, options, None)?;
        if best.as_ref().is_none_or(|b| candidate.p < b.p - 1e-12) {
            best = Some(candidate);
        }
    }
    let best = best.expect("warm start list is nonempty");

    if best.p > 0.0 {
        // The no-change solution is feasible with value exactly zero; fall
        // back to it rather than report a spurious positive estimate.
        let z_bar = starts[0].clone();
        let rec = optimal_recourse(problem, x_hat, &z_bar)?;
        let mut ledger_recourse = Vec::with_capacity(ledger.len());
        for (z_i, v_i) in &ledger.entries {
            let rec_i = optimal_recourse(problem, x_hat, z_i)?;
            if rec_i.objective > v_i + 1e-6 {
                return Err(Error::Precondition(format!(
                    "x_hat misses the required value at a ledger scenario by {:.3e}",
                    rec_i.objective - v_i
                )));
            }
            ledger_recourse.push(rec_i.y);
        }
        let rhs: Vec<f64> = problem
            .r_at(&z_bar.z)
            .iter()
            .zip(problem.a0.matvec(x_hat))
            .map(|(r, ax)| r - ax)
            .collect();
        return Ok(ImprovementResult {
            p: 0.0,
            z_bar,
            x_bar: x_hat.to_vec(),
            y_bar: rec.y.clone(),
            ledger_recourse,
            method: options.method,
            iterations: best.iterations,
            converged: best.converged,
            certified: false,
            bilinear: Some(BilinearState {
                lambda: rec.dual.clone(),
                inner_value: dot(&problem.d, &rec.y),
                inner_rhs: rhs,
            }),
        });
    }

    Ok(ImprovementResult {
        p: best.p,
        z_bar: best.z_bar,
        x_bar: best.x_bar,
        y_bar: best.y_bar,
        ledger_recourse: best.ledger_recourse,
        method: options.method,
        iterations: best.iterations,
        converged: best.converged,
        certified: false,
        bilinear: best.bilinear,
    })
}

// ---------------------------------------------------------------------------
// Iterative improvement loop
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub p: f64,
    pub scenario: Scenario,
    pub attained_value: f64,
    /// Stage-1 iterate after this improvement call.
    pub x: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Algorithm1Result {
    pub x: Vec<f64>,
    pub opt: f64,
    pub trace: Vec<TraceEntry>,
    /// False when the outer loop hit its iteration cap.
    pub converged: bool,
    /// Always false: the inner solves are heuristic, so the result is an
    /// approximate Pareto refinement.
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct Algorithm1Options {
    pub x0: Option<Vec<f64>>,
    /// Known worst-case optimum; skips the internal ARO solve when `x0` is
    /// also supplied.
    pub opt: Option<f64>,
    pub tol: f64,
    pub max_outer: usize,
    pub improvement: ImprovementOptions,
}

impl Default for Algorithm1Options {
    fn default() -> Self {
        Algorithm1Options {
            x0: None,
            opt: None,
            tol: 1e-7,
            max_outer: 100,
            improvement: ImprovementOptions::default(),
        }
    }
}

/// Iterative improvement: start from a worst-case optimal decision, solve the
/// improvement problem, append the found scenario with its attained value to
/// the ledger, and repeat until no further improvement is found.
pub fn algorithm1(
    problem: &TwoStageProblem,
    options: &Algorithm1Options,
) -> Result<Algorithm1Result> {
    if !problem.is_rhs_uncertainty_only() {
        return Err(Error::Precondition(
            "iterative improvement requires right-hand-side uncertainty only".into(),
        ));
    }
    let (mut x, opt, vertices) = match (&options.x0, options.opt) {
        (Some(x0), Some(opt)) => (
            x0.clone(),
            opt,
            enumerate_vertices(&problem.uncertainty)?,
        ),
        _ => {
            let aro = solve_aro_vertices(problem)?;
            (
                options.x0.clone().unwrap_or(aro.x),
                aro.opt,
                aro.vertices,
            )
        }
    };
    let mut ledger = ValueLedger::from_vertices(&vertices, opt);
    let mut trace = Vec::new();
    let mut pending: Option<(Scenario, f64)> = None;
    let mut converged = false;

    for k in 1..=options.max_outer {
        if let Some((scenario, value)) = pending.take() {
            ledger.push(scenario, value);
        }
        let imp = improvement(problem, &x, &ledger, &options.improvement)?;
        let attained = value_of(problem, &imp.x_bar, &imp.y_bar);
        let next_x = if imp.p < -options.tol {
            imp.x_bar.clone()
        } else {
            x.clone()
        };
        trace.push(TraceEntry {
            iteration: k,
            p: imp.p,
            scenario: imp.z_bar.clone(),
            attained_value: attained,
            x: next_x.clone(),
        });
        if imp.p < -options.tol {
            x = next_x;
            pending = Some((imp.z_bar, attained));
        } else {
            converged = true;
            break;
        }
    }

    Ok(Algorithm1Result {
        x,
        opt,
        trace,
        converged,
        certified: false,
    })
}

// ---------------------------------------------------------------------------
// Maximum-difference scenario
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MaxDifference {
    pub scenario: Scenario,
    /// Largest found per-scenario advantage of `x_b` over `x_a` under
    /// optimal recourse on both sides; a heuristic lower bound.
    pub gap: f64,
}

/// Improvement problem with both Stage-1 decisions fixed. The worst-case
/// vertex of `x_a` is always among the warm starts, which pins the gap at
/// zero or better.
pub fn max_difference_scenario(
    problem: &TwoStageProblem,
    x_a: &[f64],
    x_b: &[f64],
    options: &ImprovementOptions,
) -> Result<MaxDifference> {
    if !problem.is_rhs_uncertainty_only() {
        return Err(Error::Precondition(
            "maximum-difference search requires right-hand-side uncertainty only".into(),
        ));
    }
    let wc_a = crate::robust::worst_case(problem, x_a, &DecisionRule::OptimalRecourse)?;
    let wc_b = crate::robust::worst_case(problem, x_b, &DecisionRule::OptimalRecourse)?;
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let ledger = ValueLedger::from_vertices(&vertices, wc_b.value + 1e-6);

    let mut starts = default_warm_starts(problem, options)?;
    starts.insert(0, wc_a.scenario);

    let mut best: Option<Candidate> = None;
    for start in &starts {
        let candidate = run_one_start(problem, x_a, &ledger, start, options, Some(x_b))?;
        if best.as_ref().is_none_or(|b| candidate.p < b.p - 1e-12) {
            best = Some(candidate);
        }
    }
    let best = best.expect("warm start list is nonempty");
    Ok(MaxDifference {
        scenario: best.z_bar,
        gap: -best.p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::fixtures;

    fn rt() -> TwoStageProblem {
        fixtures::rt_example(0.5)
    }

    #[test]
    fn static_rule_is_not_an_extension() {
        let check = check_extension(&rt(), &[25.0], &DecisionRule::Static(vec![35.0])).unwrap();
        assert!((check.bound - 5.0).abs() < 1e-7);
        assert_eq!(check.z_star.z, vec![50.0, 50.0]);
        assert!((check.y_star[0] - 25.0).abs() < 1e-7);
    }

    #[test]
    fn single_scenario_static_rule_is_extension() {
        let mut p = rt();
        p.uncertainty = crate::model::UncertaintySet::box_set(&[60.0, 60.0], &[60.0, 60.0]);
        let check = check_extension(&p, &[25.0], &DecisionRule::Static(vec![35.0])).unwrap();
        assert!(check.bound.abs() <= 1e-7);
    }

    #[test]
    fn refine_d0_on_constraintwise_instance() {
        let p = fixtures::constraintwise_example();
        let aro = solve_aro_vertices(&p).unwrap();
        let ip = interior_point(&p.uncertainty).unwrap();
        let x = refine_d0(&p, aro.opt, &ip.point).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn refine_d0_rejects_nonzero_recourse_cost() {
        let err = refine_d0(&rt(), 30.0, &Scenario::new(vec![55.0, 55.0])).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn uniqueness_certificate_rt_is_ambiguous() {
        let p = rt();
        let vertices = enumerate_vertices(&p.uncertainty).unwrap();
        let cert = certify_unique(&p, &vertices.vertices, Some(30.0)).unwrap();
        assert!(!cert.unique);
        assert!(cert.ranges[0] > 1.0);
    }

    #[test]
    fn uniqueness_certificate_on_unique_instance() {
        let p = fixtures::constraintwise_example();
        let vertices = enumerate_vertices(&p.uncertainty).unwrap();
        let aro = solve_aro_vertices(&p).unwrap();
        let cert = certify_unique(&p, &vertices.vertices, Some(aro.opt)).unwrap();
        assert!(cert.unique, "ranges {:?}", cert.ranges);
        assert!((cert.x[0] - 0.5).abs() < 1e-6);
        assert!(cert.paro_certified);
    }

    #[test]
    fn single_scenario_face_is_wide() {
        let p = rt();
        let cert = certify_unique(&p, &[Scenario::new(vec![55.0, 55.0])], None).unwrap();
        assert!(!cert.unique);
    }

    #[test]
    fn pro_step_on_rt() {
        let p = rt();
        let pro = pro_ldr(&p, &Scenario::new(vec![55.0, 55.0])).unwrap();
        assert!((pro.worst_case - 30.0).abs() < 1e-6);
        assert!(pro.x[0] >= 20.0 - 1e-7 && pro.x[0] <= 40.0 + 1e-7);
    }

    #[test]
    fn pro_step_is_idempotent_on_unique_instance() {
        let p = fixtures::hybrid_example();
        let ip = interior_point(&p.uncertainty).unwrap();
        let pro = pro_ldr_masked(&p, &ip.point, &RuleMask::columns(p.n_y, p.l, &[0])).unwrap();
        assert!((pro.x[0] - 0.5).abs() < 1e-6);
        let again = pro_ldr_masked(&p, &ip.point, &RuleMask::columns(p.n_y, p.l, &[0])).unwrap();
        assert!((again.nominal_value - pro.nominal_value).abs() < 1e-7);
    }

    #[test]
    fn dr_paro_branches() {
        let p = fixtures::constraintwise_example();
        let sol = dr_paro(&p).unwrap();
        assert_eq!(sol.branch, StructureBranch::Constraintwise);
        assert!((sol.x[0] - 0.5).abs() < 1e-6);
        assert!((sol.rule.w[0] - 1.0).abs() < 1e-6);
        assert!((sol.rule.w[1] - 1.5).abs() < 1e-6);

        let p = fixtures::simplex_example();
        let sol = dr_paro(&p).unwrap();
        assert_eq!(sol.branch, StructureBranch::Simplex);
        assert!((sol.x[0] - 0.5).abs() < 1e-6);

        let p = fixtures::block_example();
        let sol = dr_paro(&p).unwrap();
        assert_eq!(sol.branch, StructureBranch::Block);
        assert!((sol.x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn dr_paro_requires_applicable_structure() {
        // General pattern over a box: no structure, not a simplex.
        let mut p = fixtures::hybrid_example();
        // make every parameter occur in both constraints
        for c in 0..p.l {
            p.r_z[(0, c)] = -0.25;
            p.r_z[(1, c)] = 0.25;
        }
        let err = dr_paro(&p).unwrap_err();
        assert!(matches!(err, Error::NoApplicableStructure(_)));
    }

    #[test]
    fn improvement_finds_rt_gap() {
        let p = rt();
        let aro = solve_aro_vertices(&p).unwrap();
        let ledger = ValueLedger::from_vertices(&aro.vertices, aro.opt);
        let imp = improvement(&p, &[35.0], &ledger, &ImprovementOptions::default()).unwrap();
        assert!(imp.p <= -2.5 + 1e-6, "p = {}", imp.p);
        assert_eq!(imp.z_bar.z, vec![50.0, 50.0]);
        assert!(imp.x_bar[0] <= 30.0 + 1e-6);
        assert!(!imp.certified);
    }

    #[test]
    fn improvement_sees_no_gap_at_refined_solution() {
        let p = rt();
        let aro = solve_aro_vertices(&p).unwrap();
        let ledger = ValueLedger::from_vertices(&aro.vertices, aro.opt);
        for x in [20.0, 25.0, 30.0] {
            let imp = improvement(&p, &[x], &ledger, &ImprovementOptions::default()).unwrap();
            assert!(imp.p.abs() <= 1e-6, "x = {x}, p = {}", imp.p);
            assert!(imp.p <= 1e-9);
        }
    }

    #[test]
    fn improvement_methods_agree_on_rt() {
        let p = rt();
        let aro = solve_aro_vertices(&p).unwrap();
        let ledger = ValueLedger::from_vertices(&aro.vertices, aro.opt);
        let mut opts = ImprovementOptions::default();
        let mountain = improvement(&p, &[35.0], &ledger, &opts).unwrap();
        opts.method = ImprovementMethod::Bilinear;
        let bilinear = improvement(&p, &[35.0], &ledger, &opts).unwrap();
        assert!(mountain.converged && bilinear.converged);
        assert!((mountain.p - bilinear.p).abs() < 1e-6);
        let state = bilinear.bilinear.as_ref().unwrap();
        // dual feasibility: B^T lambda = d, lambda <= 0
        let bt_lambda = p.b.tr_matvec(&state.lambda);
        for (v, d) in bt_lambda.iter().zip(&p.d) {
            assert!((v - d).abs() < 1e-7);
        }
        assert!(state.lambda.iter().all(|&l| l <= 1e-9));
        // strong duality at the final state
        assert!((dot(&state.lambda, &state.inner_rhs) - state.inner_value).abs() < 1e-6);
    }

    #[test]
    fn algorithm1_recovers_refined_band_from_above() {
        let p = rt();
        for x0 in [32.0, 35.0, 40.0] {
            let mut opts = Algorithm1Options::default();
            opts.x0 = Some(vec![x0]);
            let result = algorithm1(&p, &opts).unwrap();
            assert!(result.converged);
            assert!(
                result.x[0] <= 30.0 + 1e-6,
                "from {x0}: x = {:?}",
                result.x
            );
            let wc =
                crate::robust::worst_case(&p, &result.x, &DecisionRule::OptimalRecourse).unwrap();
            assert!((wc.value - 30.0).abs() < 1e-6);
            assert!(!result.certified);
            // non-final iterations strictly improve, the final one does not
            for (idx, entry) in result.trace.iter().enumerate() {
                if idx + 1 < result.trace.len() {
                    assert!(entry.p < -opts.tol);
                } else {
                    assert!(entry.p >= -opts.tol);
                }
            }
        }
    }

    #[test]
    fn algorithm1_fixed_point_at_refined_solution() {
        let p = rt();
        let mut opts = Algorithm1Options::default();
        opts.x0 = Some(vec![25.0]);
        let result = algorithm1(&p, &opts).unwrap();
        assert_eq!(result.trace.len(), 1);
        assert!((result.x[0] - 25.0).abs() < 1e-9);
    }

    #[test]
    fn max_difference_on_rt_pair() {
        let p = rt();
        let md =
            max_difference_scenario(&p, &[35.0], &[25.0], &ImprovementOptions::default()).unwrap();
        assert!((md.gap - 2.5).abs() < 1e-6, "gap {}", md.gap);
        assert_eq!(md.scenario.z, vec![50.0, 50.0]);

        let same =
            max_difference_scenario(&p, &[25.0], &[25.0], &ImprovementOptions::default()).unwrap();
        assert!(same.gap.abs() < 1e-9);

        // the reverse direction is also nonnegative but generally different
        let rev =
            max_difference_scenario(&p, &[25.0], &[35.0], &ImprovementOptions::default()).unwrap();
        assert!(rev.gap >= -1e-9);
    }
}
