//! Fourier-Motzkin elimination of Stage-2 variables with provenance
//! bookkeeping, LP-based redundancy filtering, and back-substitution
//! recourse reconstruction.
//!
//! Every working row is a nonnegative combination of original constraints;
//! the combination weights are carried along, so each eliminated variable's
//! bounds can be expressed over the original data: a lower/upper bound on
//! `y_k` reads `sum_p alpha_p phi_p(x, z) - sum_l beta_l y_l` with
//! `phi_p(x, z) = r_p(z) - a_p(z)^T x` and `l` ranging over variables
//! eliminated after `k`. Alphas are negative on lower bounds and positive
//! on upper bounds.

use crate::error::{Error, Result};
use crate::geometry::enumerate_vertices;
use crate::linalg::{dot, Matrix};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::model::{Scenario, TwoStageProblem};
use serde::Serialize;

const ZERO_TOL: f64 = 1e-12;
const ROW_GUARD: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// One bound on an eliminated variable, expressed over original constraint
/// indices (`alpha`) and later-eliminated variables (`beta`).
#[derive(Clone, Debug, Serialize)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub alpha: Vec<(usize, f64)>,
    pub beta: Vec<(usize, f64)>,
}

impl BoundRecord {
    /// Bound value at `(x, z)` given already-assigned later variables.
    pub fn evaluate(&self, problem: &TwoStageProblem, x: &[f64], z: &[f64], y: &[f64]) -> f64 {
        let r = problem.r_at(z);
        let mut value = 0.0;
        for &(p, a) in &self.alpha {
            let phi = r[p] - dot(&problem.a_row_at(p, z), x);
            value += a * phi;
        }
        for &(l, b) in &self.beta {
            value -= b * y[l];
        }
        value
    }
}

/// Bounds recorded for one eliminated variable at its elimination step.
#[derive(Clone, Debug, Serialize)]
pub struct VariableLedger {
    pub variable: usize,
    pub lower: Vec<BoundRecord>,
    pub upper: Vec<BoundRecord>,
}

/// Working inequality: `(B^T w) . y <= sum_p w_p phi_p(x, z)`, stored via
/// its Stage-2 coefficients and the nonnegative combination weights `w`.
#[derive(Clone, Debug, Serialize)]
pub struct WorkRow {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl WorkRow {
    fn normalize(&mut self) {
        let scale = self
            .y
            .iter()
            .chain(self.w.iter())
            .fold(0.0f64, |a, v| a.max(v.abs()));
        if scale > 0.0 {
            for v in self.y.iter_mut().chain(self.w.iter_mut()) {
                *v /= scale;
            }
        }
        for v in &mut self.y {
            if v.abs() < ZERO_TOL {
                *v = 0.0;
            }
        }
        for v in &mut self.w {
            if *v < ZERO_TOL {
                *v = 0.0; // weights are conic; clear fp dust
            }
        }
    }

    fn is_static(&self) -> bool {
        self.y.iter().all(|v| v.abs() <= ZERO_TOL)
    }
}

/// Residual constraints `G(z) x <= f(z)` with explicit affine data.
#[derive(Clone, Debug, Serialize)]
pub struct AffineSystem {
    pub g0: Matrix,
    pub g_z: Vec<Matrix>,
    pub f0: Vec<f64>,
    pub f_z: Matrix,
}

impl AffineSystem {
    pub fn n_rows(&self) -> usize {
        self.f0.len()
    }

    /// Slack vector `f(z) - G(z) x`.
    pub fn slacks(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        (0..self.n_rows())
            .map(|i| {
                let mut g = self.g0.row(i).to_vec();
                for (l, gl) in self.g_z.iter().enumerate() {
                    let zl = z[l];
                    if zl != 0.0 {
                        for (gj, &a) in g.iter_mut().zip(gl.row(i)) {
                            *gj += zl * a;
                        }
                    }
                }
                self.f0[i] + dot(self.f_z.row(i), z) - dot(&g, x)
            })
            .collect()
    }

    pub fn min_slack(&self, x: &[f64], z: &[f64]) -> f64 {
        self.slacks(x, z)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationResult {
    pub eliminated_order: Vec<usize>,
    pub ledger: Vec<VariableLedger>,
    pub rows: Vec<WorkRow>,
    pub static_system: AffineSystem,
    pub rows_before: usize,
    pub rows_after: usize,
}

impl EliminationResult {
    pub fn fully_eliminated(&self, n_y: usize) -> bool {
        self.eliminated_order.len() == n_y
    }

    pub fn ledger_for(&self, variable: usize) -> Option<&VariableLedger> {
        self.ledger.iter().find(|v| v.variable == variable)
    }
}

fn static_system_from_rows(problem: &TwoStageProblem, rows: &[WorkRow]) -> AffineSystem {
    let static_rows: Vec<&WorkRow> = rows.iter().filter(|r| r.is_static()).collect();
    let n = static_rows.len();
    let mut g0 = Matrix::zeros(n, problem.n_x);
    let mut g_z: Vec<Matrix> = (0..problem.l)
        .map(|_| Matrix::zeros(n, problem.n_x))
        .collect();
    let mut f0 = vec![0.0; n];
    let mut f_z = Matrix::zeros(n, problem.l);
    for (i, row) in static_rows.iter().enumerate() {
        for (p, &wp) in row.w.iter().enumerate() {
            if wp == 0.0 {
                continue;
            }
            for j in 0..problem.n_x {
                g0[(i, j)] += wp * problem.a0[(p, j)];
            }
            for (l, al) in problem.a_z.iter().enumerate() {
                for j in 0..problem.n_x {
                    g_z[l][(i, j)] += wp * al[(p, j)];
                }
            }
            f0[i] += wp * problem.r0[p];
            for l in 0..problem.l {
                f_z[(i, l)] += wp * problem.r_z[(p, l)];
            }
        }
    }
    AffineSystem { g0, g_z, f0, f_z }
}

fn bound_record(row: &WorkRow, pivot: usize) -> BoundRecord {
    let gamma = row.y[pivot];
    let kind = if gamma > 0.0 {
        BoundKind::Upper
    } else {
        BoundKind::Lower
    };
    let alpha = row
        .w
        .iter()
        .enumerate()
        .filter(|(_, &wp)| wp > ZERO_TOL)
        .map(|(p, &wp)| (p, wp / gamma))
        .collect();
    let beta = row
        .y
        .iter()
        .enumerate()
        .filter(|&(l, &v)| l != pivot && v.abs() > ZERO_TOL)
        .map(|(l, &v)| (l, v / gamma))
        .collect();
    BoundRecord { kind, alpha, beta }
}

/// Eliminate `count` Stage-2 variables in the given order (defaults to index
/// order). Records both bounds of every eliminated variable and the residual
/// system.
pub fn eliminate(
    problem: &TwoStageProblem,
    count: usize,
    order: Option<Vec<usize>>,
) -> Result<EliminationResult> {
    let n_y = problem.n_y;
    let order = order.unwrap_or_else(|| (0..n_y).collect());
    if count > n_y || count > order.len() {
        return Err(Error::Precondition(format!(
            "cannot eliminate {count} of {n_y} Stage-2 variables"
        )));
    }
    {
        let mut seen = vec![false; n_y];
        for &k in &order {
            if k >= n_y || seen[k] {
                return Err(Error::Precondition(format!(
                    "elimination order must be a permutation prefix; bad index {k}"
                )));
            }
            seen[k] = true;
        }
    }

    let mut rows: Vec<WorkRow> = (0..problem.m)
        .map(|p| {
            let mut w = vec![0.0; problem.m];
            w[p] = 1.0;
            WorkRow {
                y: (0..n_y).map(|k| problem.b[(p, k)]).collect(),
                w,
            }
        })
        .collect();
    let rows_before = rows.len();
    let mut ledger = Vec::with_capacity(count);

    for &k in order.iter().take(count) {
        let mut lower_rows = Vec::new();
        let mut upper_rows = Vec::new();
        let mut neutral = Vec::new();
        for row in rows {
            if row.y[k] > ZERO_TOL {
                upper_rows.push(row);
            } else if row.y[k] < -ZERO_TOL {
                lower_rows.push(row);
            } else {
                neutral.push(row);
            }
        }
        ledger.push(VariableLedger {
            variable: k,
            lower: lower_rows.iter().map(|r| bound_record(r, k)).collect(),
            upper: upper_rows.iter().map(|r| bound_record(r, k)).collect(),
        });

        let produced = lower_rows.len() * upper_rows.len();
        if neutral.len() + produced > ROW_GUARD {
            return Err(Error::BlowupGuard {
                rows: neutral.len() + produced,
                variable: k,
            });
        }
        let mut next = neutral;
        for up in &upper_rows {
            let gu = up.y[k];
            for lo in &lower_rows {
                let gl = lo.y[k];
                let mut combined = WorkRow {
                    y: up
                        .y
                        .iter()
                        .zip(&lo.y)
                        .map(|(u, l)| u / gu - l / gl)
                        .collect(),
                    w: up
                        .w
                        .iter()
                        .zip(&lo.w)
                        .map(|(u, l)| u / gu - l / gl)
                        .collect(),
                };
                combined.y[k] = 0.0;
                combined.normalize();
                next.push(combined);
            }
        }
        rows = next;
    }

    let static_system = static_system_from_rows(problem, &rows);
    let rows_after = rows.len();
    Ok(EliminationResult {
        eliminated_order: order.into_iter().take(count).collect(),
        ledger,
        rows,
        static_system,
        rows_before,
        rows_after,
    })
}

// ---------------------------------------------------------------------------
// Redundancy filtering
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterLevel {
    None,
    Syntactic,
    Lp,
}

impl std::str::FromStr for FilterLevel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(FilterLevel::None),
            "syntactic" => Ok(FilterLevel::Syntactic),
            "lp" => Ok(FilterLevel::Lp),
            other => Err(format!("unknown filter level `{other}`")),
        }
    }
}

struct InducedRow {
    y: Vec<f64>,
    g0: Vec<f64>,
    g_z: Vec<Vec<f64>>,
    f0: f64,
    f_z: Vec<f64>,
}

fn induce(problem: &TwoStageProblem, row: &WorkRow) -> InducedRow {
    let mut g0 = vec![0.0; problem.n_x];
    let mut g_z = vec![vec![0.0; problem.n_x]; problem.l];
    let mut f0 = 0.0;
    let mut f_z = vec![0.0; problem.l];
    for (p, &wp) in row.w.iter().enumerate() {
        if wp == 0.0 {
            continue;
        }
        for j in 0..problem.n_x {
            g0[j] += wp * problem.a0[(p, j)];
        }
        for l in 0..problem.l {
            for j in 0..problem.n_x {
                g_z[l][j] += wp * problem.a_z[l][(p, j)];
            }
            f_z[l] += wp * problem.r_z[(p, l)];
        }
        f0 += wp * problem.r0[p];
    }
    InducedRow {
        y: row.y.clone(),
        g0,
        g_z,
        f0,
        f_z,
    }
}

fn lhs_scale(r: &InducedRow) -> f64 {
    r.y.iter()
        .chain(r.g0.iter())
        .chain(r.g_z.iter().flatten())
        .chain(r.f_z.iter())
        .fold(0.0f64, |a, v| a.max(v.abs()))
}

fn quantize(values: impl Iterator<Item = f64>) -> Vec<i64> {
    values.map(|v| (v / 1e-9).round() as i64).collect()
}

/// Remove redundant rows. `syntactic` drops vacuous constant rows, exact
/// duplicates, and coefficient-wise dominated rows; `lp` additionally drops
/// any row implied by the remaining system over the uncertainty set (exact,
/// one LP per row and vertex). The feasible Stage-1 set is unchanged.
pub fn filter_redundant(
    problem: &TwoStageProblem,
    result: &EliminationResult,
    level: FilterLevel,
    x_box: Option<Vec<(f64, f64)>>,
) -> Result<EliminationResult> {
    if level == FilterLevel::None {
        return Ok(result.clone());
    }
    let induced: Vec<InducedRow> = result.rows.iter().map(|r| induce(problem, r)).collect();
    let mut keep = vec![true; result.rows.len()];

    // Syntactic pass: constant rows, duplicates, dominated rows.
    let mut best_by_key: std::collections::BTreeMap<Vec<i64>, usize> =
        std::collections::BTreeMap::new();
    for (i, r) in induced.iter().enumerate() {
        let scale = lhs_scale(r);
        if scale <= ZERO_TOL {
            let constant_rhs = r.f_z.iter().all(|v| v.abs() <= ZERO_TOL);
            if constant_rhs && r.f0 >= -1e-9 {
                keep[i] = false; // vacuous `0 <= c` row
            }
            continue;
        }
        let key = quantize(
            r.y.iter()
                .chain(r.g0.iter())
                .chain(r.g_z.iter().flatten())
                .chain(r.f_z.iter())
                .map(|v| v / scale),
        );
        let scaled_rhs = r.f0 / scale;
        match best_by_key.get(&key) {
            Some(&j) => {
                let other_scale = lhs_scale(&induced[j]);
                if scaled_rhs < induced[j].f0 / other_scale - 1e-12 {
                    keep[j] = false;
                    best_by_key.insert(key, i);
                } else {
                    keep[i] = false;
                }
            }
            None => {
                best_by_key.insert(key, i);
            }
        }
    }

    if level == FilterLevel::Lp {
        if result.rows.iter().any(|r| !r.is_static()) {
            return Err(Error::Precondition(
                "lp-level filtering requires a fully eliminated system".into(),
            ));
        }
        let vertices = enumerate_vertices(&problem.uncertainty)?;
        let box_bounds = match x_box {
            Some(b) => b,
            None => derive_box(problem, &induced, &keep)?,
        };
        let candidates: Vec<usize> = (0..induced.len()).filter(|&i| keep[i]).collect();
        for &i in &candidates {
            let survivors: Vec<usize> = (0..induced.len())
                .filter(|&j| keep[j] && j != i)
                .collect();
            let mut max_violation = f64::NEG_INFINITY;
            for v in vertices.iter() {
                let mut lp = LpProblem::new(problem.n_x);
                for (j, &(lo, hi)) in box_bounds.iter().enumerate() {
                    lp.set_bounds(j, lo, hi);
                }
                for &j in &survivors {
                    for w in vertices.iter() {
                        lp.add_row(g_at(&induced[j], &w.z), f_at(&induced[j], &w.z));
                    }
                }
                // maximize g_i(v) x - f_i(v)
                lp.objective = g_at(&induced[i], &v.z).iter().map(|c| -c).collect();
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => {
                        max_violation = max_violation.max(-sol.objective - f_at(&induced[i], &v.z));
                    }
                    LpStatus::Unbounded => {
                        max_violation = f64::INFINITY;
                    }
                    LpStatus::Infeasible => {
                        // remaining system empty over the box: every row is
                        // vacuously implied; leave as-is
                        max_violation = max_violation.max(f64::NEG_INFINITY);
                    }
                    LpStatus::IterationLimit => return Err(Error::IterationLimit(0)),
                }
            }
            if max_violation <= 1e-9 {
                keep[i] = false;
            }
        }
    }

    let rows: Vec<WorkRow> = result
        .rows
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(r, _)| r.clone())
        .collect();
    let static_system = static_system_from_rows(problem, &rows);
    let rows_after = rows.len();
    Ok(EliminationResult {
        eliminated_order: result.eliminated_order.clone(),
        ledger: result.ledger.clone(),
        rows,
        static_system,
        rows_before: result.rows_before,
        rows_after,
    })
}

fn g_at(r: &InducedRow, z: &[f64]) -> Vec<f64> {
    let mut g = r.g0.clone();
    for (l, gl) in r.g_z.iter().enumerate() {
        if z[l] != 0.0 {
            for (gj, &a) in g.iter_mut().zip(gl) {
                *gj += z[l] * a;
            }
        }
    }
    g
}

fn f_at(r: &InducedRow, z: &[f64]) -> f64 {
    r.f0 + dot(&r.f_z, z)
}

fn derive_box(
    problem: &TwoStageProblem,
    induced: &[InducedRow],
    keep: &[bool],
) -> Result<Vec<(f64, f64)>> {
    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); problem.n_x];
    for (r, _) in induced.iter().zip(keep).filter(|(_, &k)| k) {
        if !r.y.iter().all(|v| v.abs() <= ZERO_TOL) {
            continue;
        }
        let nz: Vec<usize> = (0..problem.n_x)
            .filter(|&j| r.g0[j].abs() > ZERO_TOL)
            .collect();
        let z_free = r.g_z.iter().flatten().all(|v| v.abs() <= ZERO_TOL)
            && r.f_z.iter().all(|v| v.abs() <= ZERO_TOL);
        if nz.len() == 1 && z_free {
            let j = nz[0];
            let g = r.g0[j];
            let b = r.f0 / g;
            if g > 0.0 {
                bounds[j].1 = bounds[j].1.min(b);
            } else {
                bounds[j].0 = bounds[j].0.max(b);
            }
        }
    }
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Precondition(format!(
                "no bounding box for Stage-1 variable {j}: supply one explicitly"
            )));
        }
    }
    Ok(bounds)
}

// ---------------------------------------------------------------------------
// Back-substitution recourse
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoursePolicy {
    Lower,
    Upper,
    Midpoint,
    /// Upper bound when the variable's objective coefficient is negative,
    /// lower when positive, midpoint at zero. Exact when a variable's choice
    /// does not tighten later intervals adversely; heuristic otherwise.
    ObjectiveGreedy,
}

impl std::str::FromStr for RecoursePolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lower" => Ok(RecoursePolicy::Lower),
            "upper" => Ok(RecoursePolicy::Upper),
            "midpoint" => Ok(RecoursePolicy::Midpoint),
            "objective-greedy" => Ok(RecoursePolicy::ObjectiveGreedy),
            other => Err(format!("unknown recourse policy `{other}`")),
        }
    }
}

/// Interval of one variable during back-substitution.
fn interval(
    ledger: &VariableLedger,
    problem: &TwoStageProblem,
    x: &[f64],
    z: &[f64],
    y: &[f64],
) -> (f64, f64) {
    let lb = ledger
        .lower
        .iter()
        .map(|r| r.evaluate(problem, x, z, y))
        .fold(f64::NEG_INFINITY, f64::max);
    let ub = ledger
        .upper
        .iter()
        .map(|r| r.evaluate(problem, x, z, y))
        .fold(f64::INFINITY, f64::min);
    (lb, ub)
}

fn pick(lb: f64, ub: f64, policy: RecoursePolicy, d_k: f64) -> f64 {
    let policy = match policy {
        RecoursePolicy::ObjectiveGreedy => {
            if d_k < -ZERO_TOL {
                RecoursePolicy::Upper
            } else if d_k > ZERO_TOL {
                RecoursePolicy::Lower
            } else {
                RecoursePolicy::Midpoint
            }
        }
        other => other,
    };
    match policy {
        RecoursePolicy::Lower => {
            if lb.is_finite() {
                lb.min(ub)
            } else if ub.is_finite() {
                ub
            } else {
                0.0
            }
        }
        RecoursePolicy::Upper => {
            if ub.is_finite() {
                ub.max(lb)
            } else if lb.is_finite() {
                lb
            } else {
                0.0
            }
        }
        RecoursePolicy::Midpoint | RecoursePolicy::ObjectiveGreedy => {
            if lb.is_finite() && ub.is_finite() {
                0.5 * (lb + ub)
            } else if lb.is_finite() {
                lb
            } else if ub.is_finite() {
                ub
            } else {
                0.0
            }
        }
    }
}

/// Rebuild a full recourse vector at `(x, z)` by walking the ledger in
/// reverse elimination order. Requires full elimination and `x` feasible for
/// the residual system at `z`.
pub fn reconstruct_recourse(
    problem: &TwoStageProblem,
    result: &EliminationResult,
    x: &[f64],
    z: &Scenario,
    policy: RecoursePolicy,
) -> Result<Vec<f64>> {
    if !result.fully_eliminated(problem.n_y) {
        return Err(Error::Precondition(
            "recourse reconstruction requires all Stage-2 variables eliminated".into(),
        ));
    }
    let slacks = result.static_system.slacks(x, &z.z);
    for (row, &s) in slacks.iter().enumerate() {
        if s < -1e-7 {
            return Err(Error::StaticSystemViolated {
                row,
                violation: -s,
            });
        }
    }
    let mut y = vec![0.0; problem.n_y];
    for ledger in result.ledger.iter().rev() {
        let k = ledger.variable;
        let (lb, ub) = interval(ledger, problem, x, &z.z, &y);
        if lb > ub + 1e-6 {
            return Err(Error::EmptyInterval {
                variable: k,
                gap: lb - ub,
            });
        }
        y[k] = pick(lb, ub, policy, problem.d[k]);
    }
    Ok(y)
}
