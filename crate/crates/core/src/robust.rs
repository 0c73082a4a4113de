//! Worst-case machinery: exact ARO solves by vertex enumeration, per-scenario
//! optimal recourse, worst-case evaluation of a fixed Stage-1 decision under a
//! decision rule, and static robust solves for restricted rule structures.
//!
//! Robust counterparts are enforced vertex-wise: every constraint is affine in
//! `z`, so holding at all vertices of the polytope is equivalent to holding on
//! the whole set.

use crate::error::{Error, Result};
use crate::fme::{reconstruct_recourse, EliminationResult, RecoursePolicy};
use crate::geometry::{enumerate_vertices, VertexList};
use crate::linalg::{dot, solve_square, Matrix};
use crate::lp::{solve_lp, solve_milp, LpProblem, LpStatus};
use crate::model::{Scenario, StructureReport, TwoStageProblem};
use serde::Serialize;

/// Linear decision rule `y(z) = w + W z`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearRule {
    pub w: Vec<f64>,
    pub w_mat: Matrix,
}

impl LinearRule {
    pub fn constant(w: Vec<f64>, l: usize) -> Self {
        let n_y = w.len();
        LinearRule {
            w,
            w_mat: Matrix::zeros(n_y, l),
        }
    }

    pub fn evaluate(&self, z: &[f64]) -> Vec<f64> {
        let mut y = self.w.clone();
        for (yi, v) in y.iter_mut().zip(self.w_mat.matvec(z)) {
            *yi += v;
        }
        y
    }

    /// Interpolate a rule through `L + 1` affinely independent support points
    /// with prescribed values, one coordinate at a time.
    pub fn fit(points: &[Scenario], values: &[Vec<f64>]) -> Result<LinearRule> {
        let n = points.len();
        if n == 0 || values.len() != n {
            return Err(Error::Precondition("fit needs matching point/value lists".into()));
        }
        let l = points[0].dim();
        if n != l + 1 {
            return Err(Error::Precondition(format!(
                "fit needs L + 1 = {} points, got {n}",
                l + 1
            )));
        }
        let n_y = values[0].len();
        // rows [1, z^j] (a0, a) = y_k(z^j)
        let a = Matrix::from_fn(n, n, |i, j| if j == 0 { 1.0 } else { points[i].z[j - 1] });
        let mut w = vec![0.0; n_y];
        let mut w_mat = Matrix::zeros(n_y, l);
        for k in 0..n_y {
            let rhs: Vec<f64> = values.iter().map(|v| v[k]).collect();
            let coefs = solve_square(&a, &rhs, 1e-9).ok_or_else(|| {
                Error::Precondition("fit points are affinely dependent".into())
            })?;
            w[k] = coefs[0];
            for j in 0..l {
                w_mat[(k, j)] = coefs[j + 1];
            }
        }
        Ok(LinearRule { w, w_mat })
    }
}

/// Evaluable Stage-2 policy.
#[derive(Clone, Debug)]
pub enum DecisionRule {
    Static(Vec<f64>),
    Linear(LinearRule),
    BackSubstitution {
        elimination: EliminationResult,
        policy: RecoursePolicy,
    },
    OptimalRecourse,
}

impl DecisionRule {
    /// Stage-2 vector for `(x, z)`.
    pub fn evaluate(
        &self,
        problem: &TwoStageProblem,
        x: &[f64],
        z: &Scenario,
    ) -> Result<Vec<f64>> {
        match self {
            DecisionRule::Static(y) => Ok(y.clone()),
            DecisionRule::Linear(rule) => Ok(rule.evaluate(&z.z)),
            DecisionRule::BackSubstitution {
                elimination,
                policy,
            } => reconstruct_recourse(problem, elimination, x, z, *policy),
            DecisionRule::OptimalRecourse => {
                Ok(optimal_recourse(problem, x, z)?.y)
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, DecisionRule::Static(_) | DecisionRule::Linear(_))
    }
}

#[derive(Clone, Debug)]
pub struct AroSolveResult {
    pub x: Vec<f64>,
    pub per_vertex_y: Vec<Vec<f64>>,
    pub opt: f64,
    pub status: LpStatus,
    pub vertices: VertexList,
}

fn vertex_rows_needed(problem: &TwoStageProblem, i: usize) -> bool {
    // Rows without z or Stage-2 dependence hold once, not per vertex.
    let z_dep = problem.a_z.iter().any(|al| {
        (0..problem.n_x).any(|j| al[(i, j)].abs() > 1e-12)
    }) || (0..problem.l).any(|l| problem.r_z[(i, l)].abs() > 1e-12);
    let y_dep = (0..problem.n_y).any(|k| problem.b[(i, k)].abs() > 1e-12);
    z_dep || y_dep
}

fn solve_for_problem(problem: &TwoStageProblem, lp: &LpProblem) -> Result<crate::lp::LpSolution> {
    if problem.has_binaries() {
        solve_milp(lp)
    } else {
        solve_lp(lp)
    }
}

/// Exact ARO solve over the vertex expansion: one recourse copy per vertex
/// plus an epigraph variable. Binary Stage-1 variables go through
/// branch-and-bound.
pub fn solve_aro_vertices(problem: &TwoStageProblem) -> Result<AroSolveResult> {
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let n = vertices.len();
    let (n_x, n_y) = (problem.n_x, problem.n_y);
    // columns: x | y^1 .. y^N | t
    let t_col = n_x + n * n_y;
    let mut lp = LpProblem::new(t_col + 1);
    lp.objective[t_col] = 1.0;
    for (j, &is_bin) in problem.integrality.iter().enumerate() {
        if is_bin {
            lp.set_binary(j);
        }
    }
    let static_rows: Vec<usize> = (0..problem.m)
        .filter(|&i| !vertex_rows_needed(problem, i))
        .collect();
    for &i in &static_rows {
        let mut entries: Vec<(usize, f64)> = (0..n_x)
            .map(|j| (j, problem.a0[(i, j)]))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        entries.shrink_to_fit();
        lp.add_sparse_row(&entries, problem.r0[i]);
    }
    for (v_idx, v) in vertices.iter().enumerate() {
        let y_base = n_x + v_idx * n_y;
        let r = problem.r_at(&v.z);
        for i in 0..problem.m {
            if static_rows.binary_search(&i).is_ok() {
                continue;
            }
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
        // epigraph: c(z^i)^T x + d^T y^i <= t
        let c = problem.c_at(&v.z);
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
        entries.push((t_col, -1.0));
        lp.add_sparse_row(&entries, 0.0);
    }
    lp.compact_singleton_rows();
    let sol = solve_for_problem(problem, &lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Infeasible),
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(sol.nodes_explored)),
    }
    let x = sol.x[..n_x].to_vec();
    let per_vertex_y: Vec<Vec<f64>> = (0..n)
        .map(|v_idx| sol.x[n_x + v_idx * n_y..n_x + (v_idx + 1) * n_y].to_vec())
        .collect();
    Ok(AroSolveResult {
        x,
        per_vertex_y,
        opt: sol.objective,
        status: LpStatus::Optimal,
        vertices,
    })
}

#[derive(Clone, Debug)]
pub struct RecourseSolution {
    pub y: Vec<f64>,
    pub objective: f64,
    pub basis: Vec<usize>,
    pub dual: Vec<f64>,
}

/// Best Stage-2 decision at fixed `(x, z)`: minimize `d^T y` subject to
/// `B y <= r(z) - A(z) x`. Reports the full objective `c(z)^T x + d^T y`.
pub fn optimal_recourse(
    problem: &TwoStageProblem,
    x: &[f64],
    z: &Scenario,
) -> Result<RecourseSolution> {
    let mut lp = LpProblem::new(problem.n_y);
    lp.objective = problem.d.clone();
    let r = problem.r_at(&z.z);
    for i in 0..problem.m {
        let a = problem.a_row_at(i, &z.z);
        let row: Vec<f64> = (0..problem.n_y).map(|k| problem.b[(i, k)]).collect();
        lp.add_row(row, r[i] - dot(&a, x));
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::NotAdaptiveFeasible {
                scenario: z.z.clone(),
            })
        }
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(0)),
    }
    let objective = dot(&problem.c_at(&z.z), x) + sol.objective;
    Ok(RecourseSolution {
        y: sol.x,
        objective,
        basis: sol.basis,
        dual: sol.dual,
    })
}

#[derive(Clone, Debug)]
pub struct WorstCase {
    pub value: f64,
    pub vertex_index: usize,
    pub scenario: Scenario,
}

/// Worst realized objective of `(x, rule)` over the vertex set. For the
/// optimal-recourse rule the value function must be convex in `z`, which
/// holds under right-hand-side uncertainty only; other variants are affine
/// in `z` and need no restriction. Ties break to the lowest vertex index.
pub fn worst_case(
    problem: &TwoStageProblem,
    x: &[f64],
    rule: &DecisionRule,
) -> Result<WorstCase> {
    if matches!(rule, DecisionRule::OptimalRecourse) && !problem.is_rhs_uncertainty_only() {
        return Err(Error::Precondition(
            "optimal-recourse worst case requires right-hand-side uncertainty only".into(),
        ));
    }
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let mut best: Option<WorstCase> = None;
    for (idx, v) in vertices.iter().enumerate() {
        let y = rule.evaluate(problem, x, v)?;
        let eval = crate::model::evaluate(problem, x, &y, v)?;
        if !matches!(rule, DecisionRule::OptimalRecourse) && !eval.feasible(1e-6) {
            return Err(Error::RuleInfeasible {
                vertex: idx,
                slack: eval.min_slack(),
            });
        }
        if best.as_ref().is_none_or(|b| eval.objective > b.value + 1e-12) {
            best = Some(WorstCase {
                value: eval.objective,
                vertex_index: idx,
                scenario: v.clone(),
            });
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Boolean mask of allowed `W` entries for a structure-restricted LDR.
#[derive(Clone, Debug)]
pub struct RuleMask {
    pub allow: Vec<bool>,
    pub n_y: usize,
    pub l: usize,
}

impl RuleMask {
    pub fn full(n_y: usize, l: usize) -> Self {
        RuleMask {
            allow: vec![true; n_y * l],
            n_y,
            l,
        }
    }

    pub fn static_rule(n_y: usize, l: usize) -> Self {
        RuleMask {
            allow: vec![false; n_y * l],
            n_y,
            l,
        }
    }

    /// Allow dependence on the given parameter columns for every variable.
    pub fn columns(n_y: usize, l: usize, cols: &[usize]) -> Self {
        let mut mask = RuleMask::static_rule(n_y, l);
        for k in 0..n_y {
            for &c in cols {
                mask.allow[k * l + c] = true;
            }
        }
        mask
    }

    /// Block-diagonal mask: each Stage-2 variable may depend on the
    /// parameters of its own block.
    pub fn blocks(report: &StructureReport, n_y: usize, l: usize) -> Self {
        let mut mask = RuleMask::static_rule(n_y, l);
        for block in &report.blocks {
            for &k in &block.stage2 {
                for &c in &block.params {
                    mask.allow[k * l + c] = true;
                }
            }
        }
        mask
    }

    pub fn allows(&self, k: usize, c: usize) -> bool {
        self.allow[k * self.l + c]
    }

    pub fn n_free(&self) -> usize {
        self.allow.iter().filter(|&&a| a).count()
    }
}

#[derive(Clone, Debug)]
pub struct StaticLdrSolution {
    pub x: Vec<f64>,
    pub rule: LinearRule,
    pub worst_case: f64,
}

/// Substitute `y(z) = w + W z` (entries of `W` restricted by the mask),
/// enforce every constraint at every vertex, and minimize the worst-case
/// epigraph value. Infeasibility means the imposed structure is too
/// restrictive for this instance.
pub fn solve_static_ldr(
    problem: &TwoStageProblem,
    mask: &RuleMask,
) -> Result<StaticLdrSolution> {
    let vertices = enumerate_vertices(&problem.uncertainty)?;
    let (n_x, n_y, l) = (problem.n_x, problem.n_y, problem.l);
    // columns: x | w | free W entries | t
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
    let t_col = next;
    let mut lp = LpProblem::new(t_col + 1);
    lp.objective[t_col] = 1.0;
    for (j, &is_bin) in problem.integrality.iter().enumerate() {
        if is_bin {
            lp.set_binary(j);
        }
    }
    // y_k(z) columns at scenario z: w_k + sum_c W_kc z_c
    let y_entries = |k: usize, z: &[f64], scale: f64, entries: &mut Vec<(usize, f64)>| {
        entries.push((w_base + k, scale));
        for (c, &zc) in z.iter().enumerate() {
            let col = w_cols[k * l + c];
            if col != usize::MAX && zc != 0.0 {
                entries.push((col, scale * zc));
            }
        }
    };
    for v in vertices.iter() {
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
        entries.push((t_col, -1.0));
        lp.add_sparse_row(&entries, 0.0);
    }
    lp.compact_singleton_rows();
    let sol = solve_for_problem(problem, &lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::StructureInfeasible),
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(sol.nodes_explored)),
    }
    let x = sol.x[..n_x].to_vec();
    let w = sol.x[w_base..w_base + n_y].to_vec();
    let mut w_mat = Matrix::zeros(n_y, l);
    for k in 0..n_y {
        for c in 0..l {
            let col = w_cols[k * l + c];
            if col != usize::MAX {
                w_mat[(k, c)] = sol.x[col];
            }
        }
    }
    Ok(StaticLdrSolution {
        x,
        rule: LinearRule { w, w_mat },
        worst_case: sol.objective,
    })
}
