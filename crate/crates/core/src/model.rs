//! Canonical data model for two-stage adaptive robust problems.
//!
//! A problem instance carries objective `c(z)^T x + d^T y`, constraints
//! `A(z) x + B y <= r(z)` with fixed recourse matrix `B`, a polyhedral
//! uncertainty set `{z : H z <= h}`, and an integrality mask for Stage-1
//! variables. All affine dependence on `z` is stored explicitly.

use crate::error::{Error, Result};
use crate::linalg::{dot, linf_distance, Matrix};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Occurrence threshold for structure detection: exact-zero sparsity is the
/// intended signal, so anything above noise counts as "occurs".
pub const OCCURRENCE_TOL: f64 = 1e-12;

/// A single uncertainty realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scenario {
    pub z: Vec<f64>,
}

impl Scenario {
    pub fn new(z: Vec<f64>) -> Self {
        Scenario { z }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

impl From<Vec<f64>> for Scenario {
    fn from(z: Vec<f64>) -> Self {
        Scenario { z }
    }
}

/// Polytope `{z : H z <= h}` with an optional cached vertex list and an
/// optional nominal scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UncertaintySet {
    #[serde(rename = "H")]
    pub h_mat: Matrix,
    #[serde(rename = "h")]
    pub h_vec: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Scenario>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<Scenario>,
}

impl UncertaintySet {
    pub fn new(h_mat: Matrix, h_vec: Vec<f64>) -> Self {
        UncertaintySet {
            h_mat,
            h_vec,
            vertices: None,
            nominal: None,
        }
    }

    /// Axis-aligned box `lower <= z <= upper`.
    pub fn box_set(lower: &[f64], upper: &[f64]) -> Self {
        let l = lower.len();
        assert_eq!(l, upper.len());
        let mut rows = Vec::with_capacity(2 * l);
        let mut rhs = Vec::with_capacity(2 * l);
        for j in 0..l {
            let mut up = vec![0.0; l];
            up[j] = 1.0;
            rows.push(up);
            rhs.push(upper[j]);
            let mut lo = vec![0.0; l];
            lo[j] = -1.0;
            rows.push(lo);
            rhs.push(-lower[j]);
        }
        UncertaintySet::new(Matrix::from_rows(rows), rhs)
    }

    pub fn dim(&self) -> usize {
        self.h_mat.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.h_mat.nrows()
    }

    /// Slack vector `h - H z`.
    pub fn slacks(&self, z: &[f64]) -> Vec<f64> {
        let hz = self.h_mat.matvec(z);
        self.h_vec.iter().zip(hz).map(|(h, v)| h - v).collect()
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.slacks(z).iter().all(|&s| s >= -tol)
    }

    /// Max of `dir . z` over the set; `Err(UnboundedSet)` on a recession
    /// direction, `Err(EmptySet)` when infeasible.
    pub fn support(&self, dir: &[f64]) -> Result<f64> {
        let l = self.dim();
        let mut lp = LpProblem::new(l);
        lp.objective = dir.iter().map(|c| -c).collect();
        for (i, row) in self.h_mat.iter_rows().enumerate() {
            lp.add_row(row.to_vec(), self.h_vec[i]);
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Optimal => Ok(-sol.objective),
            LpStatus::Infeasible => Err(Error::EmptySet),
            LpStatus::Unbounded => Err(Error::UnboundedSet { coordinate: 0 }),
            LpStatus::IterationLimit => Err(Error::IterationLimit(0)),
        }
    }
}

/// Two-stage problem data. Objective coefficients and constraints depend
/// affinely on `z`: `c(z) = c0 + C z`, `A(z) = A0 + sum_l z_l A_l`,
/// `r(z) = r0 + R z`. The recourse matrix `B` is fixed.
#[derive(Clone, Debug, Serialize)]
pub struct TwoStageProblem {
    pub n_x: usize,
    pub n_y: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub c0: Vec<f64>,
    #[serde(rename = "C")]
    pub c_z: Matrix,
    pub d: Vec<f64>,
    #[serde(rename = "A0")]
    pub a0: Matrix,
    #[serde(rename = "A")]
    pub a_z: Vec<Matrix>,
    #[serde(rename = "B")]
    pub b: Matrix,
    pub r0: Vec<f64>,
    #[serde(rename = "R")]
    pub r_z: Matrix,
    pub integrality: Vec<bool>,
    pub uncertainty: UncertaintySet,
}

#[derive(Deserialize)]
struct RawProblem {
    n_x: usize,
    n_y: usize,
    m: usize,
    #[serde(rename = "L")]
    l: usize,
    c0: Vec<f64>,
    #[serde(rename = "C")]
    c_z: Matrix,
    d: Vec<f64>,
    #[serde(rename = "A0")]
    a0: Matrix,
    #[serde(rename = "A")]
    a_z: Option<Vec<Matrix>>,
    #[serde(rename = "B")]
    b: Matrix,
    r0: Vec<f64>,
    #[serde(rename = "R")]
    r_z: Option<Matrix>,
    integrality: Option<Vec<bool>>,
    uncertainty: UncertaintySet,
}

impl TwoStageProblem {
    /// `c(z)`.
    pub fn c_at(&self, z: &[f64]) -> Vec<f64> {
        let mut c = self.c0.clone();
        let cz = self.c_z.matvec(z);
        for (ci, v) in c.iter_mut().zip(cz) {
            *ci += v;
        }
        c
    }

    /// `r(z)`.
    pub fn r_at(&self, z: &[f64]) -> Vec<f64> {
        let mut r = self.r0.clone();
        let rz = self.r_z.matvec(z);
        for (ri, v) in r.iter_mut().zip(rz) {
            *ri += v;
        }
        r
    }

    /// Row `i` of `A(z)`.
    pub fn a_row_at(&self, i: usize, z: &[f64]) -> Vec<f64> {
        let mut row = self.a0.row(i).to_vec();
        for (l, al) in self.a_z.iter().enumerate() {
            let zl = z[l];
            if zl != 0.0 {
                for (rj, &a) in row.iter_mut().zip(al.row(i)) {
                    *rj += zl * a;
                }
            }
        }
        row
    }

    /// True when neither `A` nor `c` depends on `z` (right-hand-side
    /// uncertainty only).
    pub fn is_rhs_uncertainty_only(&self) -> bool {
        self.c_z.max_abs() <= OCCURRENCE_TOL
            && self.a_z.iter().all(|al| al.max_abs() <= OCCURRENCE_TOL)
    }

    pub fn has_binaries(&self) -> bool {
        self.integrality.iter().any(|&b| b)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse a problem document without validating it; optional zero blocks are
/// materialized.
pub fn parse_problem_unchecked(text: &str) -> Result<TwoStageProblem> {
    let raw: RawProblem = serde_json::from_str(text)?;
    let problem = TwoStageProblem {
        a_z: raw
            .a_z
            .unwrap_or_else(|| (0..raw.l).map(|_| Matrix::zeros(raw.m, raw.n_x)).collect()),
        r_z: raw.r_z.unwrap_or_else(|| Matrix::zeros(raw.m, raw.l)),
        integrality: raw.integrality.unwrap_or_else(|| vec![false; raw.n_x]),
        n_x: raw.n_x,
        n_y: raw.n_y,
        m: raw.m,
        l: raw.l,
        c0: raw.c0,
        c_z: raw.c_z,
        d: raw.d,
        a0: raw.a0,
        b: raw.b,
        r0: raw.r0,
        uncertainty: raw.uncertainty,
    };
    Ok(problem)
}

/// Parse a problem document and validate it. Round-trip stable: serializing
/// the result materializes the optional zero blocks.
pub fn parse_problem(text: &str) -> Result<TwoStageProblem> {
    let problem = parse_problem_unchecked(text)?;
    let report = validate(&problem)?;
    if !report.ok() {
        return Err(Error::InvalidProblem(report.to_string()));
    }
    Ok(problem)
}

pub fn serialize_problem(problem: &TwoStageProblem) -> String {
    serde_json::to_string_pretty(problem).expect("problem serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    DimensionMismatch {
        field: String,
        expected: String,
        got: String,
    },
    NonFinite {
        field: String,
    },
    UncertaintyUnbounded {
        coordinate: usize,
    },
    UncertaintyEmpty,
    VertexInfeasible {
        index: usize,
        violation: f64,
    },
    VertexDuplicate {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch {
                field,
                expected,
                got,
            } => write!(f, "dimension mismatch in {field}: expected {expected}, got {got}"),
            Violation::NonFinite { field } => write!(f, "non-finite entry in {field}"),
            Violation::UncertaintyUnbounded { coordinate } => {
                write!(f, "uncertainty set unbounded in coordinate {coordinate}")
            }
            Violation::UncertaintyEmpty => write!(f, "uncertainty set empty"),
            Violation::VertexInfeasible { index, violation } => {
                write!(f, "cached vertex {index} infeasible by {violation:.3e}")
            }
            Violation::VertexDuplicate { first, second } => {
                write!(f, "cached vertices {first} and {second} coincide")
            }
        }
    }
}

/// Report-style validation output. `nominal_slacks` carries the margin of
/// the nominal scenario on every uncertainty row when one is present.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub nominal_slacks: Option<Vec<f64>>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", msgs.join("; "))
        }
    }
}

fn check_dims(report: &mut Vec<Violation>, field: &str, m: &Matrix, rows: usize, cols: usize) {
    if m.nrows() != rows || m.ncols() != cols {
        report.push(Violation::DimensionMismatch {
            field: field.into(),
            expected: format!("{rows}x{cols}"),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    if !m.is_finite() {
        report.push(Violation::NonFinite {
            field: field.into(),
        });
    }
}

fn check_vec(report: &mut Vec<Violation>, field: &str, v: &[f64], len: usize) {
    if v.len() != len {
        report.push(Violation::DimensionMismatch {
            field: field.into(),
            expected: format!("{len}"),
            got: format!("{}", v.len()),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        report.push(Violation::NonFinite {
            field: field.into(),
        });
    }
}

/// Validate dimensions, finiteness, and the uncertainty set (bounded and
/// nonempty, witnessed by LPs). Never fails on model defects; returns the
/// violation list instead.
pub fn validate(problem: &TwoStageProblem) -> Result<ValidationReport> {
    let mut violations = Vec::new();
    let (n_x, n_y, m, l) = (problem.n_x, problem.n_y, problem.m, problem.l);

    check_vec(&mut violations, "c0", &problem.c0, n_x);
    check_dims(&mut violations, "C", &problem.c_z, n_x, l);
    check_vec(&mut violations, "d", &problem.d, n_y);
    check_dims(&mut violations, "A0", &problem.a0, m, n_x);
    if problem.a_z.len() != l {
        violations.push(Violation::DimensionMismatch {
            field: "A".into(),
            expected: format!("{l} matrices"),
            got: format!("{} matrices", problem.a_z.len()),
        });
    }
    for (idx, al) in problem.a_z.iter().enumerate() {
        check_dims(&mut violations, &format!("A[{idx}]"), al, m, n_x);
    }
    check_dims(&mut violations, "B", &problem.b, m, n_y);
    check_vec(&mut violations, "r0", &problem.r0, m);
    check_dims(&mut violations, "R", &problem.r_z, m, l);
    if problem.integrality.len() != n_x {
        violations.push(Violation::DimensionMismatch {
            field: "integrality".into(),
            expected: format!("{n_x}"),
            got: format!("{}", problem.integrality.len()),
        });
    }
    let u = &problem.uncertainty;
    check_dims(&mut violations, "uncertainty.H", &u.h_mat, u.n_rows(), l);
    check_vec(&mut violations, "uncertainty.h", &u.h_vec, u.n_rows());

    // Geometry checks only make sense on dimensionally sound data.
    if violations.is_empty() {
        let mut empty = false;
        for coord in 0..l {
            let mut dir = vec![0.0; l];
            dir[coord] = 1.0;
            for sign in [1.0, -1.0] {
                dir[coord] = sign;
                match u.support(&dir) {
                    Ok(_) => {}
                    Err(Error::UnboundedSet { .. }) => {
                        violations.push(Violation::UncertaintyUnbounded { coordinate: coord });
                        break;
                    }
                    Err(Error::EmptySet) => {
                        empty = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if empty {
                violations.push(Violation::UncertaintyEmpty);
                break;
            }
        }
        if let Some(vertices) = &u.vertices {
            for (i, v) in vertices.iter().enumerate() {
                let worst = u.slacks(&v.z).into_iter().fold(0.0f64, |a, s| a.min(s));
                if worst < -1e-7 {
                    violations.push(Violation::VertexInfeasible {
                        index: i,
                        violation: -worst,
                    });
                }
                for (j, w) in vertices.iter().enumerate().take(i) {
                    if linf_distance(&v.z, &w.z) <= 1e-7 {
                        violations.push(Violation::VertexDuplicate {
                            first: j,
                            second: i,
                        });
                    }
                }
            }
        }
    }

    let nominal_slacks = u.nominal.as_ref().map(|nom| u.slacks(&nom.z));

    Ok(ValidationReport {
        violations,
        nominal_slacks,
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Objective and per-row slack of a full `(x, y)` decision at scenario `z`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub objective: f64,
    pub slacks: Vec<f64>,
}

impl Evaluation {
    pub fn feasible(&self, tol: f64) -> bool {
        self.slacks.iter().all(|&s| s >= -tol)
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().fold(f64::INFINITY, |a, &s| a.min(s))
    }
}

/// `objective = c(z)^T x + d^T y`, `slack_i = r_i(z) - a_i(z)^T x - b_i^T y`.
pub fn evaluate(problem: &TwoStageProblem, x: &[f64], y: &[f64], z: &Scenario) -> Result<Evaluation> {
    if x.len() != problem.n_x || y.len() != problem.n_y || z.dim() != problem.l {
        return Err(Error::DimensionMismatch {
            context: "evaluate".into(),
            expected: format!("x:{} y:{} z:{}", problem.n_x, problem.n_y, problem.l),
            got: format!("x:{} y:{} z:{}", x.len(), y.len(), z.dim()),
        });
    }
    let c = problem.c_at(&z.z);
    let r = problem.r_at(&z.z);
    let objective = dot(&c, x) + dot(&problem.d, y);
    let slacks = (0..problem.m)
        .map(|i| {
            let a = problem.a_row_at(i, &z.z);
            r[i] - dot(&a, x) - dot(problem.b.row(i), y)
        })
        .collect();
    Ok(Evaluation { objective, slacks })
}

// ---------------------------------------------------------------------------
// Structure detection
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Constraintwise,
    Hybrid,
    Block,
    Simplex,
    General,
}

/// One block of a block-structured instance: constraint/objective rows
/// (index 0 is the objective), parameter indices, and Stage-2 variables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureBlock {
    pub rows: Vec<usize>,
    pub params: Vec<usize>,
    pub stage2: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub kind: StructureKind,
    /// Every label that holds, most specific first.
    pub applicable: Vec<StructureKind>,
    /// Parameters occurring in two or more rows.
    pub non_constraintwise_params: Vec<usize>,
    /// Row index (0 = objective, i = constraint i) to privately occurring
    /// parameter indices.
    pub per_row_params: BTreeMap<usize, Vec<usize>>,
    pub blocks: Vec<StructureBlock>,
    /// Set when the occurrence pattern matched a label but the uncertainty
    /// set does not factorize accordingly.
    pub factorization_note: Option<String>,
}

/// Parameter occurrence rows: index 0 is the objective, 1..=m constraints.
fn occurrence_rows(problem: &TwoStageProblem, param: usize) -> Vec<usize> {
    let mut rows = Vec::new();
    if (0..problem.n_x).any(|j| problem.c_z[(j, param)].abs() > OCCURRENCE_TOL) {
        rows.push(0);
    }
    for i in 0..problem.m {
        let in_a = (0..problem.n_x).any(|j| problem.a_z[param][(i, j)].abs() > OCCURRENCE_TOL);
        if in_a || problem.r_z[(i, param)].abs() > OCCURRENCE_TOL {
            rows.push(i + 1);
        }
    }
    rows
}

/// Check that every row of `H` touches parameters from a single cell, i.e.
/// the set is a Cartesian product over the partition (block-diagonal `H` up
/// to row/column permutation).
fn factorizes(u: &UncertaintySet, cells: &[Vec<usize>]) -> bool {
    let mut cell_of = vec![usize::MAX; u.dim()];
    for (ci, cell) in cells.iter().enumerate() {
        for &p in cell {
            cell_of[p] = ci;
        }
    }
    for row in u.h_mat.iter_rows() {
        let mut seen: Option<usize> = None;
        for (p, &coef) in row.iter().enumerate() {
            if coef.abs() > OCCURRENCE_TOL {
                let c = cell_of[p];
                match seen {
                    None => seen = Some(c),
                    Some(prev) if prev == c => {}
                    Some(_) => return false,
                }
            }
        }
    }
    true
}

/// Union-find over rows, parameters, and Stage-2 variables.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Classify the occurrence pattern of uncertain parameters and Stage-2
/// variables. The reported `kind` is the most specific applicable label;
/// every label that holds is listed in `applicable`.
pub fn detect_structure(problem: &TwoStageProblem) -> StructureReport {
    let l = problem.l;
    let m = problem.m;

    let occ: Vec<Vec<usize>> = (0..l).map(|p| occurrence_rows(problem, p)).collect();
    let mut non_constraintwise: Vec<usize> = Vec::new();
    let mut per_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (p, rows) in occ.iter().enumerate() {
        match rows.len() {
            0 => {} // parameter never occurs; belongs to no row
            1 => per_row.entry(rows[0]).or_default().push(p),
            _ => non_constraintwise.push(p),
        }
    }

    // Block partition: connected components of the occurrence graph over
    // (rows 0..=m, parameters, Stage-2 variables).
    let node_row = |i: usize| i; // 0..=m
    let node_param = |p: usize| m + 1 + p;
    let node_y = |k: usize| m + 1 + l + k;
    let mut uf = UnionFind::new(m + 1 + l + problem.n_y);
    for (p, rows) in occ.iter().enumerate() {
        for &row in rows {
            uf.union(node_param(p), node_row(row));
        }
    }
    for k in 0..problem.n_y {
        if problem.d[k].abs() > OCCURRENCE_TOL {
            uf.union(node_y(k), node_row(0));
        }
        for i in 0..m {
            if problem.b[(i, k)].abs() > OCCURRENCE_TOL {
                uf.union(node_y(k), node_row(i + 1));
            }
        }
    }
    let mut groups: BTreeMap<usize, StructureBlock> = BTreeMap::new();
    for i in 0..=m {
        let root = uf.find(node_row(i));
        let row_active = (i == 0
            && (problem.d.iter().any(|v| v.abs() > OCCURRENCE_TOL)
                || occ.iter().any(|rows| rows.contains(&0))))
            || (i > 0
                && ((0..problem.n_y).any(|k| problem.b[(i - 1, k)].abs() > OCCURRENCE_TOL)
                    || occ.iter().any(|rows| rows.contains(&i))));
        if row_active {
            groups.entry(root).or_insert_with(|| StructureBlock {
                rows: Vec::new(),
                params: Vec::new(),
                stage2: Vec::new(),
            });
            groups.get_mut(&root).unwrap().rows.push(i);
        }
    }
    for p in 0..l {
        if !occ[p].is_empty() {
            let root = uf.find(node_param(p));
            groups
                .entry(root)
                .or_insert_with(|| StructureBlock {
                    rows: Vec::new(),
                    params: Vec::new(),
                    stage2: Vec::new(),
                })
                .params
                .push(p);
        }
    }
    for k in 0..problem.n_y {
        let active = problem.d[k].abs() > OCCURRENCE_TOL
            || (0..m).any(|i| problem.b[(i, k)].abs() > OCCURRENCE_TOL);
        if active {
            let root = uf.find(node_y(k));
            groups
                .entry(root)
                .or_insert_with(|| StructureBlock {
                    rows: Vec::new(),
                    params: Vec::new(),
                    stage2: Vec::new(),
                })
                .stage2
                .push(k);
        }
    }
    let blocks: Vec<StructureBlock> = groups.into_values().collect();

    let mut applicable = Vec::new();
    let mut factorization_note = None;

    // Constraintwise: every occurring parameter is private to one row, and
    // the set factorizes over the per-row cells.
    let constraintwise_pattern = non_constraintwise.is_empty() && !per_row.is_empty();
    if constraintwise_pattern {
        let cells: Vec<Vec<usize>> = per_row.values().cloned().collect();
        if factorizes(&problem.uncertainty, &cells) {
            applicable.push(StructureKind::Constraintwise);
        } else {
            factorization_note = Some(
                "occurrence pattern is constraintwise but H does not factorize".into(),
            );
        }
    }

    // Block: at least two components, factorizing over block parameter cells.
    let block_pattern = blocks.len() >= 2 && blocks.iter().any(|b| !b.params.is_empty());
    if block_pattern {
        let cells: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| b.params.clone())
            .filter(|p| !p.is_empty())
            .collect();
        if factorizes(&problem.uncertainty, &cells) {
            applicable.push(StructureKind::Block);
        } else if factorization_note.is_none() {
            factorization_note =
                Some("occurrence pattern is block but H does not factorize".into());
        }
    }

    // Hybrid: a nonempty shared part plus at least one private parameter,
    // factorizing over {shared} and the per-row cells.
    let hybrid_pattern = !non_constraintwise.is_empty() && !per_row.is_empty();
    if hybrid_pattern {
        let mut cells: Vec<Vec<usize>> = vec![non_constraintwise.clone()];
        cells.extend(per_row.values().cloned());
        if factorizes(&problem.uncertainty, &cells) {
            applicable.push(StructureKind::Hybrid);
        } else if factorization_note.is_none() {
            factorization_note =
                Some("occurrence pattern is hybrid but H does not factorize".into());
        }
    }

    let kind = applicable
        .first()
        .copied()
        .unwrap_or(StructureKind::General);

    StructureReport {
        kind,
        applicable,
        non_constraintwise_params: non_constraintwise,
        per_row_params: per_row,
        blocks,
        factorization_note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::fixtures;

    #[test]
    fn rt_problem_validates() {
        let p = fixtures::rt_example(0.5);
        let report = validate(&p).unwrap();
        assert!(report.ok(), "{report}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut p = fixtures::rt_example(0.5);
        p.a0 = Matrix::zeros(p.m - 1, p.n_x);
        let report = validate(&p).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DimensionMismatch { field, .. } if field == "A0")));
    }

    #[test]
    fn unbounded_set_is_reported() {
        let mut p = fixtures::rt_example(0.5);
        // z >= 0 only: recession direction e_1
        p.uncertainty = UncertaintySet::new(
            Matrix::from_rows(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]),
            vec![0.0, 0.0],
        );
        let report = validate(&p).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UncertaintyUnbounded { .. })));
    }

    #[test]
    fn evaluate_matches_golden_row() {
        let p = fixtures::rt_example(0.5);
        let e = evaluate(&p, &[25.0], &[30.0], &Scenario::new(vec![50.0, 55.0])).unwrap();
        assert!((e.objective - 27.5).abs() < 1e-9);
        assert!(e.feasible(1e-9));
    }

    #[test]
    fn evaluate_detects_coverage_violation() {
        let p = fixtures::rt_example(0.5);
        let e = evaluate(&p, &[25.0], &[20.0], &Scenario::new(vec![60.0, 60.0])).unwrap();
        assert!(!e.feasible(1e-9));
        assert!((e.min_slack() + 15.0).abs() < 1e-9);
    }

    #[test]
    fn evaluate_zero_case() {
        let mut p = fixtures::rt_example(0.5);
        p.c0 = vec![0.0];
        p.r0 = vec![0.0; p.m];
        p.r_z = Matrix::zeros(p.m, p.l);
        let e = evaluate(&p, &[0.0], &[0.0], &Scenario::new(vec![0.0, 0.0])).unwrap();
        assert_eq!(e.objective, 0.0);
        assert!(e.slacks.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn evaluate_is_affine_in_z() {
        let p = fixtures::rt_example(0.5);
        let x = [27.0];
        let y = [31.0];
        let z1 = vec![50.0, 60.0];
        let z2 = vec![58.0, 52.0];
        for step in 0..=10 {
            let alpha = step as f64 / 10.0;
            let mix: Vec<f64> = z1
                .iter()
                .zip(&z2)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect();
            let e_mix = evaluate(&p, &x, &y, &Scenario::new(mix)).unwrap();
            let e1 = evaluate(&p, &x, &y, &Scenario::new(z1.clone())).unwrap();
            let e2 = evaluate(&p, &x, &y, &Scenario::new(z2.clone())).unwrap();
            let expect = alpha * e1.objective + (1.0 - alpha) * e2.objective;
            assert!((e_mix.objective - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn constraintwise_example_detected() {
        let p = fixtures::constraintwise_example();
        let report = detect_structure(&p);
        assert_eq!(report.kind, StructureKind::Constraintwise);
        assert_eq!(report.per_row_params[&1], vec![0]);
        assert_eq!(report.per_row_params[&2], vec![1, 2]);
        assert!(report.non_constraintwise_params.is_empty());
    }

    #[test]
    fn hybrid_example_detected() {
        let p = fixtures::hybrid_example();
        let report = detect_structure(&p);
        assert_eq!(report.kind, StructureKind::Hybrid);
        assert_eq!(report.non_constraintwise_params, vec![0]);
        assert_eq!(report.per_row_params[&1], vec![1]);
        assert_eq!(report.per_row_params[&2], vec![2, 3]);
    }

    #[test]
    fn block_example_detected() {
        let p = fixtures::block_example();
        let report = detect_structure(&p);
        assert_eq!(report.kind, StructureKind::Block);
        assert_eq!(report.blocks.len(), 2);
        assert_eq!(report.blocks[0].params, vec![0, 1, 2, 3]);
        assert_eq!(report.blocks[0].stage2, vec![0, 1]);
        assert_eq!(report.blocks[1].params, vec![4, 5]);
        assert_eq!(report.blocks[1].stage2, vec![2]);
    }

    #[test]
    fn private_column_swap_keeps_label() {
        // Swapping two private parameter columns relabels indices only.
        let p = fixtures::constraintwise_example();
        let mut q = p.clone();
        let (a, b) = (1usize, 2usize);
        q.a_z.swap(a, b);
        for i in 0..q.m {
            let tmp = q.r_z[(i, a)];
            q.r_z[(i, a)] = q.r_z[(i, b)];
            q.r_z[(i, b)] = tmp;
        }
        for j in 0..q.n_x {
            let tmp = q.c_z[(j, a)];
            q.c_z[(j, a)] = q.c_z[(j, b)];
            q.c_z[(j, b)] = tmp;
        }
        let mut h = q.uncertainty.h_mat.to_rows();
        for row in &mut h {
            row.swap(a, b);
        }
        q.uncertainty.h_mat = Matrix::from_rows(h);
        assert_eq!(detect_structure(&q).kind, detect_structure(&p).kind);
    }

    #[test]
    fn parse_round_trip_is_canonical() {
        let p = fixtures::rt_example(0.5);
        let text = serialize_problem(&p);
        let once = parse_problem(&text).unwrap();
        let canonical = serialize_problem(&once);
        let twice = parse_problem(&canonical).unwrap();
        assert_eq!(serialize_problem(&twice), canonical);
    }

    #[test]
    fn missing_recourse_matrix_names_field() {
        let p = fixtures::rt_example(0.5);
        let mut doc: serde_json::Value = serde_json::from_str(&serialize_problem(&p)).unwrap();
        doc.as_object_mut().unwrap().remove("B");
        let err = parse_problem(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains('B'), "{err}");
    }
}
