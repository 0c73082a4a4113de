//! Dense linear-programming substrate: two-phase bounded-variable primal
//! simplex with a Bland anti-cycling fallback, plus branch-and-bound for
//! binary variables.
//!
//! All rows are `a x <= rhs` under minimization. Variable bounds may be
//! infinite; nonbasic variables rest at a finite bound (free ones at zero)
//! and bound-to-bound moves happen without a basis change. Binaries must be
//! bounded to [0, 1]. Duals follow the convention `lambda <= 0` for `<=`
//! rows.

use crate::error::{Error, Result};
use crate::linalg::dot;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub const FEAS_TOL: f64 = 1e-7;
pub const RC_TOL: f64 = 1e-9;
pub const PIVOT_TOL: f64 = 1e-8;
pub const INT_TOL: f64 = 1e-6;
const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// A minimization LP over `<=` rows with per-variable bounds.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub binary: Vec<bool>,
    /// Pivot cap; `None` uses `10 * (rows + cols)^2`.
    pub pivot_cap: Option<usize>,
    /// Branch-and-bound node cap.
    pub node_cap: usize,
}

impl LpProblem {
    /// New problem with `n` free continuous variables and zero objective.
    pub fn new(n: usize) -> Self {
        LpProblem {
            objective: vec![0.0; n],
            rows: Vec::new(),
            rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            binary: vec![false; n],
            pivot_cap: None,
            node_cap: DEFAULT_NODE_CAP,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Add a dense row `coeffs . x <= rhs`.
    pub fn add_row(&mut self, coeffs: Vec<f64>, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars(), "row width mismatch");
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    /// Add a sparse row given `(index, coeff)` pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], rhs: f64) {
        let mut coeffs = vec![0.0; self.n_vars()];
        for &(j, c) in entries {
            coeffs[j] += c;
        }
        self.add_row(coeffs, rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn set_binary(&mut self, j: usize) {
        self.binary[j] = true;
        self.lower[j] = 0.0;
        self.upper[j] = 1.0;
    }

    /// Fold rows touching exactly one variable into that variable's bounds.
    /// Intended for model-to-LP builders; row duals are not preserved.
    pub fn compact_singleton_rows(&mut self) {
        let mut keep = vec![true; self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let nz: Vec<usize> = (0..row.len()).filter(|&j| row[j].abs() > 1e-12).collect();
            match nz.len() {
                0 => {
                    if self.rhs[i] >= -FEAS_TOL {
                        keep[i] = false; // vacuous row
                    }
                }
                1 => {
                    let j = nz[0];
                    let g = row[j];
                    let b = self.rhs[i] / g;
                    if g > 0.0 {
                        self.upper[j] = self.upper[j].min(b);
                    } else {
                        self.lower[j] = self.lower[j].max(b);
                    }
                    keep[i] = false;
                }
                _ => {}
            }
        }
        let mut idx = 0;
        self.rows.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
        let mut idx = 0;
        self.rhs.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
    }
}

/// Solver output. `dual` carries one multiplier per problem row
/// (`lambda <= 0`); `basis` is the sorted basic-column identifier over the
/// structural-then-slack column numbering and is deterministic for identical
/// input.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub dual: Vec<f64>,
    pub dual_objective: f64,
    pub basis: Vec<usize>,
    pub nodes_explored: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn non_optimal(status: LpStatus, n: usize, m: usize) -> Self {
        let objective = match status {
            LpStatus::Infeasible => f64::INFINITY,
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        LpSolution {
            status,
            x: vec![0.0; n],
            objective,
            dual: vec![0.0; m],
            dual_objective: objective,
            basis: Vec::new(),
            nodes_explored: 0,
        }
    }

    fn bound_or(&self, fallback: f64) -> f64 {
        if self.objective.is_finite() {
            self.objective
        } else {
            fallback
        }
    }
}

/// Solve a continuous LP. The binary mask must be all false.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    if p.binary.iter().any(|&b| b) {
        return Err(Error::Precondition(
            "solve_lp requires an empty binary mask; use solve_milp".into(),
        ));
    }
    solve_relaxation(p)
}

/// Solve a mixed-binary LP by best-first branch-and-bound with an initial
/// depth-first dive. Returns a proven optimum.
pub fn solve_milp(p: &LpProblem) -> Result<LpSolution> {
    for j in 0..p.n_vars() {
        if p.binary[j] && (p.lower[j] < -1e-9 || p.upper[j] > 1.0 + 1e-9) {
            return Err(Error::Precondition(format!(
                "binary variable {j} must be bounded to [0, 1]"
            )));
        }
    }
    if !p.binary.iter().any(|&b| b) {
        return solve_relaxation(p);
    }

    let root = solve_relaxation(p)?;
    match root.status {
        LpStatus::Infeasible | LpStatus::Unbounded | LpStatus::IterationLimit => return Ok(root),
        LpStatus::Optimal => {}
    }

    struct Node {
        lower: Vec<f64>,
        upper: Vec<f64>,
        bound: f64,
    }
    // Min-heap on (bound, insertion id); ids keep ordering deterministic.
    #[derive(PartialEq)]
    struct Key(f64, usize);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
        }
    }

    let most_fractional = |x: &[f64]| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..p.n_vars() {
            if !p.binary[j] {
                continue;
            }
            let frac = (x[j] - x[j].round()).abs();
            if frac > INT_TOL {
                let score = (x[j] - 0.5).abs();
                if best.is_none_or(|(_, s)| score < s) {
                    best = Some((j, score));
                }
            }
        }
        best.map(|(j, _)| j)
    };

    let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    let mut store: Vec<Node> = Vec::new();
    let mut incumbent: Option<LpSolution> = None;
    let mut nodes = 1usize;
    let mut next: Option<(Node, LpSolution)> = Some((
        Node {
            lower: p.lower.clone(),
            upper: p.upper.clone(),
            bound: root.objective,
        },
        root,
    ));

    loop {
        let (node, relax) = match next.take() {
            Some(pair) => pair,
            None => match heap.pop() {
                Some(Reverse(Key(bound, id))) => {
                    if let Some(ref inc) = incumbent {
                        if bound >= inc.objective - 1e-9 {
                            continue; // pruned by bound
                        }
                    }
                    let node = Node {
                        lower: store[id].lower.clone(),
                        upper: store[id].upper.clone(),
                        bound,
                    };
                    if nodes >= p.node_cap {
                        let mut best = incumbent.unwrap_or_else(|| {
                            LpSolution::non_optimal(LpStatus::IterationLimit, p.n_vars(), p.n_rows())
                        });
                        best.status = LpStatus::IterationLimit;
                        best.nodes_explored = nodes;
                        return Ok(best);
                    }
                    nodes += 1;
                    let mut sub = p.clone();
                    sub.lower = node.lower.clone();
                    sub.upper = node.upper.clone();
                    let relax = solve_relaxation(&sub)?;
                    (node, relax)
                }
                None => break,
            },
        };

        match relax.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                let mut sol = LpSolution::non_optimal(LpStatus::Unbounded, p.n_vars(), p.n_rows());
                sol.nodes_explored = nodes;
                return Ok(sol);
            }
            LpStatus::IterationLimit => {
                let mut sol = relax;
                sol.status = LpStatus::IterationLimit;
                sol.nodes_explored = nodes;
                return Ok(sol);
            }
            LpStatus::Optimal => {}
        }
        if let Some(ref inc) = incumbent {
            if relax.objective >= inc.objective - 1e-9 {
                continue;
            }
        }
        match most_fractional(&relax.x) {
            None => {
                let better = incumbent
                    .as_ref()
                    .is_none_or(|inc| relax.objective < inc.objective - 1e-9);
                if better {
                    incumbent = Some(relax);
                }
            }
            Some(j) => {
                let dive_up = relax.x[j].round() >= 1.0;
                let make = |fix_one: bool| {
                    let mut lower = node.lower.clone();
                    let mut upper = node.upper.clone();
                    if fix_one {
                        lower[j] = 1.0;
                    } else {
                        upper[j] = 0.0;
                    }
                    Node {
                        lower,
                        upper,
                        bound: relax.bound_or(node.bound),
                    }
                };
                let dive = make(dive_up);
                let queued = make(!dive_up);
                let id = store.len();
                store.push(queued);
                heap.push(Reverse(Key(relax.objective, id)));

                if nodes >= p.node_cap {
                    let mut best = incumbent.unwrap_or_else(|| {
                        LpSolution::non_optimal(LpStatus::IterationLimit, p.n_vars(), p.n_rows())
                    });
                    best.status = LpStatus::IterationLimit;
                    best.nodes_explored = nodes;
                    return Ok(best);
                }
                nodes += 1;
                let mut sub = p.clone();
                sub.lower = dive.lower.clone();
                sub.upper = dive.upper.clone();
                let relax = solve_relaxation(&sub)?;
                next = Some((dive, relax));
            }
        }
    }

    match incumbent {
        Some(mut sol) => {
            sol.nodes_explored = nodes;
            Ok(sol)
        }
        None => {
            let mut sol = LpSolution::non_optimal(LpStatus::Infeasible, p.n_vars(), p.n_rows());
            sol.nodes_explored = nodes;
            Ok(sol)
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded-variable simplex core
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum NbState {
    AtLower,
    AtUpper,
    /// Free variable resting at zero.
    AtZero,
    Basic,
}

struct Simplex {
    m: usize,
    ncols: usize, // structural + slacks + artificials
    /// Columns at or beyond this index are never scanned for entering.
    active_cols: usize,
    tab: Vec<f64>,
    rc: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    state: Vec<NbState>,
    basis: Vec<usize>,
    x_basic: Vec<f64>,
    banned: Vec<bool>,
}

impl Simplex {
    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            NbState::AtLower => self.lo[j],
            NbState::AtUpper => self.up[j],
            _ => 0.0,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.ncols;
        let start = row * w;
        let pivot = self.tab[start + col];
        let inv = 1.0 / pivot;
        for v in &mut self.tab[start..start + w] {
            *v *= inv;
        }
        self.tab[start + col] = 1.0;
        let prow: Vec<f64> = self.tab[start..start + w].to_vec();
        for (i, target) in self.tab.chunks_mut(w).enumerate() {
            if i == row {
                continue;
            }
            let f = target[col];
            if f != 0.0 {
                for (t, &pv) in target.iter_mut().zip(&prow) {
                    *t -= f * pv;
                }
                target[col] = 0.0;
            }
        }
        let f = self.rc[col];
        if f != 0.0 {
            for (t, &pv) in self.rc.iter_mut().zip(&prow) {
                *t -= f * pv;
            }
            self.rc[col] = 0.0;
        }
    }
}

enum StepOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Run the bounded-variable primal simplex until the current cost row is
/// optimal. Dantzig pricing with a Bland fallback after a degeneracy streak.
fn run_simplex(s: &mut Simplex, pivots: &mut usize, cap: usize) -> StepOutcome {
    let mut bland = false;
    let mut degenerate_streak = 0usize;
    loop {
        // entering column and its direction of movement
        let mut entering: Option<(usize, f64, f64)> = None; // (col, dir, score)
        for j in 0..s.active_cols {
            if s.banned[j] || s.state[j] == NbState::Basic || s.up[j] - s.lo[j] <= 1e-12 {
                continue;
            }
            let rc = s.rc[j];
            let dir = match s.state[j] {
                NbState::AtLower => {
                    if rc < -RC_TOL {
                        1.0
                    } else {
                        continue;
                    }
                }
                NbState::AtUpper => {
                    if rc > RC_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                NbState::AtZero => {
                    if rc < -RC_TOL {
                        1.0
                    } else if rc > RC_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                NbState::Basic => unreachable!(),
            };
            let score = rc.abs();
            if bland {
                entering = Some((j, dir, score));
                break;
            }
            if entering.is_none_or(|(_, _, best)| score > best) {
                entering = Some((j, dir, score));
            }
        }
        let Some((col, dir, _)) = entering else {
            return StepOutcome::Optimal;
        };

        // ratio test: step t >= 0 of the entering variable along dir; each
        // basic value moves by -dir * tab[i][col] per unit step
        let mut t_best = s.up[col] - s.lo[col]; // own span; may be infinite
        let mut leave: Option<usize> = None;
        let mut leave_to_upper = false;
        for i in 0..s.m {
            let d = s.tab[i * s.ncols + col];
            let delta = -dir * d;
            let k = s.basis[i];
            if delta > PIVOT_TOL {
                if s.up[k].is_finite() {
                    let t = ((s.up[k] - s.x_basic[i]) / delta).max(0.0);
                    let better = t < t_best - 1e-12
                        || (t < t_best + 1e-12
                            && leave.is_some_and(|li| s.basis[i] < s.basis[li]));
                    if better || (leave.is_none() && t < t_best) {
                        t_best = t;
                        leave = Some(i);
                        leave_to_upper = true;
                    }
                }
            } else if delta < -PIVOT_TOL && s.lo[k].is_finite() {
                let t = ((s.lo[k] - s.x_basic[i]) / delta).max(0.0);
                let better = t < t_best - 1e-12
                    || (t < t_best + 1e-12
                        && leave.is_some_and(|li| s.basis[i] < s.basis[li]));
                if better || (leave.is_none() && t < t_best) {
                    t_best = t;
                    leave = Some(i);
                    leave_to_upper = false;
                }
            }
        }
        if !t_best.is_finite() {
            return StepOutcome::Unbounded;
        }

        // apply the move to the basic values
        if t_best > 0.0 {
            for i in 0..s.m {
                let d = s.tab[i * s.ncols + col];
                if d != 0.0 {
                    s.x_basic[i] -= dir * d * t_best;
                }
            }
        }

        match leave {
            None => {
                // bound flip: the entering variable crosses its whole span
                s.state[col] = if dir > 0.0 {
                    NbState::AtUpper
                } else {
                    NbState::AtLower
                };
            }
            Some(row) => {
                let old = s.basis[row];
                s.state[old] = if leave_to_upper {
                    NbState::AtUpper
                } else {
                    NbState::AtLower
                };
                let entering_value = s.nonbasic_value(col) + dir * t_best;
                s.pivot(row, col);
                s.basis[row] = col;
                s.state[col] = NbState::Basic;
                s.x_basic[row] = entering_value;
            }
        }

        *pivots += 1;
        if *pivots > cap {
            return StepOutcome::IterationLimit;
        }
        if t_best <= 1e-12 {
            degenerate_streak += 1;
            if degenerate_streak > s.m {
                bland = true;
            }
        } else {
            degenerate_streak = 0;
            bland = false;
        }
    }
}

fn solve_relaxation(p: &LpProblem) -> Result<LpSolution> {
    let n = p.n_vars();
    let m = p.n_rows();
    for j in 0..n {
        if !p.objective[j].is_finite() {
            return Err(Error::InvalidProblem(format!("objective[{j}] not finite")));
        }
        if p.lower[j].is_nan() || p.upper[j].is_nan() {
            return Err(Error::InvalidProblem(format!("bounds[{j}] contain NaN")));
        }
    }
    for (i, row) in p.rows.iter().enumerate() {
        if row.iter().any(|v| !v.is_finite()) || !p.rhs[i].is_finite() {
            return Err(Error::InvalidProblem(format!("row {i} not finite")));
        }
    }
    if (0..n).any(|j| p.lower[j] > p.upper[j] + 1e-12) {
        return Ok(LpSolution::non_optimal(LpStatus::Infeasible, n, m));
    }

    // initial nonbasic placement: finite lower, else finite upper, else zero
    let mut state: Vec<NbState> = (0..n)
        .map(|j| {
            if p.lower[j].is_finite() {
                NbState::AtLower
            } else if p.upper[j].is_finite() {
                NbState::AtUpper
            } else {
                NbState::AtZero
            }
        })
        .collect();
    let x0: Vec<f64> = (0..n)
        .map(|j| match state[j] {
            NbState::AtLower => p.lower[j],
            NbState::AtUpper => p.upper[j],
            _ => 0.0,
        })
        .collect();

    // residual slack values decide which rows need an artificial
    let residual: Vec<f64> = (0..m).map(|i| p.rhs[i] - dot(&p.rows[i], &x0)).collect();
    let art_rows: Vec<usize> = (0..m).filter(|&i| residual[i] < 0.0).collect();
    let n_art = art_rows.len();
    let ncols = n + m + n_art;

    state.resize(ncols, NbState::AtLower);
    let mut s = Simplex {
        m,
        ncols,
        active_cols: ncols,
        tab: vec![0.0; m * ncols],
        rc: vec![0.0; ncols],
        lo: {
            let mut lo = vec![0.0; ncols];
            lo[..n].copy_from_slice(&p.lower);
            lo
        },
        up: {
            let mut up = vec![f64::INFINITY; ncols];
            up[..n].copy_from_slice(&p.upper);
            up
        },
        state: Vec::new(),
        basis: vec![0; m],
        x_basic: vec![0.0; m],
        banned: vec![false; ncols],
    };
    for i in 0..m {
        let base = i * ncols;
        for (j, &a) in p.rows[i].iter().enumerate() {
            s.tab[base + j] = a;
        }
        s.tab[base + n + i] = 1.0; // slack
    }
    for (k, &i) in art_rows.iter().enumerate() {
        // Store the row negated so the artificial carries the +1 the basis
        // invariant requires: -A x - slack + art = -rhs, art = -residual > 0.
        let base = i * ncols;
        for v in &mut s.tab[base..base + ncols] {
            *v = -*v;
        }
        let col = n + m + k;
        s.tab[base + col] = 1.0;
        s.basis[i] = col;
        s.x_basic[i] = -residual[i];
        state[col] = NbState::Basic;
        state[n + i] = NbState::AtLower; // slack rests at zero
        s.banned[col] = true; // artificials may only leave
    }
    for i in 0..m {
        if residual[i] >= 0.0 {
            s.basis[i] = n + i;
            s.x_basic[i] = residual[i];
            state[n + i] = NbState::Basic;
        }
    }
    s.state = state;

    let cap = p
        .pivot_cap
        .unwrap_or_else(|| 10usize.saturating_mul((m + ncols).saturating_mul(m + ncols)));
    let mut pivots = 0usize;

    // Phase 1: minimize the artificial sum.
    if n_art > 0 {
        for i in 0..m {
            if s.basis[i] >= n + m {
                let base = i * ncols;
                for j in 0..ncols {
                    s.rc[j] -= s.tab[base + j];
                }
            }
        }
        match run_simplex(&mut s, &mut pivots, cap) {
            StepOutcome::Optimal => {}
            StepOutcome::Unbounded => unreachable!("phase 1 objective bounded below"),
            StepOutcome::IterationLimit => return Err(Error::IterationLimit(pivots)),
        }
        let phase1: f64 = (0..m)
            .filter(|&i| s.basis[i] >= n + m)
            .map(|i| s.x_basic[i])
            .sum();
        if phase1 > FEAS_TOL {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, n, m));
        }
        // drive leftover artificials out; dependent rows get neutralized
        for i in 0..m {
            if s.basis[i] >= n + m {
                let mut pivot_col = None;
                for j in 0..n + m {
                    if s.tab[i * ncols + j].abs() > 1e-9 {
                        pivot_col = Some(j);
                        break;
                    }
                }
                match pivot_col {
                    Some(j) => {
                        let old = s.basis[i];
                        let value = s.nonbasic_value(j);
                        s.state[old] = NbState::AtLower;
                        s.pivot(i, j);
                        s.basis[i] = j;
                        s.state[j] = NbState::Basic;
                        s.x_basic[i] = value; // departing artificial was at ~0
                    }
                    None => {
                        let base = i * ncols;
                        for v in &mut s.tab[base..base + ncols] {
                            *v = 0.0;
                        }
                        let art = s.basis[i];
                        s.tab[base + art] = 1.0;
                        s.x_basic[i] = 0.0;
                    }
                }
            }
        }
    }

    s.active_cols = n + m; // artificials never re-enter

    // Phase 2 cost row.
    for v in &mut s.rc {
        *v = 0.0;
    }
    for j in 0..n {
        s.rc[j] = p.objective[j];
    }
    for i in 0..m {
        let b = s.basis[i];
        let cb = if b < n { p.objective[b] } else { 0.0 };
        if cb != 0.0 {
            let base = i * ncols;
            for j in 0..ncols {
                s.rc[j] -= cb * s.tab[base + j];
            }
        }
    }

    match run_simplex(&mut s, &mut pivots, cap) {
        StepOutcome::Optimal => {}
        StepOutcome::Unbounded => return Ok(LpSolution::non_optimal(LpStatus::Unbounded, n, m)),
        StepOutcome::IterationLimit => return Err(Error::IterationLimit(pivots)),
    }

    let mut x = vec![0.0; n];
    for j in 0..n {
        x[j] = match s.state[j] {
            NbState::AtLower => s.lo[j],
            NbState::AtUpper => s.up[j],
            NbState::AtZero => 0.0,
            NbState::Basic => 0.0, // filled below
        };
    }
    for i in 0..m {
        if s.basis[i] < n {
            x[s.basis[i]] = s.x_basic[i];
        }
    }

    // duals: lambda_i = -(reduced cost of slack i); dual objective from the
    // cost row and bound activities, independent of the primal values
    let mut dual = vec![0.0; m];
    let mut dual_obj = 0.0;
    for i in 0..m {
        let lambda = (-s.rc[n + i]).min(0.0);
        dual[i] = lambda;
        dual_obj += lambda * p.rhs[i];
    }
    for j in 0..n {
        match s.state[j] {
            NbState::AtLower => dual_obj += s.rc[j] * s.lo[j],
            NbState::AtUpper => dual_obj += s.rc[j] * s.up[j],
            _ => {}
        }
    }

    let objective = dot(&p.objective, &x);
    let mut basis: Vec<usize> = s.basis.clone();
    basis.sort_unstable();

    if std::env::var("LP_DEBUG").is_ok() {
        eprintln!("[lp] rows={m} cols={ncols} pivots={pivots}");
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        dual,
        dual_objective: dual_obj,
        basis,
        nodes_explored: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_lp() -> LpProblem {
        // min -x - y  s.t. x + y <= 1, x, y >= 0
        let mut p = LpProblem::new(2);
        p.objective = vec![-1.0, -1.0];
        p.set_bounds(0, 0.0, f64::INFINITY);
        p.set_bounds(1, 0.0, f64::INFINITY);
        p.add_row(vec![1.0, 1.0], 1.0);
        p
    }

    #[test]
    fn single_facet_optimum() {
        let sol = solve_lp(&simple_lp()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_bounds_vs_row() {
        // min x s.t. x <= -1, x >= 0
        let mut p = LpProblem::new(1);
        p.objective = vec![1.0];
        p.set_bounds(0, 0.0, f64::INFINITY);
        p.add_row(vec![1.0], -1.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut p = LpProblem::new(1);
        p.objective = vec![-1.0];
        p.set_bounds(0, 0.0, f64::INFINITY);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn duals_satisfy_sign_and_strong_duality() {
        let sol = solve_lp(&simple_lp()).unwrap();
        assert!(sol.dual[0] <= 1e-12);
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()));
        // complementary slackness on the single row
        let slack = 1.0 - (sol.x[0] + sol.x[1]);
        assert!((sol.dual[0] * slack).abs() <= 1e-6);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min x + y s.t. -x - y <= -4, y <= 10, x free, y free
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 1.0];
        p.add_row(vec![-1.0, -1.0], -4.0);
        p.add_row(vec![0.0, 1.0], 10.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 4.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_variable_stays_pinned() {
        let mut p = LpProblem::new(2);
        p.objective = vec![1.0, 2.0];
        p.set_bounds(0, 3.0, 3.0);
        p.set_bounds(1, 0.0, f64::INFINITY);
        p.add_row(vec![-1.0, -1.0], -5.0); // x + y >= 5
        let sol = solve_lp(&p).unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.x[1] - 2.0).abs() < 1e-8);
        assert!((sol.objective - 7.0).abs() < 1e-8);
    }

    #[test]
    fn bound_flips_reach_box_corner() {
        // pure box problem: optimum at a mixed corner without any rows
        let mut p = LpProblem::new(3);
        p.objective = vec![1.0, -2.0, 3.0];
        for j in 0..3 {
            p.set_bounds(j, -1.0, 2.0);
        }
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.x, vec![-1.0, 2.0, -1.0]);
        assert!((sol.objective + 8.0).abs() < 1e-9);
    }

    #[test]
    fn milp_prefers_integer_vertex() {
        // max 3a + 2b s.t. a + b <= 1, binary -> min -3a - 2b
        let mut p = LpProblem::new(2);
        p.objective = vec![-3.0, -2.0];
        p.set_binary(0);
        p.set_binary(1);
        p.add_row(vec![1.0, 1.0], 1.0);
        let sol = solve_milp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < INT_TOL);
        assert!(sol.x[1].abs() < INT_TOL);
    }

    #[test]
    fn integral_relaxation_needs_no_branching() {
        let mut p = LpProblem::new(1);
        p.objective = vec![-1.0];
        p.set_binary(0);
        let sol = solve_milp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.nodes_explored <= 1);
        assert!((sol.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn determinism_of_basis() {
        let p = simple_lp();
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        assert_eq!(a.basis, b.basis);
    }

    #[test]
    fn compact_singleton_rows_moves_bounds() {
        let mut p = LpProblem::new(2);
        p.add_row(vec![1.0, 0.0], 5.0); // x <= 5
        p.add_row(vec![-2.0, 0.0], 4.0); // x >= -2
        p.add_row(vec![1.0, 1.0], 3.0);
        p.compact_singleton_rows();
        assert_eq!(p.n_rows(), 1);
        assert_eq!(p.upper[0], 5.0);
        assert_eq!(p.lower[0], -2.0);
    }
}
