//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: String,
        expected: String,
        got: String,
    },

    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("problem failed validation: {0}")]
    InvalidProblem(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("iteration limit reached after {0} iterations")]
    IterationLimit(usize),

    #[error("uncertainty set is unbounded in coordinate {coordinate}")]
    UnboundedSet { coordinate: usize },

    #[error("uncertainty set is empty")]
    EmptySet,

    #[error("enumeration guard exceeded: {0}")]
    EnumerationGuard(String),

    #[error("constraint blow-up guard exceeded: {rows} rows while eliminating variable {variable}")]
    BlowupGuard { rows: usize, variable: usize },

    #[error("empty recourse interval for variable {variable}: gap {gap:.3e}")]
    EmptyInterval { variable: usize, gap: f64 },

    #[error("stage-1 decision violates the eliminated system: row {row} by {violation:.3e}")]
    StaticSystemViolated { row: usize, violation: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("decision-rule structure is infeasible for this instance")]
    StructureInfeasible,

    #[error("no applicable decision-rule structure: {0}")]
    NoApplicableStructure(String),

    #[error("rule infeasible at vertex {vertex}: slack {slack:.3e}")]
    RuleInfeasible { vertex: usize, slack: f64 },

    #[error("stage-1 decision has no feasible recourse at scenario {scenario:?}")]
    NotAdaptiveFeasible { scenario: Vec<f64> },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
