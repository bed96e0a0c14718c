use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("step distribution has empty support")]
    EmptySupport,

    #[error("negative weight {weight} at offset {offset}")]
    NegativeWeight { offset: i64, weight: f64 },

    #[error("weights sum to {sum}, which is more than 1e-9 away from 1")]
    MassNotNormalizable { sum: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("horizon needs {requested} lattice entries, budget is {budget}")]
    HorizonTooLarge { requested: u64, budget: u64 },

    #[error("ladder-height deficit {deficit:e} still above tolerance {tol:e}")]
    SlowConvergence { deficit: f64, tol: f64 },

    #[error("row {row} leaks {deficit:e} mass past the truncation window")]
    TruncationTooSevere { row: usize, deficit: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("operator windows differ: {0}")]
    WindowMismatch(String),

    #[error("bridge conditioning event has zero probability")]
    ImpossibleBridge,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature stalled at error estimate {error:e} (tolerance {tol:e})")]
    QuadratureFailure { error: f64, tol: f64 },

    #[error("path {path}: w_X({delta}) = {w_x} exceeds w_S({delta}) = {w_s}")]
    InvariantViolation {
        path: usize,
        delta: f64,
        w_x: f64,
        w_s: f64,
    },

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
