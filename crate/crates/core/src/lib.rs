//! Reflected random walks `X(n + 1) = |X(n) + xi_{n+1}|` on the non-negative
//! integers: exact fluctuation-theory tables, the reflection kernel and its
//! renewal operators, reference limit laws, and a reproducible Monte Carlo
//! harness for the functional limit theorem.

pub mod error;
pub mod kernel;
pub mod lattice;
pub mod limit_laws;
pub mod montecarlo;
pub mod numeric;
pub mod report;
pub mod step_dist;

pub use error::{Error, Result};
pub use kernel::{OperatorSequence, StationaryMeasure, TruncatedKernel};
pub use lattice::{FluctuationTables, LatticePmf};
pub use report::ConvergenceReport;
pub use step_dist::{MomentSummary, StepDistribution, ValidationReport};
