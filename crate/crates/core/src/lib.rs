//! Maximum-confidence quantum state discrimination.
//!
//! The crate computes, for an ensemble of pure or mixed states, the largest
//! achievable confidence `P(ρ_j | ω_j)` for each state together with a
//! measurement attaining it, and re-derives every result from a bipartite
//! purification in which the right-hand system can never leave a fixed
//! subspace.
//!
//! - [`matcore`]: dense complex matrices, Hermitian eigendecomposition, partial traces.
//! - [`ensemble`]: ensembles, purification, Schmidt decomposition, the allowed subspace.
//! - [`maxconf`]: bounds, optimal effects, measurement completion, Monte Carlo sampling.
//! - [`nosignal`]: conditional right states, leakage and marginal-invariance checks.
//! - [`locc`]: Kraus transformations, monotonicity, filtering and entanglement concentration.
//! - [`cli`]: file formats and the `qconf` command-line tool.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod locc;
pub mod matcore;
pub mod maxconf;
pub mod nosignal;
pub mod random;

pub use ensemble::{BipartiteState, Ensemble, SchmidtDecomposition, State, SubspaceProjector};
pub use error::{Error, Result};
pub use matcore::{Complex, ComplexMatrix, EigenSystem};
pub use maxconf::{ConfidenceReport, Effect, Pom};
