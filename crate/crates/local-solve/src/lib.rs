//! Estimate a single component `x_i` of the solution to `x = Gx + z`
//! (equivalently `Ax = b`) using residual-based coordinate updates.
//!
//! The crate provides:
//! - sparse storage and kernels ([`sparse`]),
//! - constructions of fixed-point systems from linear systems, network
//!   centralities, and random graphs ([`system`]),
//! - the synchronous and asynchronous solver core ([`solver`]),
//! - coordinate update schedulers ([`sched`]),
//! - a logical simulator of interleaved asynchronous execution ([`sim`]),
//! - dense ground-truth oracles for testing ([`oracle`]),
//! - a batch runner for seed sweeps ([`batch`]).

pub mod batch;
pub mod cli;
pub mod oracle;
pub mod sched;
pub mod sim;
pub mod solver;
pub mod sparse;
pub mod system;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("zero diagonal entry in row {row}")]
    ZeroDiagonal { row: usize },
    #[error("row {row} is not stochastic (sum {sum})")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("matrix is not symmetric (rows {row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite (eigenvalue {eigenvalue})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("matrix is singular (pivot {pivot} in column {col})")]
    Singular { pivot: f64, col: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("scheduler requires a nonempty residual")]
    EmptyResidual,
    #[error("walk enumeration budget of {budget} expansions exceeded")]
    EnumerationBudget { budget: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
