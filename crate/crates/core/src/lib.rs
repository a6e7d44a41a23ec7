//! Failure-probability estimation for systems whose performance is sometimes
//! undefined, using a hierarchical Gaussian-process surrogate inside an
//! adaptive-Kriging Monte Carlo loop.

pub mod active_learning;
pub mod baselines;
pub mod benchmarks;
pub mod classification;
pub mod error;
pub mod experiment;
pub mod hierarchical;
pub mod kernels;
pub mod metrics;
pub mod regression;
pub mod surrogate;

pub use error::{Error, Result};
