//! Numerical toolbox for position-based coding over quantum channels and
//! the quantum hypothesis-testing quantities that drive it: entropic
//! functionals, optimal binary tests, exact square-root-measurement decoder
//! simulation for point-to-point and multiple-access codes, typical and
//! relative typical projectors, and rate-region computations.

pub mod entropy;
pub mod hyptest;
pub mod io;
pub mod linalg;
pub mod mac;
pub mod op;
pub mod p2p;
pub mod random;
pub mod typicality;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian within tolerance (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not positive semi-definite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("trace {actual:.6} outside expected range {expected}")]
    BadTrace { actual: f64, expected: String },
    #[error("Kraus family is not trace preserving (defect {defect:.3e})")]
    NotCptp { defect: f64 },
    #[error("subsystem dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid subsystem index {index} (have {count} subsystems)")]
    InvalidIndex { index: usize, count: usize },
    #[error("dimension budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances. Chosen for double-precision eigensolvers on
/// operators of order up to a few thousand.
pub mod tol {
    /// Hermiticity check at construction.
    pub const HERM: f64 = 1e-10;
    /// Trace-preservation check for Kraus families.
    pub const CPTP: f64 = 1e-10;
    /// Eigenvalue floor for PSD checks.
    pub const PSD: f64 = 1e-10;
    /// Trace bookkeeping slack.
    pub const TR: f64 = 1e-10;
    /// Relative eigenvalue cutoff for spectral-projection membership.
    pub const EIG_REL: f64 = 1e-12;
    /// Relative cutoff below which eigenvalues count as kernel in
    /// pseudo-powers and logarithms.
    pub const SUPPORT_REL: f64 = 1e-12;
    /// Eigenvalue clipping before logarithms.
    pub const LOG_CLIP: f64 = 1e-14;
}
