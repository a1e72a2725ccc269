//! Worst-mode boundary Neumann energy on model planar domains: exact spectra,
//! the truncated design problem and its closed-form validators.

pub mod functional;
pub mod geometry;
pub mod nogap;
mod lp;
pub mod optimizer;
pub mod quad;
pub mod specfun;
pub mod spectra;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("{op} is not available on {kind}")]
    Unsupported { op: &'static str, kind: &'static str },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("no sign change bracketing zero {k} of J_{nu}")]
    Bracket { nu: f64, k: usize },
    #[error("point is not on the {0} boundary")]
    PointMismatch(&'static str),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
