use num_complex::Complex64;
use thiserror::Error;

use crate::special::HalfInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("argument {0} lies on the branch cut along the negative real axis")]
    BranchCut(Complex64),
    #[error("digamma pole at nonpositive integer argument {0}")]
    DigammaPole(HalfInt),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("no convergence within {terms} terms (last term magnitude {last:e})")]
    NoConvergence { terms: usize, last: f64 },
    #[error("{0}")]
    Region(String),
    #[error("no representation covers z = {z} in dimension {dim}")]
    UnsupportedRegion { dim: usize, z: Complex64 },
    #[error("floating-point overflow")]
    Overflow,
    #[error("quadrature cannot reach the requested accuracy (error estimate {estimate:e})")]
    QuadratureAccuracy { estimate: f64 },
}

impl Error {
    pub fn region(msg: impl Into<String>) -> Self {
        Error::Region(msg.into())
    }
}
