use crate::C64;

/// Errors raised by the library. The CLI maps every variant to exit code 2
/// except [`Error::Inconclusive`], which maps to 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pole of Phi: z*s = 2 at z = {z}, s = {s}")]
    PolePoint { z: C64, s: C64 },
    #[error("coincident points: {0}")]
    Coincident(String),
    #[error("root finding did not converge for a polynomial of degree {0}")]
    RootFinding(usize),
    #[error("zero {0} lies within 1e-10 of the unit circle or outside the disc")]
    ZeroNotInDisc(C64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("data not extremal: {0}")]
    NotExtremal(String),
    #[error("matrix {0} is a scalar multiple of the identity; the reduction to Gamma-data is not faithful")]
    ScalarMatrix(usize),
    #[error("matrix {0} has spectral radius > 1 (trace/determinant outside Gamma)")]
    SpectralRadius(usize),
    #[error("bisection failed: {0}")]
    Bisection(String),
    #[error("search inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
