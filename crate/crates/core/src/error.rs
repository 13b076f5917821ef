use num_complex::Complex64;

/// Failures raised by evaluation, construction and solving.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("nome out of range: Im(tau) = {0} must be positive")]
    NomeOutOfRange(f64),
    #[error("non-finite argument to {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("denominator near zero: {factor}")]
    DenominatorNearZero { factor: &'static str },
    #[error("square-root radicand near the branch cut: {factor}")]
    BranchSuspect { factor: &'static str },
    #[error("G(q) evaluated inside the ill-conditioned window around q = eta")]
    IllConditioned,
    #[error("operands live on different spaces: {0}")]
    SpaceMismatch(String),
    #[error("roots {i} and {j} collide (distance {distance:e})")]
    RootCollision { i: usize, j: usize, distance: f64 },
    #[error("no convergence after {restarts} restarts; best residual {best_residual:e}")]
    NoConvergence {
        restarts: usize,
        best_residual: f64,
        best_roots: Vec<Complex64>,
    },
}

impl Error {
    /// True for errors that only say the sample point is not generic.
    pub fn is_nongeneric(&self) -> bool {
        matches!(
            self,
            Error::DenominatorNearZero { .. }
                | Error::BranchSuspect { .. }
                | Error::IllConditioned
                | Error::RootCollision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
