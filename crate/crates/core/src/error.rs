use thiserror::Error;

/// Failure modes shared by every engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("argument outside asymptotic wedge: {0}")]
    Wedge(String),
    #[error("series did not converge: {0}")]
    Convergence(String),
    #[error("branch cut: {0}")]
    Branch(String),
    #[error("quadrature: {0}")]
    Quad(String),
    #[error("integrand returned a non-finite value at x = {0}")]
    Eval(f64),
    #[error("tail truncation: {0}")]
    Tail(String),
    #[error("oscillation too fast: {0}")]
    Oscillation(String),
    #[error("q below supported floor: {0}")]
    SmallQ(String),
    #[error("nu too close to -1: {0}")]
    NuPole(String),
    #[error("exponent bookkeeping overflow: {0}")]
    OverflowGuard(String),
    #[error("contour point too close to a pole: {0}")]
    PoleProximity(String),
    #[error("frozen strike must be positive: {0}")]
    NonpositiveStrike(String),
}

impl Error {
    /// Refusals that a caller may route to another engine.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::SmallQ(_) | Error::Oscillation(_) | Error::NuPole(_)
        )
    }

    /// Errors caused by invalid input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NonpositiveStrike(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
