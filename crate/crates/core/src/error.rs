//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of model construction, numerical evaluation and estimation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A type invariant was violated at construction time.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was called outside its domain (e.g. a density at t <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested evaluation would overflow the double range.
    #[error("range error: {0}")]
    Range(String),

    /// A simulation or run configuration is unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// Parameter estimation failed on the given data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A numerical procedure produced an unusable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },
}

impl Error {
    /// True for errors caused by bad inputs rather than by numerical trouble.
    ///
    /// Front ends use this to distinguish validation failures (usage errors)
    /// from run-time numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Domain(_) | Error::Config(_)
        )
    }
}
