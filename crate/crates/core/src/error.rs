use thiserror::Error;

/// Errors produced by the estimation and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied input was violated.
    #[error("invalid input: {0}")]
    Input(String),

    /// All sample values are equal; the Fréchet likelihood has no maximizer.
    #[error("degenerate sample: all {count} values equal {value}")]
    DegenerateSample { value: f64, count: usize },

    /// The profile-score root solver ran out of bracket or iterations.
    #[error("solver did not converge: {reason} (bracket [{lo}, {hi}])")]
    NoConvergence { reason: String, lo: f64, hi: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error(
        "quadrature did not reach tolerance {tolerance:e}: achieved {achieved:e} \
         after {intervals} intervals"
    )]
    Quadrature {
        tolerance: f64,
        achieved: f64,
        intervals: usize,
    },

    /// A downstream estimation step failed (e.g. Hill with a nonpositive threshold).
    #[error("estimation failed: {0}")]
    Estimation(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
