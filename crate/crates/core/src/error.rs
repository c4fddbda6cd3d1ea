use alloc::string::String;

/// Errors reported by the solvers.
///
/// The variants are grouped so that a front end can map them onto distinct
/// exit codes: argument and physics violations, solver breakdowns, and
/// accuracy-contract failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A physical admissibility condition on the medium is violated
    /// (λ ≤ 0, Re n ≤ 0 or Im n < 0).
    #[error("inadmissible medium: {0}")]
    Physics(String),

    /// Evaluation at a point where the function is singular or undefined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument outside the documented accuracy range of a special function.
    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("accuracy contract violated: {0}")]
    Accuracy(String),

    #[error("ill-conditioned system (condition number {cond:.3e}): {hint}")]
    IllConditioned { cond: f64, hint: String },

    /// Per-mode matching system is singular.
    #[error("resonance in angular mode {mode}: matching determinant {det:.3e}")]
    Resonance { mode: i64, det: f64 },

    #[error("mode truncation: tail {tail:.3e} exceeds tolerance {tol:.3e} at cutoff {cutoff}")]
    Truncation { tail: f64, tol: f64, cutoff: usize },

    /// Wave number too close to an interior transmission eigenvalue.
    #[error("ill-posed: k = {k} lies within {dist:.3e} of a transmission eigenvalue of mode {mode}")]
    IllPosed { mode: i64, k: f64, dist: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("iterative solver did not converge: {0}")]
    NoConvergence(String),

    /// Wraps an error raised while processing member `index` of a sequence.
    #[error("source {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at(self, index: usize) -> Self {
        Error::AtIndex {
            index,
            source: alloc::boxed::Box::new(self),
        }
    }

    /// The innermost error, with sequence annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIndex { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
