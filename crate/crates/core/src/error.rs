use thiserror::Error;

/// Errors raised by the synthesis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument or configuration value violates its documented range or invariant.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },

    /// The sidelobe Gram matrix could not be factorized.
    #[error("gram matrix is singular: Cholesky factorization failed at pivot {pivot} of {dim}; add diagonal loading or densify the sidelobe grid")]
    SingularGram { pivot: usize, dim: usize },

    /// The mainlobe steering columns are linearly dependent.
    #[error("degenerate mainlobe constraints: Cholesky factorization of the reduced constraint matrix failed at pivot {pivot} of {dim}")]
    DegenerateConstraint { pivot: usize, dim: usize },

    /// A per-symbol solve failed; wraps the underlying cause.
    #[error("symbol {index} ({label}): {source}")]
    Symbol {
        index: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    /// Two objects that must agree in size do not.
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
