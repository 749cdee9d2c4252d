use thiserror::Error;

/// Everything that can go wrong while building or chasing through the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("ill-defined homomorphism: {0}")]
    IllDefinedHom(String),

    #[error("groups do not match: {0}")]
    MismatchedGroups(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("exactness violated: {0}")]
    NotExact(String),

    #[error("map does not descend to the subquotients: {0}")]
    DoesNotDescend(String),

    #[error("invalid action spec: {0}")]
    InvalidSpec(String),

    #[error("missing second-page differential data: {0}")]
    MissingD2(String),

    #[error("higher differentials cannot be verified: {0}")]
    UnverifiedHigherDifferentials(String),

    #[error("pointwise-inner constraint violated: {0}")]
    PointwiseInner(String),

    #[error("diagram chase failed: {0}")]
    ChaseFailure(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn dims(
        context: impl Into<String>,
        expected: impl std::fmt::Display,
        found: impl std::fmt::Display,
    ) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
