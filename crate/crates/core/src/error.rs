use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedField(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear map kills every coordinate of the parametrization")]
    DegenerateProjection,

    #[error("affine map has rank {rank}, expected {expected}")]
    RankDeficientMap { rank: usize, expected: usize },

    #[error("parametrization vanishes identically at the sampled point")]
    DegeneratePoint,

    #[error("{stage}: no generic point found after {attempts} samples")]
    ResampleExhausted { stage: String, attempts: usize },

    #[error(
        "projection center meets the secant variety (dim SX {expected} dropped to {got}); \
         resample with another seed"
    )]
    ProjectionHitSecant { expected: usize, got: usize },

    #[error("unknown variety key `{0}`")]
    UnknownVariety(String),
}

impl Error {
    /// Errors caused by unlucky random samples rather than bad input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::ResampleExhausted { .. }
                | Error::ProjectionHitSecant { .. }
                | Error::DegeneratePoint
        )
    }
}
