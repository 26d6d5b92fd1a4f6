use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cutoff too small: need dimension {required}, got {dim}")]
    CutoffTooSmall { required: usize, dim: usize },
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("cannot normalize the zero vector")]
    ZeroNorm,
    #[error("expected a two-cavity state, found {0} factor(s)")]
    NotTwoCavity(usize),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("coherent-state tail beyond the cutoff is {0:e}, exceeds 1e-8")]
    CoherentTail(f64),
    #[error("F_z = {0} outside [-1, 1]")]
    FzOutOfRange(f64),
    #[error("state leaks {0:e} of its weight outside the measured subspace")]
    SubspaceLeak(f64),
    #[error("no coincidences recorded for setting pair {0}")]
    NoCoincidences(usize),
    #[error("S_B = {0} does not violate the classical bound; threshold undefined")]
    NoViolation(f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
