use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("Fock cutoff n_max must be at least {min}, got {actual}")]
    CutoffTooSmall { min: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("state outside measurement span (weight {0:e} outside)")]
    OutsideMeasurementSpan(f64),

    #[error("measurement basis is not orthonormal (deviation {0:e})")]
    BasisNotOrthonormal(f64),

    #[error("Fock cutoff too small: |up, n_max> is populated with weight {0:e}")]
    FockLeakage(f64),

    #[error("binomial states have different photon numbers ({0} vs {1})")]
    PhotonNumberMismatch(usize, usize),

    #[error("photon number {0} exceeds the supported maximum of 64")]
    PhotonNumberTooLarge(usize),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no retained shots for setting {0}")]
    NoRetainedShots(usize),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
