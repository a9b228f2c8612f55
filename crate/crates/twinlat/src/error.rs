use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("window mismatch: {0}")]
    WindowMismatch(String),
    #[error("matrix is not invertible over the Laurent ring")]
    NotInvertible,
    #[error("flag members are not nested: {0}")]
    NotNested(String),
    #[error("periodicity violated: {0}")]
    PeriodicityViolated(String),
    #[error("variant constraint violated: {0}")]
    VariantConstraintViolated(String),
    #[error("lattice is not isotropic")]
    NotIsotropic,
    #[error("oriflamme constraint violated: {0}")]
    OriflammeConstraintViolated(String),
    #[error("generator index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("flag is not subjacent to the frame")]
    NotSubjacent,
    #[error("flags are not compatible: {0}")]
    NotCompatible(String),
    #[error("side mismatch: {0}")]
    SideMismatch(String),
    #[error("chambers are not opposite")]
    NotOpposite,
    #[error("no twin apartment found within the window bound")]
    NoTwinApartmentFound,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}
