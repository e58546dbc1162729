use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("primary part norm {norm:e} is too small to normalize")]
    ZeroPrimaryPart { norm: f64 },

    #[error("rotation is not unit (|‖r‖ − 1| = {deviation:e})")]
    NonUnitRotation { deviation: f64 },

    #[error("expected a pure quaternion, scalar part is {scalar:e}")]
    NotPure { scalar: f64 },

    #[error("not a unit dual quaternion (norm residual {norm_residual:e}, orthogonality residual {orthogonality_residual:e})")]
    NotOnManifold { norm_residual: f64, orthogonality_residual: f64 },

    #[error("state left the finite region at t = {t} (j = {j})")]
    NonFiniteState { t: f64, j: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
