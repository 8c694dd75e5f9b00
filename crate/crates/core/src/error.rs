use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("wave vector has zero length")]
    ZeroWaveVector,

    #[error("spatial part of the 4-momentum is zero")]
    ZeroSpatialK,

    #[error("modes belong to different boxes")]
    MixedBox,

    #[error("shape mismatch: expected {expected} points, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("field is not transverse (residual {residual:.3e})")]
    NonTransverse { residual: f64 },

    #[error("field is not real in the E, B representation (imaginary part {imag:.3e})")]
    NonRealField { imag: f64 },

    #[error("{what} exceeds desk-scale budget: {size} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
