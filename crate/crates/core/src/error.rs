use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KgError {
    #[error("grid size n={0} must be a power of two and at least 16")]
    BadGridSize(usize),
    #[error("grid length must be positive, got {0}")]
    BadLength(f64),
    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("symbol returned a non-finite value at xi={0}")]
    NonFiniteSymbol(f64),
    #[error("bilinear symbol returned a non-finite value at ({0}, {1})")]
    NonFiniteBilinear(f64, f64),
    #[error("mass must be positive, got {0}")]
    BadMass(f64),
    #[error("metric component g00 vanishes or changes sign at (u, u_t, u_x) = ({0}, {1}, {2})")]
    DegenerateMetric(f64, f64, f64),
    #[error("model violates the origin normalization: {0}")]
    BadNormalization(String),
    #[error("unsupported model channel: {0}")]
    UnsupportedChannel(String),
    #[error("non-finite value in nonlinear evaluation at t={0}")]
    BlowUp(f64),
    #[error("time step {dt} exceeds the CFL bound {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, KgError>;
