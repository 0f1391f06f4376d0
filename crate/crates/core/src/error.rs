use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    #[error("CFL violation: lambda*a = {courant} exceeds 1")]
    Cfl { courant: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range (valid {lo}..={hi})")]
    OutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("not enough interior cells: {cells} cells cannot support extrapolation of order {kb}")]
    TooFewCells { cells: usize, kb: usize },

    #[error("half-line window too small: {cells} cells given, at least {required} required")]
    WindowTooSmall { cells: usize, required: usize },

    #[error("quadratic form entries do not sum to zero (sum = {sum:e}, tolerance {tol:e})")]
    NotZeroSum { sum: f64, tol: f64 },

    #[error("stencil is not consistent to the required order: {0}")]
    Inconsistent(String),

    #[error("QR iteration failed to converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("computation budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
