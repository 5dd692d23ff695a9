use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curvature profile: {0}")]
    InvalidProfile(String),

    #[error("warping function became non-positive at t = {t} (h = {h})")]
    NonPositiveH { t: f64, h: f64 },

    #[error("tolerance {tol} not reachable within {max_steps} steps")]
    ToleranceUnreachable { tol: f64, max_steps: usize },

    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("log-derivative h'/h is singular at t = 0")]
    SingularAtZero,

    #[error("moment order must be non-negative, got {0}")]
    NegativeOrder(i64),

    #[error("eta must be positive, got {0}")]
    EtaNonPositive(f64),

    #[error("cap radius {0} is not in (0, pi/2]")]
    DegenerateCap(f64),

    #[error("quadrature underflow: {0}")]
    QuadratureUnderflow(String),

    #[error("no eigenvalue bracket found after {attempts} widenings (last bracket [{lo}, {hi}])")]
    BracketFailure { attempts: usize, lo: f64, hi: f64 },

    #[error("F is still decreasing at the horizon {horizon} with inf F = {inf_f} <= 1/lambda; increase the horizon")]
    HorizonTooSmall { horizon: f64, inf_f: f64 },

    #[error("witness constant c = {c} must exceed 1/lambda = {min}")]
    InvalidC { c: f64, min: f64 },

    #[error("curvature bound b must be positive, got {0}")]
    NonPositiveB(f64),

    #[error("cone aperture {0} is not in (0, pi/2)")]
    DegenerateCone(f64),

    #[error("time step {dt} exceeds (r/50)^2 = {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_range(value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { value, lo, hi })
    }
}
