use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent {0} outside the subcritical range (1, 5)")]
    InvalidExponent(f64),
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sample length {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("profiles live on different grids")]
    GridMismatch,
    #[error("dilation factor must be positive, got {0}")]
    NonpositiveDilation(f64),
    #[error("potential well W = {0} is not positive; the dilation ray never meets the Pohozaev manifold")]
    NoProjection(f64),
    #[error("state is identically zero")]
    ZeroState,
    #[error("shooting amplitude must be positive, got {0}")]
    NonpositiveAmplitude(f64),
    #[error("shooting trajectory blew up at r = {0}")]
    Blowup(f64),
    #[error("no TurnsUp/Crosses sign change in [{a_min}, {a_max}]")]
    BracketFailure { a_min: f64, a_max: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("no initialization has a positive potential well")]
    InfeasibleStart,
    #[error("coupling beta = {0} must be positive for the radial pipeline")]
    NegativeBeta(f64),
    #[error("certification failed on {clause}: {detail}")]
    CertificationFailure { clause: String, detail: String },
    #[error("bracket endpoints have the same kind")]
    InvalidBracket,
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
