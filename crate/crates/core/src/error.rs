use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("unsupported Dyson index {0}, expected 1, 2 or 4")]
    InvalidBeta(u8),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver failed (info = {0})")]
    Eigensolver(i32),
    #[error("empty energy window at {center} (width {width})")]
    EmptyWindow { center: f64, width: f64 },
    #[error("degenerate resonance between bath states {a} and {b}")]
    DegenerateResonance { a: usize, b: usize },
    #[error("all overlaps of state {0} vanish")]
    DegenerateOverlap(usize),
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("energy {0} lies outside the band")]
    OutOfBand(f64),
    #[error("state norm {0} differs from one")]
    NotNormalized(f64),
    #[error("linear algebra backend is broken: {0}")]
    Backend(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidBeta(_) | Error::InvalidDimension(_) => 2,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 3,
        }
    }
}
