use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid process: {0}")]
    InvalidProcess(String),

    #[error("ancilla width must be positive and finite, got {0}")]
    NonpositiveWidth(f64),

    #[error("bad grid specification: {0}")]
    BadGridSpec(String),

    #[error("bad quadrature specification: {0}")]
    BadQuadratureSpec(String),

    #[error("slice at tau0 = {tau0} lies beyond {limit} (6 tau-spreads); Gaussian division is meaningless there")]
    SliceTooFarOut { tau0: f64, limit: f64 },

    #[error("ancilla grid [{lo}, {hi}) cannot hold a packet centred at {centre} with 8-sigma padding")]
    GridWraparound { lo: f64, hi: f64, centre: f64 },

    #[error("point w = {w} is outside the interior of the ancilla grid")]
    OutOfGrid { w: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("scenario file: {0}")]
    ScenarioFile(String),
}
