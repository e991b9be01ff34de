use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point coincides with the device, so it has no bearing (or distance).
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("insufficient geometry: need at least {required} base stations, got {actual}")]
    InsufficientGeometry { required: usize, actual: usize },

    #[error("index {index} out of range for {len} base stations")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{name} = {value} is outside its domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The conditioning event `N >= l_min` has zero probability.
    #[error("conditional distribution undefined: P(N >= {l_min}) = 0")]
    UndefinedConditional { l_min: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("sample is empty or has no finite values")]
    EmptySample,

    #[error("sample contains NaN")]
    NotANumber,

    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("invalid distribution table: {0}")]
    InvalidTable(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed {file}: {message}")]
    Schema { file: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
