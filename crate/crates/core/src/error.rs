use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),

    #[error("unsupported colex dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("invalid colex: {0}")]
    InvalidColex(String),

    #[error("colex file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("pathological colex: {0}")]
    Pathological(String),

    #[error("color pair {pair} is not compatible with facet {facet}")]
    IncompatiblePair { pair: String, facet: String },

    #[error("code construction: {0}")]
    Code(String),

    #[error("stabilizer condition violated: {0}")]
    StabilizerCondition(String),

    #[error("{what}: {n} exceeds the limit of {max}")]
    TooLarge { what: &'static str, n: usize, max: usize },

    #[error("matching: {0}")]
    Matching(String),

    #[error("no correction realizes the syndrome: {0}")]
    NoCorrection(String),

    #[error("schedule: {0}")]
    Schedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
