use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-physical parameters: {0}")]
    NonPhysicalParams(String),

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("Kraus operators are not complete (max defect {defect:e})")]
    IncompleteChannel { defect: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("degenerate collective coupling: gamma12^+ = {plus:e}, gamma12^- = {minus:e}")]
    DegenerateCoupling { plus: f64, minus: f64 },

    #[error("state structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("integration step too large: {0}")]
    StepSizeTooLarge(String),

    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),

    #[error("branch assignment ambiguous near t = {t}; refine the grid")]
    GridTooCoarse { t: f64 },

    #[error("no sign change on [{lo}, {hi}] (f = {f_lo:e}, {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid field `{field}`: {message}")]
    InvalidField { field: String, message: String },

    #[error("unknown scenario `{0}` (expected fig1..fig5 or a config file)")]
    UnknownScenario(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for configuration problems as opposed to numerical failures.
    pub fn is_parse_error(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::InvalidField { .. } | Error::UnknownScenario(_) => true,
            Error::Scenario { source, .. } => source.is_parse_error(),
            _ => false,
        }
    }

    pub fn is_io_error(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Scenario { source, .. } => source.is_io_error(),
            _ => false,
        }
    }
}
