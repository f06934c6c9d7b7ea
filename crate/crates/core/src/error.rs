use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("missing value for variable `{0}`")]
    MissingVariable(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation failed at row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("column `{0}` is constant and cannot be normalized")]
    ConstantColumn(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("correlation undefined: {0} is constant")]
    UndefinedCorrelation(&'static str),

    #[error("linear system is singular or ill-conditioned (condition estimate {condition:e}); try a smaller phi or sigma, or a wider kernel")]
    IllConditioned { condition: f64 },

    #[error("csv error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("config error in [{section}] {key}: {message}")]
    Config { section: String, key: String, message: String },

    #[error("model file error at line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_row(self, row: usize) -> Self {
        Error::Row { row, source: Box::new(self) }
    }

    /// Short stable identifier for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UnknownFunction { .. } => "unknown_function",
            Error::UnknownIdentifier { .. } => "unknown_identifier",
            Error::MissingVariable(_) => "missing_variable",
            Error::DivisionByZero => "division_by_zero",
            Error::Domain(_) => "domain",
            Error::Row { .. } => "evaluation",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::ConstantColumn(_) => "constant_column",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::Csv { .. } => "csv",
            Error::Config { .. } => "config",
            Error::ModelFormat { .. } => "model_format",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
