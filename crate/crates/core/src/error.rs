use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },

    #[error("element does not belong to the expected algebra: {0}")]
    OwnerMismatch(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("division by a non-unit: {0}")]
    NotAUnit(String),

    #[error("invalid morphism: relation `{relation}` maps to `{image}`")]
    InvalidMorphism { relation: String, image: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exponent cap {cap} exceeded while {context}")]
    CapExceeded { cap: u32, context: String },

    #[error("algebra is not finite-enumerable: {0}")]
    NotEnumerable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a cover: 1 is not in the ideal generated by {0}")]
    NotACover(String),

    #[error("incompatible family: pieces {i} and {j} disagree ({left} vs {right})")]
    Incompatible {
        i: usize,
        j: usize,
        left: String,
        right: String,
    },

    #[error("invalid gluing data: {0}")]
    InvalidGluing(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("internal verification failed: {0}")]
    Defect(String),
}

impl Error {
    pub(crate) fn parse_at(text: &str, offset: usize, message: impl Into<String>) -> Error {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
