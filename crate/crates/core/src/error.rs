use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("length mismatch: {left} coupling strengths vs {right} signals")]
    LengthMismatch { left: usize, right: usize },

    #[error("`{field}` out of range: {value} ({expected})")]
    OutOfRange {
        field: String,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid `{field}`: {msg}")]
    Invalid { field: String, msg: String },

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("duration mismatch: {left} vs {right} ticks")]
    DurationMismatch { left: usize, right: usize },
}

impl CoreError {
    pub(crate) fn out_of_range(field: impl Into<String>, value: f64, expected: &'static str) -> Self {
        CoreError::OutOfRange {
            field: field.into(),
            value,
            expected,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CoreError::Invalid {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// Field path the error refers to, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            CoreError::OutOfRange { field, .. } | CoreError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

/// Checks `value` is finite and within `[lo, hi]`.
pub(crate) fn check_unit(field: &str, value: f64) -> Result<()> {
    check_range(field, value, 0.0, 1.0, "expected a value in [0, 1]")
}

pub(crate) fn check_range(field: &str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(CoreError::out_of_range(field, value, expected))
    }
}
