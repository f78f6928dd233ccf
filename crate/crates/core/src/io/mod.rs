//! Instance file formats and CSV artifact writers.
//!
//! Two instance formats are supported: a native JSON schema that carries
//! workgroups and the display tick scale, and the single-mode PSPLIB `.sm`
//! benchmark layout. Both parse into the same validated [`Instance`];
//! parsing never yields a silently invalid instance.
//!
//! [`Instance`]: crate::model::Instance

mod csv_out;
mod native;
mod psplib;

pub use csv_out::{write_convergence, write_schedule};
pub use native::{parse_native, serialize_native};
pub use psplib::parse_psplib;

use crate::model::ValidationReport;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum IoError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("parsed instance is invalid: {0}")]
    Invalid(ValidationReport),
}

impl IoError {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        IoError::Json { line: err.line(), column: err.column(), message: err.to_string() }
    }
}
