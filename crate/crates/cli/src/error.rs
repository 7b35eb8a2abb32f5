//! Exit-code classification.

use std::fmt;
use std::path::Path;

use kuramoto_core::KuramotoError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Malformed input file or argument, with a position when there is one.
#[derive(Debug)]
pub struct InputError {
    pub message: String,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }

    pub fn at(path: &Path, line: u64, col: usize, message: impl fmt::Display) -> Self {
        Self::new(format!("{}:{line}:{col}: {message}", path.display()))
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for InputError {}

/// A computation finished but its result did not pass a check.
#[derive(Debug)]
pub struct ValidationFailure(pub String);

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<InputError>() {
            return EXIT_USAGE;
        }
        if cause.is::<ValidationFailure>() {
            return EXIT_VALIDATION;
        }
        if let Some(k) = cause.downcast_ref::<KuramotoError>() {
            return match k {
                KuramotoError::LengthMismatch { .. }
                | KuramotoError::NonFinite { .. }
                | KuramotoError::InvalidParameter { .. }
                | KuramotoError::SelfLoop { .. }
                | KuramotoError::NotCirculant { .. }
                | KuramotoError::MissingCoefficient { .. } => EXIT_USAGE,
                _ => EXIT_VALIDATION,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_VALIDATION
}
