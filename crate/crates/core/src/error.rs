use thiserror::Error;

/// Errors raised by the builders, solvers and integrators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum KuramotoError {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("self-loop weight {value} at node {node}; pass allow_self_loops to permit it")]
    SelfLoop { node: usize, value: f64 },

    #[error("block matrix requires circulant blocks ({which} is not circulant)")]
    NotCirculant { which: &'static str },

    #[error("missing coefficient for group element {element:?}")]
    MissingCoefficient { element: Vec<usize> },

    #[error("eigensolver did not converge for eigenvalue {value_re}{value_im:+}i (residual {residual:e})")]
    NoConvergence {
        value_re: f64,
        value_im: f64,
        residual: f64,
    },

    #[error("matrix exponential overflow (t*|K|_1 = {scaled_norm:e})")]
    ExpmOverflow { scaled_norm: f64 },

    #[error("state diverged at t = {time}: {detail}")]
    Diverged { time: f64, detail: String },

    #[error("designed equilibrium failed validation: {detail}")]
    DesignRejected { detail: String },
}

pub type Result<T> = std::result::Result<T, KuramotoError>;
