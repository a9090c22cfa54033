//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by chart construction, evaluation, and verification plumbing.
///
/// Payloads are kept scalar-free (`String`/`f64`) so the error type does not
/// have to be generic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("chart '{chart}': {msg}")]
    Chart { chart: String, msg: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("charts differ in {context}: '{left}' vs '{right}'")]
    ChartMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("non-finite evaluation while differencing coordinate '{coord}' near {point}")]
    NonFiniteEval { coord: String, point: String },

    #[error("singular linear system in {context}")]
    Singular { context: &'static str },

    #[error("2-form degenerate at sampled point {point}")]
    Degenerate { point: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification mismatch in {context}: residual {residual:e} exceeds {tolerance:e}")]
    Mismatch {
        context: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("integration produced a non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("fixed-point iteration failed to converge within {max_iters} iterations")]
    NoConvergence { max_iters: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Render the leading coordinates of a point for error messages.
pub fn fmt_point<S: crate::scalar::Real>(x: &[S]) -> String {
    let body: Vec<String> = x.iter().take(8).map(|v| format!("{v:.6e}")).collect();
    let ell = if x.len() > 8 { ", …" } else { "" };
    format!("({}{})", body.join(", "), ell)
}
