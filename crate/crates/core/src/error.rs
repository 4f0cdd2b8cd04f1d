use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported weight {0}: built-in level-one forms exist for weights 12, 16, 18, 20, 22, 26")]
    UnsupportedWeight(u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("network error: {0}")]
    Network(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("no cached coefficients for {label} in {} and offline mode forbids fetching", dir.display())]
    CacheMiss { label: String, dir: PathBuf },

    #[error("Deligne bound violated at p = {p}: normalized eigenvalue {lambda}")]
    DeligneViolation { p: u64, lambda: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),

    #[error("coefficient table too short: need {needed} terms, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("root number ambiguous for d = {d}: both sign hypotheses consistent (residuals {plus:e}, {minus:e}; threshold {threshold:e})")]
    AmbiguousRootNumber { d: i64, plus: f64, minus: f64, threshold: f64 },

    #[error("root number undetermined for d = {d}: neither sign hypothesis consistent (residuals {plus:e}, {minus:e}; threshold {threshold:e})")]
    InconsistentRootNumber { d: i64, plus: f64, minus: f64, threshold: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("dyadic sweep needs at least 3 blocks, got {0}")]
    InsufficientBlocks(usize),

    #[error("missing central value for d = {d}, form {label}")]
    MissingValue { d: i64, label: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::UnsupportedWeight(_) => 2,
            Error::Resource(_)
            | Error::Network(_)
            | Error::CacheMiss { .. }
            | Error::Io(_)
            | Error::InsufficientCoefficients { .. } => 3,
            _ => 1,
        }
    }
}
