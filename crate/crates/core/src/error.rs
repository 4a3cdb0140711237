use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coherent state leaks past the Fock truncation (norm deficit {deficit:.3e})")]
    Truncation { deficit: f64 },

    #[error("integration diverged: trace = {trace}")]
    Divergence { trace: f64 },

    #[error("step size {step} exceeds the stability limit {limit}")]
    StepSize { step: f64, limit: f64 },

    #[error("only {qualifying} samples lie inside the fit window (need at least {required})")]
    FitWindow { qualifying: usize, required: usize },

    #[error("signal is non-positive at t = {time} inside the fit window")]
    NonPositiveSignal { time: f64 },

    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),

    #[error("window needs {needed} samples but only {available} are available")]
    Window { needed: usize, available: usize },

    #[error("averaging window {window} is not shorter than the record ({duration})")]
    WindowTooLong { window: f64, duration: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
