use std::fmt;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: malformed files, out-of-range parameters.
    Input,
    /// The requested physics is outside the regime the method covers.
    Regime,
    /// A numerical method failed to converge or resolve its target.
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("tabulated potential evaluated at {phi} outside its range [{lo}, {hi}]")]
    Extrapolation { phi: f64, lo: f64, hi: f64 },

    #[error("unresolved root cluster in [{lo}, {hi}] (drive {drive})")]
    UnresolvedCluster { drive: f64, lo: f64, hi: f64 },

    #[error("multivalued regime: beta = {beta} >= beta_crit = {beta_crit}")]
    MultivaluedRegime { beta: f64, beta_crit: f64 },

    #[error("no root of the consistency equation for drive {drive} in [{lo}, {hi}]")]
    NoRoot { drive: f64, lo: f64, hi: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NonConvergence {
        iterations: usize,
        worst_residual: f64,
        best: Vec<f64>,
    },

    #[error("grid too narrow: boundary amplitude {amplitude:e} after widening to half-width {half_width}")]
    GridInsufficient { amplitude: f64, half_width: f64 },

    #[error("degenerate fast ground state: |ng - 1/2| = {distance} <= kappa^2 = {window}")]
    DegenerateFastGround { distance: f64, window: f64 },

    #[error("relative energy drift {drift:e} exceeds {tolerance:e}; try dt <= {suggested_dt:e}")]
    StepTooLarge {
        drift: f64,
        tolerance: f64,
        suggested_dt: f64,
    },

    #[error("admittance evaluated at omega = {omega}, within relative 1e-9 of pole {pole}")]
    PoleProximity { omega: f64, pole: f64 },

    #[error("expected {expected} resonances but detected {} asymptotes at {detected:?}", detected.len())]
    StructuralMismatch { expected: usize, detected: Vec<f64> },

    #[error("input is not lossless: |Re Y| = {re:e} at omega = {omega}")]
    Lossy { omega: f64, re: f64 },

    #[error("fit is not positive-real: {0}")]
    NotPositiveReal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl fmt::Display) -> Self {
        Error::Validation {
            field,
            reason: reason.to_string(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::MultivaluedRegime { .. } | Error::DegenerateFastGround { .. } => {
                ErrorClass::Regime
            }
            Error::UnresolvedCluster { .. }
            | Error::NonConvergence { .. }
            | Error::GridInsufficient { .. }
            | Error::StepTooLarge { .. } => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rejects NaN and infinities.
pub(crate) fn finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
