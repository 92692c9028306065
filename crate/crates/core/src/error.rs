use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain. `field` names the parameter.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error("polynomial has degree {degree}; nothing to solve")]
    DegreeTooLow { degree: usize },

    #[error("root iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// Two candidate roots are too close to tell apart during branch selection.
    #[error("ambiguous branch at h_b = {h_b}: roots {separation:e} apart")]
    AmbiguousBranch { h_b: f64, separation: f64 },

    #[error("singular denominator for velocity pair m = {index} (|d| = {magnitude:e})")]
    SingularDenominator { index: usize, magnitude: f64 },

    #[error("lambda = {lambda} is not a root of the dispersion relation (residual {residual:e})")]
    NotARoot { lambda: String, residual: f64 },

    #[error("no interior maximum of lambda_i on [{lo}, {hi}]")]
    NoInteriorMaximum { lo: f64, hi: f64 },

    #[error("time step violates stability limit: {0}")]
    StepTooLarge(String),

    #[error("positivity lost: P = {value} at cell {cell}, component {component}")]
    PositivityLoss {
        value: f64,
        cell: usize,
        component: usize,
    },

    #[error("simulation unstable: |P| = {magnitude:e} exceeds {limit:e} at t = {time}")]
    Unstable {
        magnitude: f64,
        limit: f64,
        time: f64,
    },

    #[error("wave fit failed: {0}")]
    FitFailure(String),

    #[error("at h = {h}: {source}")]
    AtH {
        h: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_h(self, h: f64) -> Self {
        match self {
            e @ Error::AtH { .. } => e,
            e => Error::AtH {
                h,
                source: Box::new(e),
            },
        }
    }

    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::AtH { source, .. } => source.is_numerical(),
            Error::Domain { .. } | Error::Io { .. } | Error::DegreeTooLow { .. } => false,
            Error::StepTooLarge(_) => false,
            _ => true,
        }
    }
}
