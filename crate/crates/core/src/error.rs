use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("sample is empty")]
    EmptySample,

    #[error("observation {index} is not a positive finite number ({value})")]
    NonPositiveData { index: usize, value: f64 },

    #[error("sample needs at least {required} observations, got {got}")]
    SampleTooSmall { required: usize, got: usize },

    #[error("all observations are equal; the likelihood equations have no root")]
    ConstantSample,

    #[error("profile equation root not bracketed within [{low:e}, {high:e}]")]
    NoConvergence { low: f64, high: f64 },

    #[error(
        "adaptive quadrature did not reach tolerance {tolerance:e} (error estimate {error:e})"
    )]
    QuadratureNonConvergence { tolerance: f64, error: f64 },

    #[error("no bootstrap replicates")]
    EmptyReplicates,

    #[error("{family} draw is not representable as a positive double (ln x = {ln_value:.3e})")]
    Unrepresentable { family: &'static str, ln_value: f64 },

    #[error("{skipped} of {total} replications failed: {last_error}")]
    TooManySkips {
        skipped: usize,
        total: usize,
        last_error: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
