//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Wavelength outside a Sellmeier model's validity window.
    #[error("wavelength {lambda_nm} nm outside valid range [{min_nm}, {max_nm}] nm of model '{model}'")]
    WavelengthOutOfRange {
        model: String,
        lambda_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    /// NaN or infinity where a finite value is required.
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    /// Malformed `key = value` input.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Coefficient list length does not match the declared functional form.
    #[error("model '{model}': form '{form}' expects {expected} coefficients, got {got}")]
    CoefficientArity {
        model: String,
        form: String,
        expected: usize,
        got: usize,
    },

    /// The graded-index mode expression is undefined at this frequency.
    #[error("mode not supported at this frequency (omega = {omega:.6e} rad/s, alpha = {alpha:.6e} 1/m)")]
    Guidance { omega: f64, alpha: f64 },

    /// Energy conservation cannot be satisfied by the requested pair.
    #[error("nonphysical signal/idler pair: signal {lambda_s_nm} nm must lie strictly above pump {lambda_p_nm} nm")]
    NonphysicalPair { lambda_p_nm: f64, lambda_s_nm: f64 },

    /// Grating order not present in the poling spec.
    #[error("grating order {0} is not registered in the poling spec")]
    UnregisteredOrder(i32),

    /// The quasi-phase-matching condition has no solution for this order.
    #[error("no quasi-phase-matching solution for grating order {order}: {reason}")]
    NoSolutionForOrder { order: i32, reason: String },

    /// Invalid argument or configuration value.
    #[error("invalid {what}: {why}")]
    Invalid { what: String, why: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(what: impl Into<String>, why: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            why: why.into(),
        }
    }
}
