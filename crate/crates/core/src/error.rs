use thiserror::Error;

use crate::radial::Method;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where and how a solve left the representable range.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub method: Method,
    /// First grid radius at which the value cap was exceeded.
    pub radius: f64,
    /// Picard iteration (or integration step) at which the cap was hit.
    pub iteration: usize,
    pub cap: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite {what} at {at}")]
    NonFinite { what: String, at: f64 },

    #[error("h(t) + g(t) = {value} is not positive at t = {t}; u0 is below the admissible range")]
    Domain { t: f64, value: f64 },

    #[error("H^-1({y}) is beyond the guaranteed existence envelope (H(inf) = {h_infinity})")]
    Range { y: f64, h_infinity: f64 },

    #[error("{:?} solve blew up at r = {} (iteration {}, cap {:e})", .0.method, .0.radius, .0.iteration, .0.cap)]
    BlowUp(BlowUp),

    #[error("dimension N = {dim} is not supported here (need N >= {min})")]
    UnsupportedDimension { dim: usize, min: usize },

    #[error("radius {radius} lies beyond the radial grid (r_max = {r_max})")]
    OutOfReach { radius: f64, r_max: f64 },

    #[error("nonlinearity pair failed validation: {0}")]
    Validation(String),

    #[error("quadrature did not reach tolerance on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Validation-class failures (bad inputs) as opposed to numeric failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Validation(_)
                | Error::Domain { .. }
                | Error::UnsupportedDimension { .. }
        )
    }
}
