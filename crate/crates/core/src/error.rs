use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation point {distance:e} away from a zero of B (pole of B'/B)")]
    Pole { distance: f64 },

    #[error("derivative order {0} exceeds the supported maximum of 8")]
    Order(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The adaptive quadrature ran out of panels before meeting its tolerance.
    #[error("quadrature tolerance not met: value {value:e}, error estimate {error_estimate:e}")]
    ToleranceNotMet { value: f64, error_estimate: f64 },

    /// A monotonicity or interpolation certificate required by a theorem failed.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("divergent sequence: {0}")]
    Divergent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
