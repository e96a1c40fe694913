use thiserror::Error;

use crate::symbolic::LaurentPoly;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("leading coefficient vanishes")]
    DegenerateLeadingCoefficient,

    #[error("ambiguous branch: candidates {0:.3e} apart and no hint disambiguates")]
    AmbiguousBranch(f64),

    #[error("x1 too close to zero (|x1| = {0:.3e})")]
    DivisionByZeroX1(f64),

    #[error("zeros collide (|x1 - x2| = {0:.3e})")]
    ZeroCollision(f64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),

    #[error("quadrature tolerance unreachable on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("energy drift {drift:.3e} exceeds bound {bound:.3e} at t = {t}")]
    EnergyDriftExceeded { t: f64, drift: f64, bound: f64 },

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("step size collapsed near t = {t_est}")]
    StepCollapse { t_est: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize),

    #[error("time {t} lies beyond the solution horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("inexact division, remainder {remainder}")]
    InexactDivision { remainder: Box<LaurentPoly> },

    #[error("denominator is not a product of x1, (x1 - x2) and constants: {0}")]
    UnsupportedDenominator(Box<LaurentPoly>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
