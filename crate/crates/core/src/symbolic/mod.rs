//! Exact symbolic arithmetic over Gaussian rationals.

mod gaussian;
mod laurent;

pub use gaussian::GaussianRational;
pub use laurent::{LaurentPoly, Monomial, Var, NVARS};
pub mod certify;
