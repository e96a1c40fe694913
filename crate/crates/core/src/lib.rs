//! Algebraic flows on the zeros of a cubic with a double root.
//!
//! The numeric core is generic over `f32`/`f64`; the aliases below fix `f64`.

pub mod bridge;
pub mod catalog;
pub mod compare;
pub mod error;
pub mod flows;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod sample;
pub mod scalar;
pub mod symbolic;
pub mod trajectory;

pub use bridge::{CoeffPair, Coeffs, Zeros};
pub use catalog::{Header, ModelId};
pub use error::{Error, Result};
pub use params::{ModelParams, Param};
pub use trajectory::{algebraic_solve, Cause, Trajectory, TrajectoryEnd};

pub use num_complex::Complex64;

pub type Zeros64 = Zeros<f64>;
pub type Coeffs64 = Coeffs<f64>;
pub type Params64 = ModelParams<Complex64>;
pub type Trajectory64 = Trajectory<f64>;
pub type FlowSpec64 = flows::FlowSpec<Complex64>;
pub type FlowSolution64 = flows::FlowSolution<f64>;
pub type DenseOutput64 = ode::DenseOutput<f64>;
