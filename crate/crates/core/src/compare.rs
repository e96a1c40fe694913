//! Algebraic trajectories checked against the reference integrator.

use num_complex::Complex;

use crate::bridge::Zeros;
use crate::catalog::ModelId;
use crate::error::Result;
use crate::oracle::{integrate_model, IntegrationSettings, OracleRun};
use crate::params::ModelParams;
use crate::scalar::{lit, Real};
use crate::trajectory::{algebraic_solve_with, uniform_times, Cause, SolveOptions, Trajectory, TrajectoryEnd};

/// Largest allowed disagreement between the two singularity time estimates.
pub const SINGULARITY_TIME_TOL: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct Comparison<T> {
    pub algebraic: Trajectory<T>,
    pub oracle: OracleRun<T>,
    /// Sup-norm deviation over samples where both paths are defined.
    pub deviation: T,
    pub compared: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict<T> {
    /// Neither path is singular and the deviation is within tolerance.
    Agree { deviation: T },
    /// Both paths report a singularity at compatible times.
    SingularAgree { algebraic: T, oracle: T, cause: Cause },
    Disagree { reason: &'static str },
}

impl<T: Real> Verdict<T> {
    pub fn is_ok(&self) -> bool {
        !matches!(self, Verdict::Disagree { .. })
    }
}

impl<T: Real> Comparison<T> {
    pub fn algebraic_singularity(&self) -> Option<(T, Cause)> {
        self.algebraic.termination.singularity()
    }

    pub fn verdict(&self, tol: T) -> Verdict<T> {
        match (self.algebraic.termination, self.oracle.singularity) {
            (TrajectoryEnd::Completed, None) if self.deviation <= tol => Verdict::Agree { deviation: self.deviation },
            (TrajectoryEnd::Completed, None) => Verdict::Disagree { reason: "deviation above tolerance" },
            (TrajectoryEnd::SingularityReached { t_est, cause }, Some((t_o, _))) => {
                if (t_est - t_o).abs() <= lit(SINGULARITY_TIME_TOL) {
                    Verdict::SingularAgree { algebraic: t_est, oracle: t_o, cause }
                } else {
                    Verdict::Disagree { reason: "singularity times differ" }
                }
            }
            (TrajectoryEnd::SingularityReached { .. }, None) => Verdict::Disagree { reason: "only the algebraic path is singular" },
            (TrajectoryEnd::Completed, Some(_)) => Verdict::Disagree { reason: "only the oracle is singular" },
            (TrajectoryEnd::Horizon { .. }, _) => Verdict::Disagree { reason: "coefficient solution unavailable" },
        }
    }
}

/// Runs both paths from `z0` on `samples + 1` equispaced times in `[0, t1]`.
pub fn compare_model<T: Real>(
    id: ModelId,
    p: &ModelParams<Complex<T>>,
    z0: &Zeros<T>,
    t1: T,
    samples: usize,
    settings: &IntegrationSettings,
    opts: &SolveOptions,
) -> Result<Comparison<T>> {
    let times = uniform_times(t1, samples);
    let algebraic = algebraic_solve_with(id, p, z0, &times, opts)?;
    let oracle = integrate_model(id, p, z0, t1, settings)?;
    let mut deviation = T::zero();
    let mut compared = 0;
    for (t, z) in algebraic.times.iter().zip(&algebraic.states) {
        if !oracle.dense.covers(*t) {
            break;
        }
        deviation = deviation.max(oracle.zeros_at(*t)?.distance(z));
        compared += 1;
    }
    Ok(Comparison { algebraic, oracle, deviation, compared })
}
