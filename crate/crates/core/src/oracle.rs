//! Independent reference integration of the catalogued vector fields.

use num_complex::Complex;

use crate::bridge::{Zeros, DEGENERACY_THRESHOLD};
use crate::catalog::{model_rhs, ModelId};
use crate::error::{Error, Result};
use crate::ode::{autonomous, dop853, dopri5, DenseOutput, Termination, Tolerances};
use crate::params::ModelParams;
use crate::scalar::{lit, to_f64, Real};
use crate::trajectory::{Cause, NEAR_COLLISION};

pub use crate::ode::Method;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings { rtol: 1e-10, atol: 1e-12, max_steps: 200_000, method: Method::Dopri5 }
    }
}

impl IntegrationSettings {
    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        if !(rtol > 0.0 && atol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(IntegrationSettings { rtol, atol, ..Default::default() })
    }

    pub fn with_method(self, method: Method) -> Self {
        IntegrationSettings { method, ..self }
    }

    pub fn tolerances<T: Real>(&self) -> Tolerances<T> {
        Tolerances { max_steps: self.max_steps.max(1), ..Tolerances::new(self.rtol, self.atol) }
    }
}

/// Integrates `x' = rhs(t, x)` over `[t0, t1]`; blow-up is an error.
pub fn integrate<T, F>(rhs: F, x0: &[Complex<T>], t0: T, t1: T, s: &IntegrationSettings) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let sol = integrate_partial(rhs, x0, t0, t1, s)?;
    match sol.termination() {
        Termination::StepCollapse { t_est } => Err(Error::StepCollapse { t_est: to_f64(t_est) }),
        _ => Ok(sol),
    }
}

/// Like [`integrate`] but returns the partial solution on blow-up.
pub fn integrate_partial<T, F>(rhs: F, x0: &[Complex<T>], t0: T, t1: T, s: &IntegrationSettings) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    if t0 == t1 {
        return Err(Error::InvalidInput("degenerate time span".into()));
    }
    match s.method {
        Method::Dopri5 => dopri5(rhs, t0, t1, x0, &s.tolerances()),
        Method::Dop853 => dop853(rhs, t0, t1, x0, &s.tolerances()),
    }
}

/// Reference solution of a model.
#[derive(Debug, Clone)]
pub struct OracleRun<T> {
    pub dense: DenseOutput<T>,
    pub singularity: Option<(T, Cause)>,
}

impl<T: Real> OracleRun<T> {
    pub fn zeros_at(&self, t: T) -> Result<Zeros<T>> {
        let y = self.dense.eval(t)?;
        Ok(Zeros::new(y[0], y[1]))
    }
}

/// Whether the algebraic route for `id` is singular at `x1 = 0`.
pub fn x1_is_singular(id: ModelId) -> bool {
    id.is_rational() || id.pair().divides_by_x1()
}

/// Integrates the model's vector field from `z0` over `[0, t1]`, stopping at
/// blow-up or when the zeros come within [`NEAR_COLLISION`] of each other (or
/// `x1` reaches zero where that is singular). Singularities passing close to
/// the real axis are stepped round in complex time.
pub fn integrate_model<T: Real>(
    id: ModelId,
    p: &ModelParams<Complex<T>>,
    z0: &Zeros<T>,
    t1: T,
    s: &IntegrationSettings,
) -> Result<OracleRun<T>> {
    let rhs = |y: &[Complex<T>], dy: &mut [Complex<T>]| match model_rhs(id, p, &Zeros::new(y[0], y[1])) {
        Ok((a, b)) => {
            dy[0] = a;
            dy[1] = b;
        }
        Err(_) => dy.fill(Complex::new(T::nan(), T::nan())),
    };
    let watch_x1 = x1_is_singular(id);
    let thr = lit::<T>(DEGENERACY_THRESHOLD);
    let near = lit::<T>(NEAR_COLLISION);
    let stop = |y: &[Complex<T>]| {
        let z = Zeros::new(y[0], y[1]);
        (z.x1 - z.x2).norm() < near * z.scale() || (watch_x1 && z.x1.norm() < thr * z.scale())
    };
    let x0 = [z0.x1, z0.x2];
    let dense = autonomous(s.method, rhs, T::zero(), t1, &x0, &s.tolerances(), Some(&stop))?;
    let singularity = match dense.termination() {
        Termination::Completed => None,
        Termination::StepCollapse { t_est } => Some((t_est, Cause::BlowUp)),
        Termination::Event { t } => {
            let y = dense.eval(t)?;
            let z = Zeros::new(y[0], y[1]);
            let cause = if (z.x1 - z.x2).norm() < near * z.scale() { Cause::Collision } else { Cause::X1Vanishes };
            Some((t, cause))
        }
    };
    Ok(OracleRun { dense, singularity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Param;

    type C = Complex<f64>;

    #[test]
    fn examples() {
        let s = IntegrationSettings::default();
        let e = integrate(|_, y: &[C], d: &mut [C]| d[0] = y[0], &[C::new(1.0, 0.0)], 0.0, 1.0, &s).unwrap();
        assert!((e.final_state()[0].re - 1f64.exp()).abs() < 1e-10);
        let tau = 2.0 * std::f64::consts::PI;
        let r = integrate(|_, y: &[C], d: &mut [C]| d[0] = C::i() * y[0], &[C::new(1.0, 0.0)], 0.0, tau, &s).unwrap();
        assert!((r.final_state()[0] - C::new(1.0, 0.0)).norm() < 1e-9);
        match integrate(|_, y: &[C], d: &mut [C]| d[0] = y[0] * y[0], &[C::new(1.0, 0.0)], 0.0, 2.0, &s) {
            Err(Error::StepCollapse { t_est }) => assert!((0.99..=1.01).contains(&t_est)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tighter_tolerance_is_more_accurate() {
        let mut prev = f64::INFINITY;
        for k in 4..10 {
            let tol = 10f64.powi(-k);
            let s = IntegrationSettings::new(tol, tol * 1e-2).unwrap();
            let e = integrate(|_, y: &[C], d: &mut [C]| d[0] = y[0], &[C::new(1.0, 0.0)], 0.0, 1.0, &s).unwrap();
            let err = (e.final_state()[0].re - 1f64.exp()).abs();
            assert!(err <= prev, "tol {tol}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn forward_then_backward_returns() {
        let s = IntegrationSettings::default();
        let f = |_: f64, y: &[C], d: &mut [C]| d[0] = C::new(0.3, 1.0) * y[0] + y[0] * y[0] * 0.1;
        let fw = integrate(f, &[C::new(0.5, 0.2)], 0.0, 1.0, &s).unwrap();
        let bw = integrate(f, &fw.final_state(), 1.0, 0.0, &s).unwrap();
        assert!((bw.final_state()[0] - C::new(0.5, 0.2)).norm() < 10.0 * 1e-10 * 2.0);
    }

    #[test]
    fn model_run_linear() {
        let p = ModelParams::new().with(Param::A, C::new(1.0, 0.0));
        let run = integrate_model(ModelId::A1_1, &p, &Zeros::new(C::new(1.0, 0.0), C::new(-2.0, 0.0)), 1.0, &Default::default()).unwrap();
        assert!(run.singularity.is_none());
        let z = run.zeros_at(1.0).unwrap();
        assert!((z.x1.re - 1f64.exp()).abs() < 1e-9 && (z.x2.re + 2.0 * 1f64.exp()).abs() < 1e-9);
    }
}
