//! Embedded Runge-Kutta integration over complex state with dense output.
//!
//! Complex components are error-controlled as real pairs under one shared
//! step-size controller. Two schemes share the driver: the 5(4) Dormand-Prince
//! pair backs the oracle, the 8(5,3) pair backs the numeric coefficient flows.

mod dop853;
mod dopri5;
mod vault;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

pub use dop853::Dop853;
pub use dopri5::Dopri5;
pub use vault::{autonomous, Method};

pub type State<T> = Vec<Complex<T>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// State magnitude treated as blow-up.
    pub blowup: T,
}

impl<T: Real> Tolerances<T> {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerances { rtol: lit(rtol), atol: lit(atol), max_steps: 200_000, blowup: lit(1e14) }
    }
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    Completed,
    /// Step size collapsed or the state blew up; `t_est` is the midpoint of
    /// the last bracketing step.
    StepCollapse { t_est: T },
    /// The stop predicate became true at `t`.
    Event { t: T },
}

#[derive(Debug, Clone)]
enum Interp<T> {
    /// `r0 + s (r1 + s1 (r2 + s (r3 + s1 r4)))`
    Quartic([State<T>; 5]),
    /// Seven-degree continuous extension of the 8(5,3) pair.
    Septic([State<T>; 8]),
}

#[derive(Debug, Clone)]
struct Segment<T> {
    t: T,
    h: T,
    interp: Interp<T>,
}

impl<T: Real> Segment<T> {
    fn lo(&self) -> T {
        self.t.min(self.t + self.h)
    }

    fn hi(&self) -> T {
        self.t.max(self.t + self.h)
    }

    fn eval(&self, t: T, out: &mut [Complex<T>]) {
        let s = (t - self.t) / self.h;
        let s1 = T::one() - s;
        match &self.interp {
            Interp::Quartic(r) => {
                for i in 0..out.len() {
                    out[i] = r[0][i] + (r[1][i] + (r[2][i] + (r[3][i] + r[4][i] * s1) * s) * s1) * s;
                }
            }
            Interp::Septic(c) => {
                for i in 0..out.len() {
                    let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
                    out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
                }
            }
        }
    }
}

/// Piecewise-polynomial solution over `[t0, t_end]`. Segments are ordered
/// along the direction of travel but each may have been stepped either way.
#[derive(Debug, Clone)]
pub struct DenseOutput<T> {
    t0: T,
    y0: State<T>,
    t_end: T,
    segments: Vec<Segment<T>>,
    termination: Termination<T>,
    rhs_evals: usize,
}

impl<T: Real> DenseOutput<T> {
    pub fn t0(&self) -> T {
        self.t0
    }

    /// Last time covered by the dense output.
    pub fn t_end(&self) -> T {
        self.t_end
    }

    pub fn termination(&self) -> Termination<T> {
        self.termination
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn rhs_evals(&self) -> usize {
        self.rhs_evals
    }

    /// Accepted step boundaries, from `t0` to `t_end`.
    pub fn knots(&self) -> Vec<T> {
        let forward = self.t_end >= self.t0;
        let mut k: Vec<T> = std::iter::once(self.t0).chain(self.segments.iter().map(|s| if forward { s.hi() } else { s.lo() })).collect();
        // an event may cut the last step short
        if let Some(last) = k.last_mut() {
            *last = self.t_end;
        }
        k
    }

    pub fn covers(&self, t: T) -> bool {
        t >= self.t0.min(self.t_end) && t <= self.t0.max(self.t_end)
    }

    /// State at `t`; `t` must lie in `[t0, t_end]`.
    pub fn eval(&self, t: T) -> Result<State<T>> {
        let mut out = vec![Complex::zero(); self.dim()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, t: T, out: &mut [Complex<T>]) -> Result<()> {
        if !self.covers(t) {
            return Err(Error::BeyondHorizon { t: to_f64(t), horizon: to_f64(self.t_end) });
        }
        if self.segments.is_empty() || t == self.t0 {
            out.copy_from_slice(&self.y0);
            return Ok(());
        }
        let forward = self.t_end >= self.t0;
        let idx = self
            .segments
            .partition_point(|s| if forward { s.hi() < t } else { s.lo() > t })
            .min(self.segments.len() - 1);
        self.segments[idx].eval(t, out);
        Ok(())
    }

    pub fn final_state(&self) -> State<T> {
        self.eval(self.t_end).expect("t_end is covered")
    }
}

/// Step-size controller constants (Hairer-Wanner conventions).
#[derive(Debug, Clone, Copy)]
struct Controller {
    expo1: f64,
    beta: f64,
    safe: f64,
    facc1: f64,
    facc2: f64,
}

/// One embedded Runge-Kutta pair.
trait Scheme<T: Real> {
    const ORDER: i32;
    const CONTROLLER: Controller;

    fn new(dim: usize) -> Self;

    /// Attempts a step from `(t, y)` with `k1 = f(t, y)`; writes the proposed
    /// state into `y_new` and returns the scaled error norm.
    fn attempt<F>(&mut self, f: &mut F, t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &mut [Complex<T>], tol: &Tolerances<T>) -> T
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]);

    /// Finalises an accepted step: writes `f(t + h, y_new)` into `k_next`
    /// and returns the dense-output interpolant.
    fn accept<F>(&mut self, f: &mut F, t: T, y: &[Complex<T>], k1: &[Complex<T>], h: T, y_new: &[Complex<T>], k_next: &mut [Complex<T>]) -> Interp<T>
    where
        F: FnMut(T, &[Complex<T>], &mut [Complex<T>]);

    fn evals(&self) -> usize;
}

/// Per-real-component scale `atol + rtol * max(|a|, |b|)`.
fn sk<T: Real>(tol: &Tolerances<T>, a: T, b: T) -> T {
    tol.atol + tol.rtol * a.abs().max(b.abs())
}

fn max_norm<T: Real>(y: &[Complex<T>]) -> T {
    y.iter().map(|z| z.re.abs().max(z.im.abs())).fold(T::zero(), T::max)
}

fn all_finite<T: Real>(y: &[Complex<T>]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Initial step guess (Hairer-Wanner, II.4).
fn initial_step<T, F>(f: &mut F, t0: T, y0: &[Complex<T>], k0: &[Complex<T>], dir: T, order: i32, tol: &Tolerances<T>) -> T
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let n2 = lit::<T>(2.0 * y0.len() as f64);
    let mut dnf = T::zero();
    let mut dny = T::zero();
    for (y, k) in y0.iter().zip(k0) {
        for (yv, kv) in [(y.re, k.re), (y.im, k.im)] {
            let s = sk(tol, yv, yv);
            dnf += (kv / s).powi(2);
            dny += (yv / s).powi(2);
        }
    }
    let small = lit::<T>(1e-10);
    let mut h = if dnf <= small || dny <= small { lit(1e-6) } else { (dny / dnf).sqrt() * lit(0.01) };
    h = h * dir;
    let y1: State<T> = y0.iter().zip(k0).map(|(y, k)| *y + *k * h).collect();
    let mut k1 = vec![Complex::zero(); y0.len()];
    f(t0 + h, &y1, &mut k1);
    let mut der2 = T::zero();
    for ((y, a), b) in y0.iter().zip(k0).zip(&k1) {
        let d = *b - *a;
        for (yv, dv) in [(y.re, d.re), (y.im, d.im)] {
            der2 += (dv / sk(tol, yv, yv)).powi(2);
        }
    }
    let der2 = (der2 / n2).sqrt() / h.abs();
    let der12 = der2.abs().max((dnf / n2).sqrt());
    let h1 = if der12 <= lit(1e-15) {
        (h.abs() * lit(1e-3)).max(lit(1e-6))
    } else {
        (lit::<T>(0.01) / der12).powf(T::one() / lit(f64::from(order)))
    };
    (h.abs() * lit(100.0)).min(h1) * dir
}

// Scans the step at a few interior points, then bisects the first bracket.
fn locate_event<T, P>(seg: &Segment<T>, dim: usize, stop: &P) -> Option<T>
where
    T: Real,
    P: Fn(&[Complex<T>]) -> bool,
{
    const PROBES: usize = 8;
    let mut buf = vec![Complex::zero(); dim];
    let mut lo = seg.t;
    let mut hi = None;
    for j in 1..=PROBES {
        let tj = if j == PROBES { seg.t + seg.h } else { seg.t + seg.h * lit(j as f64 / PROBES as f64) };
        seg.eval(tj, &mut buf);
        if stop(&buf) {
            hi = Some(tj);
            break;
        }
        lo = tj;
    }
    let mut hi = hi?;
    for _ in 0..60 {
        let mid = (lo + hi) * lit(0.5);
        seg.eval(mid, &mut buf);
        if stop(&buf) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Adaptive integration from `t0` to `t1` (either direction).
fn drive<T, F, S, P>(mut f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>, stop: Option<&P>) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    S: Scheme<T>,
    P: Fn(&[Complex<T>]) -> bool,
{
    if !(t1 - t0).is_normal() && t1 != t0 {
        return Err(Error::InvalidInput("non-finite integration interval".into()));
    }
    let n = y0.len();
    let mut out = DenseOutput {
        t0,
        y0: y0.to_vec(),
        t_end: t0,
        segments: Vec::new(),
        termination: Termination::Completed,
        rhs_evals: 0,
    };
    if t1 == t0 {
        return Ok(out);
    }
    let ctl = S::CONTROLLER;
    let dir = if t1 > t0 { T::one() } else { -T::one() };
    let mut scheme = S::new(n);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![Complex::zero(); n];
    f(t, &y, &mut k1);
    let mut h = initial_step(&mut f, t, &y, &k1, dir, S::ORDER, tol);
    // f(t0) plus the probe in initial_step
    let extra_evals = 2;
    let mut y_new = vec![Complex::zero(); n];
    let mut k_next = vec![Complex::zero(); n];
    let mut facold = lit::<T>(1e-4);
    let mut last_rejected = false;
    let eps = T::epsilon();

    for _ in 0..tol.max_steps {
        let remaining = t1 - t;
        if remaining * dir <= eps * t1.abs().max(T::one()) {
            out.t_end = t1;
            out.rhs_evals = scheme.evals() + extra_evals;
            return Ok(out);
        }
        if (h - remaining) * dir > T::zero() {
            h = remaining;
        }
        let h_floor = lit::<T>(1e-13) * (T::one() + t.abs());
        if h.abs() < h_floor {
            out.termination = Termination::StepCollapse { t_est: t + h * lit(0.5) };
            out.rhs_evals = scheme.evals() + extra_evals;
            return Ok(out);
        }

        let err = scheme.attempt(&mut f, t, &y, &k1, h, &mut y_new, tol);
        let finite = err.is_finite() && all_finite(&y_new);
        if !finite {
            h = h * lit(0.1);
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(lit(ctl.expo1));
        let fac = (fac11 / facold.powf(lit(ctl.beta)) / lit(ctl.safe))
            .min(lit(ctl.facc1))
            .max(lit(ctl.facc2));
        let mut h_new = h / fac;

        if err <= T::one() {
            facold = err.max(lit(1e-4));
            let interp = scheme.accept(&mut f, t, &y, &k1, h, &y_new, &mut k_next);
            let seg = Segment { t, h, interp };
            if let Some(stop) = stop {
                if let Some(te) = locate_event(&seg, n, stop) {
                    out.segments.push(seg);
                    out.t_end = te;
                    out.termination = Termination::Event { t: te };
                    out.rhs_evals = scheme.evals() + extra_evals;
                    return Ok(out);
                }
            }
            out.segments.push(seg);
            t = t + h;
            out.t_end = t;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k_next);
            if max_norm(&y) > tol.blowup {
                out.termination = Termination::StepCollapse { t_est: t };
                out.rhs_evals = scheme.evals() + extra_evals;
                return Ok(out);
            }
            if last_rejected {
                h_new = if dir > T::zero() { h_new.min(h) } else { h_new.max(h) };
            }
            last_rejected = false;
        } else {
            h_new = h / lit::<T>(ctl.facc1).min(fac11 / lit(ctl.safe));
            last_rejected = true;
        }
        h = h_new;
    }
    Err(Error::MaxStepsExceeded(tol.max_steps))
}

/// 5(4) Dormand-Prince integration with dense output.
pub fn dopri5<T, F>(f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    drive::<T, F, Dopri5<T>, fn(&[Complex<T>]) -> bool>(f, t0, t1, y0, tol, None)
}

/// Like [`dopri5`], stopping as soon as `stop(state)` holds.
pub fn dopri5_until<T, F, P>(f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>, stop: &P) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    P: Fn(&[Complex<T>]) -> bool,
{
    drive::<T, F, Dopri5<T>, P>(f, t0, t1, y0, tol, Some(stop))
}

/// 8(5,3) Dormand-Prince integration with seventh-order dense output.
pub fn dop853<T, F>(f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    drive::<T, F, Dop853<T>, fn(&[Complex<T>]) -> bool>(f, t0, t1, y0, tol, None)
}

/// Like [`dop853`], stopping as soon as `stop(state)` holds.
pub fn dop853_until<T, F, P>(f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>, stop: &P) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    P: Fn(&[Complex<T>]) -> bool,
{
    drive::<T, F, Dop853<T>, P>(f, t0, t1, y0, tol, Some(stop))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn exp_rhs(lambda: C) -> impl FnMut(f64, &[C], &mut [C]) {
        move |_, y, dy| dy[0] = lambda * y[0]
    }

    #[test]
    fn both_schemes_integrate_exponential() {
        let tol = Tolerances::new(1e-11, 1e-13);
        let lam = C::new(0.3, 2.0);
        let exact = (lam * 1.5).exp();
        let a = dopri5(exp_rhs(lam), 0.0, 1.5, &[C::new(1.0, 0.0)], &tol).unwrap();
        let b = dop853(exp_rhs(lam), 0.0, 1.5, &[C::new(1.0, 0.0)], &tol).unwrap();
        assert!((a.final_state()[0] - exact).norm() < 1e-9);
        assert!((b.final_state()[0] - exact).norm() < 1e-10);
        assert_eq!(a.termination(), Termination::Completed);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let tol = Tolerances::new(1e-12, 1e-14);
        let lam = C::new(-0.5, 3.0);
        for sol in [
            dopri5(exp_rhs(lam), 0.0, 2.0, &[C::new(1.0, 0.0)], &tol).unwrap(),
            dop853(exp_rhs(lam), 0.0, 2.0, &[C::new(1.0, 0.0)], &tol).unwrap(),
        ] {
            for i in 0..=200 {
                let t = 2.0 * f64::from(i) / 200.0;
                let got = sol.eval(t).unwrap()[0];
                assert!((got - (lam * t).exp()).norm() < 1e-9, "t={t}");
            }
        }
    }

    #[test]
    fn high_order_needs_fewer_evaluations() {
        let tol = Tolerances::new(1e-12, 1e-14);
        let lam = C::new(0.1, 5.0);
        let a = dopri5(exp_rhs(lam), 0.0, 10.0, &[C::new(1.0, 0.0)], &tol).unwrap();
        let b = dop853(exp_rhs(lam), 0.0, 10.0, &[C::new(1.0, 0.0)], &tol).unwrap();
        assert!(b.rhs_evals() * 2 < a.rhs_evals(), "{} vs {}", b.rhs_evals(), a.rhs_evals());
        assert!((b.final_state()[0] - (lam * 10.0).exp()).norm() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let tol = Tolerances::new(1e-11, 1e-13);
        let sol = dop853(exp_rhs(C::new(1.0, 0.0)), 1.0, 0.0, &[C::new(1.0, 0.0)], &tol).unwrap();
        assert!((sol.final_state()[0].re - (-1f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn blow_up_collapses() {
        let tol = Tolerances::new(1e-10, 1e-12);
        for sol in [
            dopri5(|_, y: &[C], dy: &mut [C]| dy[0] = y[0] * y[0], 0.0, 2.0, &[C::new(1.0, 0.0)], &tol).unwrap(),
            dop853(|_, y: &[C], dy: &mut [C]| dy[0] = y[0] * y[0], 0.0, 2.0, &[C::new(1.0, 0.0)], &tol).unwrap(),
        ] {
            match sol.termination() {
                Termination::StepCollapse { t_est } => assert!((t_est - 1.0).abs() < 1e-2, "{t_est}"),
                other => panic!("expected collapse, got {other:?}"),
            }
        }
    }

    #[test]
    fn stop_predicate_locates_crossing() {
        let tol = Tolerances::new(1e-10, 1e-12);
        // y = 1 - t crosses |y| < 0.25 at t = 0.75
        let sol = dopri5_until(
            |_, _: &[C], dy: &mut [C]| dy[0] = C::new(-1.0, 0.0),
            0.0,
            2.0,
            &[C::new(1.0, 0.0)],
            &tol,
            &|y: &[C]| y[0].norm() < 0.25,
        )
        .unwrap();
        match sol.termination() {
            Termination::Event { t } => assert!((t - 0.75).abs() < 1e-9),
            other => panic!("expected event, got {other:?}"),
        }
    }

    #[test]
    fn eval_outside_range_errors() {
        let tol = Tolerances::new(1e-8, 1e-10);
        let sol = dopri5(exp_rhs(C::new(1.0, 0.0)), 0.0, 1.0, &[C::new(1.0, 0.0)], &tol).unwrap();
        assert!(matches!(sol.eval(1.5), Err(Error::BeyondHorizon { .. })));
    }
}
