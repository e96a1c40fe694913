//! Solvable coefficient flows (families A1, A2, A3) and their solutions.
//!
//! Throughout, `u = y_{m1}` and `v = y_{m2}` denote the two active
//! coefficients. The right-hand sides are generic over [`Ring`] so the
//! symbolic engine can evaluate them with indeterminate parameters.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::bridge::CoeffPair;
use crate::error::{Error, Result};
use crate::ode::{autonomous, dop853, DenseOutput, Method, Termination, Tolerances};
use crate::quad;
use crate::scalar::{expm1, lit, powu, to_f64, Real, Ring};

/// `u' = Σ α_ℓ u^{ℓ m2 + 1}`, `v' = Σ β_ℓ v^{ℓ m1 + 1}`, `ℓ = 0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct A1Spec<R> {
    pub m1: u32,
    pub m2: u32,
    pub alpha: Vec<R>,
    pub beta: Vec<R>,
}

/// `u' = Σ_{0..=L} α_ℓ u^ℓ`,
/// `v' = v Σ_{1..=L} β_ℓ u^{ℓ-1} + Σ_{0..=L} γ_ℓ u^{ℓ-1+m2/m1}`.
///
/// `beta[0]` is unused so that `beta[ℓ]` is `β_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct A2Spec<R> {
    pub m1: u32,
    pub m2: u32,
    pub alpha: Vec<R>,
    pub beta: Vec<R>,
    pub gamma: Vec<R>,
}

/// `u' = α0 + α1 v`, `v' = β0 u^{m-1} + β1 u^{2m-1}` with `m1 = 1`, `m2 = m`.
#[derive(Debug, Clone, PartialEq)]
pub struct A3Spec<R> {
    pub alpha0: R,
    pub alpha1: R,
    pub beta0: R,
    pub beta1: R,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowSpec<R> {
    A1(A1Spec<R>),
    A2(A2Spec<R>),
    A3(A3Spec<R>),
}

fn check_indices(m1: u32, m2: u32) -> Result<()> {
    if !(1..=3).contains(&m1) || !(1..=3).contains(&m2) || m1 == m2 {
        return Err(Error::InvalidInput(format!("coefficient indices ({m1}, {m2})")));
    }
    Ok(())
}

impl<R: Ring> A1Spec<R> {
    pub fn rhs(&self, u: &R, v: &R) -> Result<[R; 2]> {
        check_indices(self.m1, self.m2)?;
        let mut du = R::zero();
        for (l, a) in self.alpha.iter().enumerate() {
            du = du + a.clone() * powu(u, l as u32 * self.m2 + 1);
        }
        let mut dv = R::zero();
        for (l, b) in self.beta.iter().enumerate() {
            dv = dv + b.clone() * powu(v, l as u32 * self.m1 + 1);
        }
        Ok([du, dv])
    }
}

impl<R: Ring> A2Spec<R> {
    /// Integer value of `m2/m1` when the γ-terms need it.
    pub fn gamma_shift(&self) -> Result<Option<u32>> {
        check_indices(self.m1, self.m2)?;
        if self.gamma.iter().all(|g| g.is_zero()) {
            return Ok(None);
        }
        if self.m2 % self.m1 != 0 {
            return Err(Error::UnsupportedExponent(format!(
                "fractional power {}/{} of a complex coefficient",
                self.m2, self.m1
            )));
        }
        Ok(Some(self.m2 / self.m1))
    }

    pub fn rhs(&self, u: &R, v: &R) -> Result<[R; 2]> {
        let shift = self.gamma_shift()?;
        let mut du = R::zero();
        for (l, a) in self.alpha.iter().enumerate() {
            du = du + a.clone() * powu(u, l as u32);
        }
        let mut growth = R::zero();
        for (l, b) in self.beta.iter().enumerate().skip(1) {
            growth = growth + b.clone() * powu(u, l as u32 - 1);
        }
        let mut dv = v.clone() * growth;
        if let Some(k) = shift {
            for (l, g) in self.gamma.iter().enumerate() {
                dv = dv + g.clone() * powu(u, l as u32 + k - 1);
            }
        }
        Ok([du, dv])
    }
}

impl<R: Ring> A3Spec<R> {
    pub fn rhs(&self, u: &R, v: &R) -> Result<[R; 2]> {
        if !(2..=3).contains(&self.m) {
            return Err(Error::InvalidInput(format!("A3 exponent m = {}", self.m)));
        }
        let du = self.alpha0.clone() + self.alpha1.clone() * v.clone();
        let dv = self.beta0.clone() * powu(u, self.m - 1) + self.beta1.clone() * powu(u, 2 * self.m - 1);
        Ok([du, dv])
    }
}

impl<R: Ring> FlowSpec<R> {
    /// `(m1, m2)`; `u = y_{m1}`, `v = y_{m2}`.
    pub fn indices(&self) -> (u32, u32) {
        match self {
            FlowSpec::A1(s) => (s.m1, s.m2),
            FlowSpec::A2(s) => (s.m1, s.m2),
            FlowSpec::A3(s) => (1, s.m),
        }
    }

    pub fn pair(&self) -> CoeffPair {
        let (m1, m2) = self.indices();
        CoeffPair::from_indices(m1 as usize, m2 as usize).expect("validated indices")
    }

    /// True when `u` is the higher-indexed coefficient of the pair.
    pub fn swapped(&self) -> bool {
        let (m1, m2) = self.indices();
        m1 > m2
    }

    /// `(u', v')` at `(u, v)`.
    pub fn rhs(&self, u: &R, v: &R) -> Result<[R; 2]> {
        match self {
            FlowSpec::A1(s) => s.rhs(u, v),
            FlowSpec::A2(s) => s.rhs(u, v),
            FlowSpec::A3(s) => s.rhs(u, v),
        }
    }

    /// Same as [`rhs`](Self::rhs) but on the pair in ascending index order.
    pub fn rhs_ordered(&self, y: [R; 2]) -> Result<[R; 2]> {
        let [a, b] = y;
        if self.swapped() {
            let [du, dv] = self.rhs(&b, &a)?;
            Ok([dv, du])
        } else {
            self.rhs(&a, &b)
        }
    }
}

/// `(rtol, atol)` for numerically solved scalar components.
pub const SCALAR_TOL: (f64, f64) = (1e-12, 1e-14);

/// `(rtol, atol)` for the second-order A3 system.
pub const A3_TOL: (f64, f64) = (1e-13, 1e-15);

/// Absolute and relative tolerance of the integrating-factor quadratures.
pub const QUAD_TOL: f64 = 1e-10;

/// Integration tolerances used for the numerically solved components.
pub fn flow_tolerances<T: Real>() -> Tolerances<T> {
    Tolerances::new(SCALAR_TOL.0, SCALAR_TOL.1)
}

#[derive(Debug, Clone)]
enum Kind<T> {
    Constant(Complex<T>),
    Bernoulli { a: Complex<T>, b: Complex<T>, m: u32, y0: Complex<T>, limit: bool },
    Riccati { a0: Complex<T>, a1: Complex<T>, a2: Complex<T>, y0: Complex<T>, delta_sq: Complex<T> },
    /// `(state[index] - shift) / scale`
    Dense { sol: Arc<DenseOutput<T>>, index: usize, shift: Complex<T>, scale: Complex<T> },
    IntegratingFactor(Arc<IntegratingFactor<T>>),
}

/// Solution `t ↦ y(t)` of one scalar flow component.
#[derive(Debug, Clone)]
pub struct FlowSolution<T> {
    kind: Kind<T>,
    horizon: Option<T>,
}

impl<T: Real> FlowSolution<T> {
    pub fn constant(y0: Complex<T>) -> Self {
        FlowSolution { kind: Kind::Constant(y0), horizon: None }
    }

    /// First singularity at positive time, if one is known.
    pub fn horizon(&self) -> Option<T> {
        self.horizon
    }

    /// Last time the solution can be evaluated at (`None`: unbounded).
    pub fn valid_until(&self) -> Option<T> {
        match &self.kind {
            Kind::Dense { sol, .. } => Some(sol.t_end()),
            Kind::IntegratingFactor(f) => f.u.valid_until(),
            _ => self.horizon,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.kind, Kind::Constant(_) | Kind::Bernoulli { .. } | Kind::Riccati { .. })
    }

    pub fn eval(&self, t: T) -> Result<Complex<T>> {
        if let Some(h) = self.horizon {
            if t >= h {
                return Err(Error::BeyondHorizon { t: to_f64(t), horizon: to_f64(h) });
            }
        }
        match &self.kind {
            Kind::Constant(y) => Ok(*y),
            Kind::Bernoulli { a, b, m, y0, limit } => Ok(bernoulli_eval(*a, *b, *m, *y0, *limit, t)),
            Kind::Riccati { a0, a1, a2, y0, delta_sq } => Ok(riccati_eval(*a0, *a1, *a2, *y0, *delta_sq, t)),
            Kind::Dense { sol, index, shift, scale } => {
                if t < T::zero() {
                    return Err(Error::InvalidInput("negative time".into()));
                }
                let y = sol.eval(t)?;
                Ok((y[*index] - shift) / scale)
            }
            Kind::IntegratingFactor(f) => f.eval(t),
        }
    }
}

// Smallest positive real t in {base + n period : n ∈ Z}.
fn first_positive_real<T: Real>(base: Complex<T>, period: Complex<T>) -> Option<T> {
    let tol = lit::<T>(1e-9);
    if !base.re.is_finite() || !base.im.is_finite() {
        return None;
    }
    if period.im.abs() <= tol * period.norm() {
        if base.im.abs() > tol * (T::one() + base.norm()) {
            return None;
        }
        let p = period.re.abs();
        if p == T::zero() || !p.is_finite() {
            return (base.re > T::zero()).then_some(base.re);
        }
        let mut t = base.re - (base.re / p).floor() * p;
        if t <= tol * p {
            t = t + p;
        }
        return Some(t);
    }
    let n = (-base.im / period.im).round();
    let t = base + period * n;
    (t.im.abs() <= tol * (T::one() + t.re.abs()) && t.re > T::zero()).then_some(t.re)
}

/// Solution of `y' = a y + b y^{m+1}`.
pub fn bernoulli_solve<T: Real>(a: Complex<T>, b: Complex<T>, m: u32, y0: Complex<T>) -> FlowSolution<T> {
    let c = b * powu(&y0, m);
    let eps_a = lit::<T>(1e-8) * (T::one() + c.norm());
    let limit = a.norm() <= eps_a;
    let mf = lit::<T>(f64::from(m));
    let horizon = if c.is_zero() {
        None
    } else if limit {
        first_positive_real((c * mf).inv(), Complex::zero())
    } else {
        let w = Complex::<T>::one() + a / c;
        if w.is_zero() {
            None
        } else {
            let ma = a * mf;
            first_positive_real(w.ln() / ma, Complex::new(T::zero(), T::PI() * lit(2.0)) / ma)
        }
    };
    FlowSolution { kind: Kind::Bernoulli { a, b, m, y0, limit }, horizon }
}

fn bernoulli_eval<T: Real>(a: Complex<T>, b: Complex<T>, m: u32, y0: Complex<T>, limit: bool, t: T) -> Complex<T> {
    let c = b * powu(&y0, m);
    let mf = lit::<T>(f64::from(m));
    if limit {
        let d = Complex::<T>::one() - c * mf * t;
        return if m == 1 { y0 / d } else { y0 * d.powf(-T::one() / mf) };
    }
    let r = c / a;
    let d_at = |s: T| Complex::<T>::one() - r * expm1(a * mf * s);
    let d = d_at(t);
    let growth = (a * t).exp();
    if m == 1 {
        return y0 * growth / d;
    }
    // |D - 1| < 1 on [0, t] keeps D in the right half-plane, where the
    // principal branch is the continuous one
    let bound_exp = (a.re * mf * t).exp().max(T::one()) + T::one();
    let bound_series = (a.norm() * mf * t.abs()).exp() - T::one();
    let arg = if r.norm() * bound_exp.min(bound_series) < T::one() {
        d.arg()
    } else {
        unwrapped_arg(d_at, t)
    };
    let log_d = Complex::new(d.norm().ln(), arg);
    y0 * growth * (-log_d / mf).exp()
}

// Argument of d(t) continued from d(0) = 1 along [0, t].
fn unwrapped_arg<T: Real, F: Fn(T) -> Complex<T>>(d: F, t: T) -> T {
    let mut s = T::zero();
    let mut prev = Complex::one();
    let mut arg = T::zero();
    let mut ds = t / lit(16.0);
    let limit = lit::<T>(0.3);
    for _ in 0..100_000 {
        if (t - s).abs() <= T::epsilon() * t.abs() {
            break;
        }
        if (ds.abs()) > (t - s).abs() {
            ds = t - s;
        }
        let next = d(s + ds);
        let step = (next / prev).arg();
        if step.abs() > limit && ds.abs() > T::epsilon() * (T::one() + t.abs()) {
            ds = ds * lit(0.5);
            continue;
        }
        arg += step;
        prev = next;
        s += ds;
        if step.abs() < limit * lit(0.25) {
            ds = ds * lit(2.0);
        }
    }
    arg
}

/// Solution of `y' = a0 + a1 y + a2 y^2`.
pub fn riccati_solve<T: Real>(a0: Complex<T>, a1: Complex<T>, a2: Complex<T>, y0: Complex<T>) -> FlowSolution<T> {
    let delta_sq = a1 * a1 - a0 * a2 * lit::<T>(4.0);
    let k = a1 + a2 * y0 * lit::<T>(2.0);
    let tiny = lit::<T>(1e-14) * (T::one() + a1.norm() + (a0 * a2).norm().sqrt());
    // poles: cosh(z) = k sinh(z)/Δ with z = Δ t / 2
    let horizon = if delta_sq.norm().sqrt() <= tiny {
        if k.norm() == T::zero() {
            None
        } else {
            first_positive_real(k.inv() * lit::<T>(2.0), Complex::zero())
        }
    } else {
        let delta = delta_sq.sqrt();
        let period = Complex::new(T::zero(), T::PI() * lit(2.0)) / delta;
        if k.norm() == T::zero() {
            first_positive_real(period * lit::<T>(0.5), period)
        } else {
            let r = delta / k;
            let one = Complex::<T>::one();
            if (r - one).norm() == T::zero() || (r + one).norm() == T::zero() {
                None
            } else {
                first_positive_real(r.atanh() * lit::<T>(2.0) / delta, period)
            }
        }
    };
    FlowSolution { kind: Kind::Riccati { a0, a1, a2, y0, delta_sq }, horizon }
}

fn riccati_eval<T: Real>(a0: Complex<T>, a1: Complex<T>, a2: Complex<T>, y0: Complex<T>, delta_sq: Complex<T>, t: T) -> Complex<T> {
    let k = a1 + a2 * y0 * lit::<T>(2.0);
    let ht = lit::<T>(0.5) * t;
    // z^2 with z = Δ t / 2; cosh z and sinh(z)/Δ depend on Δ only through Δ^2
    let z2 = delta_sq * ht * ht;
    let (ch, sh) = if z2.norm() < lit(1e-2) {
        let series = |coef: [f64; 5]| coef.iter().rev().fold(Complex::<T>::zero(), |acc, &k| acc * z2 + lit::<T>(k));
        let ch = series([1.0, 1.0 / 2.0, 1.0 / 24.0, 1.0 / 720.0, 1.0 / 40320.0]);
        let shc = series([1.0, 1.0 / 6.0, 1.0 / 120.0, 1.0 / 5040.0, 1.0 / 362880.0]);
        (ch, shc * ht)
    } else {
        let delta = delta_sq.sqrt();
        let z = delta * ht;
        if z.re.abs() > lit(20.0) {
            // cosh/sinh would overflow; divide through by cosh
            let phi = z.tanh() / delta;
            (Complex::one(), phi)
        } else {
            (z.cosh(), z.sinh() / delta)
        }
    };
    (y0 * (ch + a1 * sh) + a0 * sh * lit::<T>(2.0)) / (ch - k * sh)
}

fn integrate_scalar<T, F>(mut f: F, y0: Complex<T>, t_max: T) -> Result<FlowSolution<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Complex<T>,
{
    let sol = autonomous::<T, _, fn(&[Complex<T>]) -> bool>(
        Method::Dop853,
        |y: &[Complex<T>], dy: &mut [Complex<T>]| dy[0] = f(y[0]),
        T::zero(),
        t_max,
        &[y0],
        &flow_tolerances(),
        None,
    )?;
    let horizon = match sol.termination() {
        Termination::StepCollapse { t_est } => Some(t_est),
        _ => None,
    };
    Ok(FlowSolution {
        kind: Kind::Dense { sol: Arc::new(sol), index: 0, shift: Complex::zero(), scale: Complex::one() },
        horizon,
    })
}

/// Solves an A1 flow. `t_max` bounds the numerically integrated components.
pub fn a1_solve<T: Real>(spec: &A1Spec<Complex<T>>, y0: [Complex<T>; 2], t_max: T) -> Result<[FlowSolution<T>; 2]> {
    check_indices(spec.m1, spec.m2)?;
    if spec.alpha.is_empty() || spec.alpha.len() != spec.beta.len() {
        return Err(Error::InvalidInput("A1 needs alpha and beta of equal length L+1".into()));
    }
    let z = Complex::zero();
    if spec.alpha.len() <= 2 {
        let u = bernoulli_solve(spec.alpha[0], spec.alpha.get(1).copied().unwrap_or(z), spec.m2, y0[0]);
        let v = bernoulli_solve(spec.beta[0], spec.beta.get(1).copied().unwrap_or(z), spec.m1, y0[1]);
        return Ok([u, v]);
    }
    let u = integrate_scalar(|u| spec.rhs(&u, &z).map(|d| d[0]).unwrap_or(z), y0[0], t_max)?;
    let v = integrate_scalar(|v| spec.rhs(&z, &v).map(|d| d[1]).unwrap_or(z), y0[1], t_max)?;
    Ok([u, v])
}

/// `v(t) = e^{H(t)} (v0 + ∫_0^t e^{-H} g(u))`, `H = ∫_0^t h(u)`.
#[derive(Debug)]
struct IntegratingFactor<T> {
    u: FlowSolution<T>,
    beta: Vec<Complex<T>>,
    gamma: Vec<Complex<T>>,
    shift: u32,
    v0: Complex<T>,
    knots: Vec<T>,
    h_cum: Vec<Complex<T>>,
    g_cum: Vec<Complex<T>>,
}

impl<T: Real> IntegratingFactor<T> {
    fn h(&self, s: T) -> Result<Complex<T>> {
        let u = self.u.eval(s)?;
        let mut acc = Complex::zero();
        for (l, b) in self.beta.iter().enumerate().skip(1) {
            acc = acc + b * powu(&u, l as u32 - 1);
        }
        Ok(acc)
    }

    fn g(&self, s: T) -> Result<Complex<T>> {
        let u = self.u.eval(s)?;
        let mut acc = Complex::zero();
        for (l, c) in self.gamma.iter().enumerate() {
            acc = acc + c * powu(&u, l as u32 + self.shift - 1);
        }
        Ok(acc)
    }

    fn has_source(&self) -> bool {
        self.gamma.iter().any(|g| !g.is_zero())
    }

    fn h_from(&self, k: usize, t: T) -> Result<Complex<T>> {
        Ok(self.h_cum[k] + quad::integrate(|s| self.h(s), self.knots[k], t, QUAD_TOL, QUAD_TOL)?)
    }

    fn g_from(&self, k: usize, t: T) -> Result<Complex<T>> {
        let integrand = |s: T| -> Result<Complex<T>> { Ok((-self.h_from(k, s)?).exp() * self.g(s)?) };
        Ok(self.g_cum[k] + quad::integrate(integrand, self.knots[k], t, QUAD_TOL, QUAD_TOL)?)
    }

    fn build(u: FlowSolution<T>, spec: &A2Spec<Complex<T>>, shift: u32, v0: Complex<T>, t_max: T) -> Result<Self> {
        let mut t_end = t_max;
        if let Some(h) = u.horizon() {
            t_end = t_end.min(h * lit(0.999));
        }
        if let Some(v) = u.valid_until() {
            t_end = t_end.min(v);
        }
        let n = (to_f64(t_end) * 16.0).ceil().clamp(1.0, 4096.0) as usize;
        let mut f = IntegratingFactor {
            u,
            beta: spec.beta.clone(),
            gamma: spec.gamma.clone(),
            shift,
            v0,
            knots: vec![T::zero()],
            h_cum: vec![Complex::zero()],
            g_cum: vec![Complex::zero()],
        };
        if t_end <= T::zero() {
            return Ok(f);
        }
        for i in 1..=n {
            let t = t_end * lit(i as f64 / n as f64);
            let k = f.knots.len() - 1;
            let h = f.h_from(k, t)?;
            let g = if f.has_source() { f.g_from(k, t)? } else { Complex::zero() };
            f.knots.push(t);
            f.h_cum.push(h);
            f.g_cum.push(g);
        }
        Ok(f)
    }

    fn eval(&self, t: T) -> Result<Complex<T>> {
        if t < T::zero() {
            return Err(Error::InvalidInput("negative time".into()));
        }
        let k = self.knots.partition_point(|&s| s <= t).saturating_sub(1);
        let h = self.h_from(k, t)?;
        let g = if self.has_source() { self.g_from(k, t)? } else { Complex::zero() };
        Ok(h.exp() * (self.v0 + g))
    }
}

/// Solves an A2 flow: closed-form Riccati or dense integration for `u`,
/// integrating factor plus quadrature for `v`.
pub fn a2_solve<T: Real>(spec: &A2Spec<Complex<T>>, y0: [Complex<T>; 2], t_max: T) -> Result<[FlowSolution<T>; 2]> {
    let shift = spec.gamma_shift()?;
    let z = Complex::zero();
    let degree = spec.alpha.iter().rposition(|a| !a.is_zero()).unwrap_or(0);
    let u = if degree <= 2 {
        let a = |i: usize| spec.alpha.get(i).copied().unwrap_or(z);
        riccati_solve(a(0), a(1), a(2), y0[0])
    } else {
        integrate_scalar(|u| spec.rhs(&u, &z).map(|d| d[0]).unwrap_or(z), y0[0], t_max)?
    };
    let passive = spec.beta.iter().skip(1).all(|b| b.is_zero()) && shift.is_none();
    let v = if passive {
        FlowSolution::constant(y0[1])
    } else {
        let horizon = u.horizon();
        let f = IntegratingFactor::build(u.clone(), spec, shift.unwrap_or(1), y0[1], t_max)?;
        FlowSolution { kind: Kind::IntegratingFactor(Arc::new(f)), horizon }
    };
    Ok([u, v])
}

/// `½ (u')^2 - α1 (β0 u^m / m + β1 u^{2m} / (2m))` with `u' = α0 + α1 v`.
pub fn a3_energy<T: Real>(spec: &A3Spec<Complex<T>>, u: Complex<T>, du: Complex<T>) -> Complex<T> {
    let (kin, pot) = a3_terms(spec, u, du);
    kin - pot
}

fn a3_terms<T: Real>(spec: &A3Spec<Complex<T>>, u: Complex<T>, du: Complex<T>) -> (Complex<T>, Complex<T>) {
    let m = lit::<T>(f64::from(spec.m));
    let pot = spec.beta0 * powu(&u, spec.m) / m + spec.beta1 * powu(&u, 2 * spec.m) / (m * lit::<T>(2.0));
    (du * du * lit::<T>(0.5), spec.alpha1 * pot)
}

/// Solves an A3 flow through the second-order equation for `u`, checking
/// conservation of [`a3_energy`] along the way.
pub fn a3_solve<T: Real>(spec: &A3Spec<Complex<T>>, y0: [Complex<T>; 2], t_max: T) -> Result<[FlowSolution<T>; 2]> {
    let z = Complex::<T>::zero();
    spec.rhs(&z, &z)?;
    let m = spec.m;
    let tol = Tolerances::new(A3_TOL.0, A3_TOL.1);
    let steps = |e| match e {
        Error::MaxStepsExceeded(n) => Error::NonConvergence(format!("{n} steps without reaching t_max")),
        other => other,
    };
    if spec.alpha1.is_zero() {
        // u is linear in t and v a polynomial quadrature; no energy to monitor
        let sol = dop853(
            |_, y: &[Complex<T>], dy: &mut [Complex<T>]| {
                dy[0] = spec.alpha0;
                dy[1] = spec.beta0 * powu(&y[0], m - 1) + spec.beta1 * powu(&y[0], 2 * m - 1);
            },
            T::zero(),
            t_max,
            &y0,
            &tol,
        )
        .map_err(steps)?;
        let sol = Arc::new(sol);
        let one = Complex::one();
        return Ok([
            FlowSolution { kind: Kind::Dense { sol: sol.clone(), index: 0, shift: z, scale: one }, horizon: None },
            FlowSolution { kind: Kind::Dense { sol, index: 1, shift: z, scale: one }, horizon: None },
        ]);
    }
    let force = |u: Complex<T>| spec.alpha1 * (spec.beta0 * powu(&u, m - 1) + spec.beta1 * powu(&u, 2 * m - 1));
    let w0 = spec.alpha0 + spec.alpha1 * y0[1];
    let sol = autonomous::<T, _, fn(&[Complex<T>]) -> bool>(
        Method::Dop853,
        |y: &[Complex<T>], dy: &mut [Complex<T>]| {
            dy[0] = y[1];
            dy[1] = force(y[0]);
        },
        T::zero(),
        t_max,
        &[y0[0], w0],
        &tol,
        None,
    )
    .map_err(steps)?;
    let e0 = a3_energy(spec, y0[0], w0);
    let bound = lit::<T>(1e-8) * (T::one() + e0.norm());
    // once the terms of E dwarf E itself, the cancellation is below what the
    // integrator resolves; stop monitoring there (that only happens near a pole)
    let cutoff = lit::<T>(1e4) * (T::one() + e0.norm());
    for t in sol.knots() {
        let y = sol.eval(t)?;
        let (kin, pot) = a3_terms(spec, y[0], y[1]);
        if kin.norm() + pot.norm() > cutoff {
            break;
        }
        let drift = (kin - pot - e0).norm();
        if drift > bound {
            return Err(Error::EnergyDriftExceeded { t: to_f64(t), drift: to_f64(drift), bound: to_f64(bound) });
        }
    }
    let horizon = match sol.termination() {
        Termination::StepCollapse { t_est } => Some(t_est),
        _ => None,
    };
    let sol = Arc::new(sol);
    let u = FlowSolution { kind: Kind::Dense { sol: sol.clone(), index: 0, shift: z, scale: Complex::one() }, horizon };
    let v = FlowSolution { kind: Kind::Dense { sol, index: 1, shift: spec.alpha0, scale: spec.alpha1 }, horizon };
    Ok([u, v])
}

/// Dispatches to the family solver; returns `[u, v]`.
pub fn solve<T: Real>(spec: &FlowSpec<Complex<T>>, y0: [Complex<T>; 2], t_max: T) -> Result<[FlowSolution<T>; 2]> {
    match spec {
        FlowSpec::A1(s) => a1_solve(s, y0, t_max),
        FlowSpec::A2(s) => a2_solve(s, y0, t_max),
        FlowSpec::A3(s) => a3_solve(s, y0, t_max),
    }
}
