//! Autonomous integration with detours through complex time.
//!
//! A movable singularity close to the real axis makes the solution spike and
//! magnifies the local error of every step taken near it. Autonomous systems
//! are holomorphic in `t`, so the stretch around such a spike can be replaced
//! by a rectangular path through complex time that keeps its distance from
//! the singularity. The singularities may be branch points, so the detour
//! goes round on the side the real axis passes, and the landing state is
//! accepted only if it agrees with the real-axis run to a loose tolerance.

use num_complex::Complex;
use num_traits::Zero;

use super::{all_finite, drive, max_norm, DenseOutput, Dop853, Dopri5, State, Termination, Tolerances};
use crate::error::Result;
use crate::scalar::{lit, Real};

/// Embedded Runge-Kutta pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Dormand-Prince 5(4).
    #[default]
    Dopri5,
    /// Dormand-Prince 8(5,3); preferable below `rtol ~ 1e-11`.
    Dop853,
}

/// Spike height over the solution `PROBE` singularity distances away that
/// triggers a detour.
const SPIKE_RATIO: f64 = 3.0;
const PROBE: f64 = 16.0;
/// Range of detour half-widths in units of the singularity's distance from
/// the axis.
const MIN_SPREAD: f64 = 4.0;
const MAX_SPREAD: f64 = 1024.0;
/// Magnitude drop per doubling of the distance that still counts as the
/// singularity's own falloff.
const FALLOFF: f64 = 1.3;
/// Relative disagreement with the real-axis run above which a detour is
/// taken to have changed sheet.
const LANDING_TOL: f64 = 1e-3;
const MAX_DETOURS: usize = 256;

fn run<T, F, P>(method: Method, f: &mut F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>, stop: Option<&P>) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
    P: Fn(&[Complex<T>]) -> bool,
{
    let g = |_: T, y: &[Complex<T>], dy: &mut [Complex<T>]| f(y, dy);
    match method {
        Method::Dopri5 => drive::<T, _, Dopri5<T>, P>(g, t0, t1, y0, tol, stop),
        Method::Dop853 => drive::<T, _, Dop853<T>, P>(g, t0, t1, y0, tol, stop),
    }
}

/// Integrates `y' = f(y)` from `t0` to `t1`, detouring round singularities
/// that pass close to the real axis. `stop` behaves as in the plain drivers.
pub fn autonomous<T, F, P>(method: Method, mut f: F, t0: T, t1: T, y0: &[Complex<T>], tol: &Tolerances<T>, stop: Option<&P>) -> Result<DenseOutput<T>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
    P: Fn(&[Complex<T>]) -> bool,
{
    let mut leg = run(method, &mut f, t0, t1, y0, tol, stop)?;
    let mut out = DenseOutput { segments: Vec::new(), rhs_evals: 0, ..leg.clone() };
    let mut detours = 0;
    loop {
        let found = if detours < MAX_DETOURS { find_detour(method, &mut f, &leg, tol)? } else { None };
        let Some(d) = found else {
            out.rhs_evals += leg.rhs_evals;
            out.segments.append(&mut leg.segments);
            out.t_end = leg.t_end;
            out.termination = leg.termination;
            return Ok(out);
        };
        detours += 1;
        // keep the run up to the peak, then fill in back from the landing point
        let mut back = run::<T, F, P>(method, &mut f, d.tb, d.t_peak, &d.yb, tol, None)?;
        out.rhs_evals += leg.rhs_evals + back.rhs_evals + d.evals;
        out.segments.extend(leg.segments.drain(..d.peak));
        back.segments.reverse();
        out.segments.append(&mut back.segments);
        leg = run(method, &mut f, d.tb, t1, &d.yb, tol, stop)?;
        if leg.segments.is_empty() {
            out.t_end = d.tb;
            out.termination = leg.termination;
            return Ok(out);
        }
    }
}

struct Detour<T> {
    /// Number of segments of the run that end at or before the peak.
    peak: usize,
    t_peak: T,
    tb: T,
    yb: State<T>,
    evals: usize,
}

// Scans the knots of `leg` for the first spike worth a
// detour that lands back on the run's sheet.
fn find_detour<T, F>(method: Method, f: &mut F, leg: &DenseOutput<T>, tol: &Tolerances<T>) -> Result<Option<Detour<T>>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    if leg.t_end < leg.t0 {
        return Ok(None);
    }
    let knots = leg.knots();
    let mags: Vec<T> = knots.iter().map(|&t| leg.eval(t).map(|y| max_norm(&y))).collect::<Result<_>>()?;
    let (lo, hi) = (leg.t0, leg.t_end);
    for k in 1..knots.len().saturating_sub(1) {
        if !(mags[k] >= mags[k - 1] && mags[k] > mags[k + 1]) {
            continue;
        }
        let y = leg.eval(knots[k])?;
        let Some(ts) = singularity_estimate(f, knots[k], &y) else { continue };
        let delta = ts.im.abs();
        if delta.is_zero() || !delta.is_finite() {
            continue;
        }
        let probe = |d: T| -> Result<T> {
            let m = |t: T| leg.eval(t.max(lo).min(hi)).map(|y| max_norm(&y));
            Ok(m(ts.re - d)?.max(m(ts.re + d)?))
        };
        if mags[k] < lit::<T>(SPIKE_RATIO) * probe(delta * lit(PROBE))? {
            continue;
        }
        // widen while the magnitude still falls off like a power of the
        // distance; beyond that the solution is back at its own scale
        let two = lit::<T>(2.0);
        let mut r = delta * lit(MIN_SPREAD);
        while r < delta * lit(MAX_SPREAD) && ts.re - two * r > lo && ts.re + two * r < hi && probe(r)? > lit::<T>(FALLOFF) * probe(two * r)? {
            r = r * two;
        }
        // widest detour first; narrower ones if the landing disagrees
        while r >= delta * lit(MIN_SPREAD) {
            let (ta, tb) = (ts.re - r, ts.re + r);
            if ta > lo && tb < hi && ta < knots[k] && knots[k] < tb {
                if let Some(d) = try_detour(method, f, leg, ts, r, tol)? {
                    return Ok(Some(Detour { peak: k, t_peak: knots[k], tb, yb: d.0, evals: d.1 }));
                }
            }
            r = r / two;
        }
    }
    Ok(None)
}

// Rectangle of half-width `r` and height `3r/4` round the estimate `ts`, on
// the side away from it; the landing state if it matches the real-axis run.
fn try_detour<T, F>(method: Method, f: &mut F, leg: &DenseOutput<T>, ts: Complex<T>, r: T, tol: &Tolerances<T>) -> Result<Option<(State<T>, usize)>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    let (ta, tb) = (ts.re - r, ts.re + r);
    let (ya, yr) = (leg.eval(ta)?, leg.eval(tb)?);
    let side = if ts.im > T::zero() { -T::one() } else { T::one() };
    let h = Complex::new(T::zero(), side * r * lit(0.75));
    let a = Complex::new(ta, T::zero());
    let b = Complex::new(tb, T::zero());
    let Some((yb, evals)) = along(method, f, &[a, a + h, b + h, b], &ya, tol)? else { return Ok(None) };
    let diff = yb.iter().zip(&yr).map(|(p, q)| *p - *q).collect::<Vec<_>>();
    if max_norm(&diff) > lit::<T>(LANDING_TOL) * (T::one() + max_norm(&yr)) {
        return Ok(None);
    }
    Ok(Some((yb, evals)))
}

// Nearest singularity of the dominant component from its first two
// derivatives, assuming local behaviour `c (t - t*)^-p` for some `p`.
fn singularity_estimate<T, F>(f: &mut F, t: T, y: &[Complex<T>]) -> Option<Complex<T>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    let n = y.len();
    let mut d1 = vec![Complex::zero(); n];
    f(y, &mut d1);
    let (ny, nd) = (max_norm(y), max_norm(&d1));
    if !(ny > T::zero() && nd > T::zero()) {
        return None;
    }
    let eps = lit::<T>(1e-6) * ny / nd;
    let shifted = |s: T| y.iter().zip(&d1).map(|(a, b)| *a + *b * s).collect::<Vec<_>>();
    let (mut fp, mut fm) = (vec![Complex::zero(); n], vec![Complex::zero(); n]);
    f(&shifted(eps), &mut fp);
    f(&shifted(-eps), &mut fm);
    let i = (0..n).max_by(|&a, &b| y[a].norm().partial_cmp(&y[b].norm()).unwrap_or(std::cmp::Ordering::Equal))?;
    let d2 = (fp[i] - fm[i]) / (eps * lit(2.0));
    let denom = d1[i] / y[i] - d2 / d1[i];
    let ts = Complex::new(t, T::zero()) - denom.inv();
    (ts.re.is_finite() && ts.im.is_finite()).then_some(ts)
}

// Integrates along the polygon through `nodes`; `None` if any leg fails.
fn along<T, F>(method: Method, f: &mut F, nodes: &[Complex<T>], y0: &[Complex<T>], tol: &Tolerances<T>) -> Result<Option<(State<T>, usize)>>
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    let mut y = y0.to_vec();
    let mut evals = 0;
    for w in nodes.windows(2) {
        let d = w[1] - w[0];
        let len = d.norm();
        let u = d / len;
        let mut g = |y: &[Complex<T>], dy: &mut [Complex<T>]| {
            f(y, dy);
            for v in dy.iter_mut() {
                *v = *v * u;
            }
        };
        let sol = match run::<T, _, fn(&[Complex<T>]) -> bool>(method, &mut g, T::zero(), len, &y, tol, None) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        evals += sol.rhs_evals;
        if sol.termination != Termination::Completed {
            return Ok(None);
        }
        y = sol.final_state();
        if !all_finite(&y) {
            return Ok(None);
        }
    }
    Ok(Some((y, evals)))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    // u'' = 2 u^3 is solved by u = 1 / (t - t*); errors committed next to the
    // pole are strongly amplified afterwards.
    #[test]
    fn detour_beats_the_real_axis_near_a_pole() {
        let ts = C::new(0.5, 1e-3);
        let exact = |t: f64| (t - ts).inv();
        let f = |y: &[C], dy: &mut [C]| {
            dy[0] = y[1];
            dy[1] = y[0].powu(3) * 2.0;
        };
        let tol = Tolerances::new(1e-10, 1e-12);
        let y0 = [exact(0.0), -exact(0.0).powu(2)];
        let vaulted = autonomous::<f64, _, fn(&[C]) -> bool>(Method::Dop853, f, 0.0, 1.0, &y0, &tol, None).unwrap();
        let mut g = f;
        let plain = run::<f64, _, fn(&[C]) -> bool>(Method::Dop853, &mut g, 0.0, 1.0, &y0, &tol, None).unwrap();
        let err = |s: &DenseOutput<f64>| {
            (0..=100).map(|k| k as f64 / 100.0).map(|t| (s.eval(t).unwrap()[0] - exact(t)).norm() / exact(t).norm()).fold(0.0, f64::max)
        };
        assert!(err(&vaulted) < 0.1 * err(&plain), "{} vs {}", err(&vaulted), err(&plain));
        assert!(vaulted.knots().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn smooth_problems_are_untouched() {
        let f = |y: &[C], dy: &mut [C]| dy[0] = C::new(0.0, 1.0) * y[0];
        let tol = Tolerances::new(1e-10, 1e-12);
        let s = autonomous::<f64, _, fn(&[C]) -> bool>(Method::Dopri5, f, 0.0, 3.0, &[C::new(1.0, 0.0)], &tol, None).unwrap();
        assert!((s.final_state()[0] - C::new(0.0, 3.0).exp()).norm() < 1e-8);
        let back = autonomous::<f64, _, fn(&[C]) -> bool>(Method::Dopri5, f, 3.0, 0.0, &s.final_state(), &tol, None).unwrap();
        assert!((back.final_state()[0] - C::new(1.0, 0.0)).norm() < 1e-8);
    }
}
