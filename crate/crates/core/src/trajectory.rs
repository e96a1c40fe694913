//! Zeros trajectories obtained by evolving the coefficients and re-solving the
//! cubic at each sample.

use std::fmt;

use num_complex::Complex;

use crate::bridge::{
    check_route_preconditions, coeffs_from_zeros, double_root_residual, recover_zeros_detailed, transfer, CoeffPair,
    Coeffs, Recovery, Zeros, DEGENERACY_THRESHOLD,
};
use crate::catalog::{flow_header, x0_to_y0, Header, ModelId};
use crate::error::{Error, Result};
use crate::flows::{solve, FlowSolution, FlowSpec};
use crate::params::ModelParams;
use crate::scalar::{lit, to_f64, Real};

/// Local refinement factor for the branch-jump retry.
pub const REFINE_FACTOR: usize = 10;

/// Nesting limit of the retry (local density up to `REFINE_FACTOR^MAX_REFINE`).
pub const MAX_REFINE: u32 = 8;

/// Relative gap `|x1 - x2| / scale` at which a trajectory is stopped as a
/// collision. Recovery next to a multiple zero loses about half the working
/// digits, so smaller gaps are not resolved from the coefficients.
pub const NEAR_COLLISION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    /// `x1` and `x2` merge into a triple zero.
    Collision,
    /// `x1` reaches zero on a route that divides by it.
    X1Vanishes,
    /// Coefficients (and zeros) diverge.
    BlowUp,
}

impl Cause {
    pub fn as_str(self) -> &'static str {
        match self {
            Cause::Collision => "collision",
            Cause::X1Vanishes => "x1_vanishes",
            Cause::BlowUp => "blow_up",
        }
    }
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryEnd<T> {
    Completed,
    SingularityReached { t_est: T, cause: Cause },
    /// The coefficient solution stopped being available at `t` without a
    /// detected singularity.
    Horizon { t: T },
}

impl<T: Real> TrajectoryEnd<T> {
    pub fn singularity(&self) -> Option<(T, Cause)> {
        match *self {
            TrajectoryEnd::SingularityReached { t_est, cause } => Some((t_est, cause)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDiagnostics<T> {
    /// Double-root residual of the flow coefficients completed by the
    /// recovered zeros.
    pub residual: T,
    pub branch_distance: T,
    pub route: CoeffPair,
    /// Zeros within the degeneracy threshold of each other.
    pub triple_root: bool,
    /// The sample was reached through the dense retry.
    pub refined: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Zeros<T>>,
    pub diagnostics: Vec<SampleDiagnostics<T>>,
    pub termination: TrajectoryEnd<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(T, Zeros<T>)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    pub fn max_relative_residual(&self) -> T {
        self.diagnostics.iter().fold(T::zero(), |m, d| m.max(d.residual))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Pair used for zero recovery; `None` uses the model's active pair.
    pub route: Option<CoeffPair>,
    pub header: Header,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { route: None, header: Header::Effective }
    }
}

/// `n + 1` equispaced times on `[0, t1]`.
pub fn uniform_times<T: Real>(t1: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    (0..=n).map(|i| t1 * lit(i as f64 / n as f64)).collect()
}

/// Evolves the model's coefficients in closed or quadrature form and recovers
/// the zeros at each of `times`.
pub fn algebraic_solve<T: Real>(
    id: ModelId,
    p: &ModelParams<Complex<T>>,
    z0: &Zeros<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    algebraic_solve_with(id, p, z0, times, &SolveOptions::default())
}

pub fn algebraic_solve_with<T: Real>(
    id: ModelId,
    p: &ModelParams<Complex<T>>,
    z0: &Zeros<T>,
    times: &[T],
    opts: &SolveOptions,
) -> Result<Trajectory<T>> {
    validate_times(times)?;
    if !z0.is_finite() {
        return Err(Error::InvalidInput("initial zeros must be finite".into()));
    }
    let spec = flow_header(id, p, opts.header);
    let native = spec.pair();
    let route = opts.route.unwrap_or(native);
    check_route_preconditions(native, z0)?;
    check_route_preconditions(route, z0)?;
    if id.is_rational() && z0.x1.norm() < lit::<T>(DEGENERACY_THRESHOLD) * z0.scale() {
        return Err(Error::DivisionByZeroX1(to_f64(z0.x1.norm())));
    }

    let (y0, _) = x0_to_y0(native, z0);
    let swapped = spec.swapped();
    let uv0 = if swapped { [y0[1], y0[0]] } else { y0 };
    let t_last = *times.last().expect("validated");
    let [su, sv] = solve(&spec, uv0, t_last)?;
    let path = CoeffPath { u: su, v: sv, spec: spec.clone(), swapped, native, route };

    let watch_x1 = id.is_rational() || route.divides_by_x1() || route.recovery_divides_by_x1();
    let thr = lit::<T>(DEGENERACY_THRESHOLD);
    let horizon = path.horizon();
    let available = path.available();

    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), diagnostics: Vec::new(), termination: TrajectoryEnd::Completed };
    let mut prev = *z0;
    let mut prev_t = T::zero();
    for &t in times {
        if let Some(h) = horizon {
            if t >= h {
                traj.termination = TrajectoryEnd::SingularityReached { t_est: h, cause: Cause::BlowUp };
                break;
            }
        }
        if let Some(v) = available {
            if t > v {
                traj.termination = TrajectoryEnd::Horizon { t: v };
                break;
            }
        }
        let step = match path.recover_continued(prev_t, t, &prev) {
            Ok(s) => s,
            Err(Error::DivisionByZeroX1(_)) => {
                traj.termination = TrajectoryEnd::SingularityReached { t_est: t, cause: Cause::X1Vanishes };
                break;
            }
            Err(Error::ZeroCollision(_)) => {
                traj.termination = TrajectoryEnd::SingularityReached { t_est: t, cause: Cause::Collision };
                break;
            }
            // candidates only merge at a triple zero or at x1 = 0
            Err(Error::AmbiguousBranch(_)) => {
                let cause = if prev.x1.norm() < (prev.x1 - prev.x2).norm() { Cause::X1Vanishes } else { Cause::Collision };
                traj.termination = TrajectoryEnd::SingularityReached { t_est: t, cause };
                break;
            }
            Err(Error::BeyondHorizon { horizon, .. }) => {
                traj.termination = TrajectoryEnd::SingularityReached { t_est: lit(horizon), cause: Cause::BlowUp };
                break;
            }
            Err(e) => return Err(e),
        };
        let z = step.rec.zeros;
        if !z.is_finite() {
            traj.termination = TrajectoryEnd::SingularityReached { t_est: t, cause: Cause::BlowUp };
            break;
        }
        let near = |z: &Zeros<T>| (z.x1 - z.x2).norm() < lit::<T>(NEAR_COLLISION) * z.scale();
        let vanishing = |z: &Zeros<T>| watch_x1 && z.x1.norm() < thr * z.scale();
        // a near-collision strictly between samples
        if let Some((a, za, b)) = step.dip {
            if path.recover_continued(a, b, &za).is_ok_and(|s| near(&s.rec.zeros)) {
                let t_est = path.crossing(a, b, &za, near);
                traj.termination = TrajectoryEnd::SingularityReached { t_est, cause: Cause::Collision };
                break;
            }
        }
        let gap = (z.x1 - z.x2).norm();
        let triple_root = gap < thr * z.scale();
        traj.times.push(t);
        traj.states.push(z);
        traj.diagnostics.push(SampleDiagnostics {
            residual: path.residual(&step.y, &z),
            branch_distance: step.rec.branch_distance,
            route,
            triple_root,
            refined: step.refined,
        });
        if t > T::zero() {
            let cause = if near(&z) {
                Some(Cause::Collision)
            } else if vanishing(&z) {
                Some(Cause::X1Vanishes)
            } else {
                None
            };
            if let Some(cause) = cause {
                let t_est = path.crossing(prev_t, t, &prev, |z| near(z) || vanishing(z));
                traj.termination = TrajectoryEnd::SingularityReached { t_est, cause };
                break;
            }
        }
        prev = z;
        prev_t = t;
    }
    Ok(traj)
}

fn validate_times<T: Real>(times: &[T]) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidInput("empty time grid".into())),
        Some(t) if *t != T::zero() => return Err(Error::InvalidInput("time grid must start at 0".into())),
        _ => {}
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

struct Step<T> {
    rec: Recovery<T>,
    /// Active coefficients at the sample, ascending index order.
    y: [Complex<T>; 2],
    refined: bool,
    /// First sub-interval `(start, state at start, probe time)` whose cubic
    /// interpolant dips below [`NEAR_COLLISION`].
    dip: Option<(T, Zeros<T>, T)>,
}

// Probes the cubic Hermite interpolant of the zeros between two states with
// known velocities for a relative gap below NEAR_COLLISION.
fn hermite_dip<T: Real>(t0: T, z0: &Zeros<T>, v0: (Complex<T>, Complex<T>), t1: T, z1: &Zeros<T>, v1: (Complex<T>, Complex<T>)) -> Option<T> {
    const PROBES: usize = 8;
    let h = t1 - t0;
    let hc = Complex::from(h);
    let cubic = |a: Complex<T>, da: Complex<T>, b: Complex<T>, db: Complex<T>, s: T| {
        let (s2, s3) = (s * s, s * s * s);
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        a * (two * s3 - three * s2 + T::one()) + da * hc * (s3 - two * s2 + s) + b * (three * s2 - two * s3) + db * hc * (s3 - s2)
    };
    (1..PROBES).find_map(|j| {
        let s = lit::<T>(j as f64 / PROBES as f64);
        let z = Zeros::new(cubic(z0.x1, v0.0, z1.x1, v1.0, s), cubic(z0.x2, v0.1, z1.x2, v1.1, s));
        ((z.x1 - z.x2).norm() < lit::<T>(NEAR_COLLISION) * z.scale()).then(|| t0 + h * s)
    })
}

struct CoeffPath<T: Real> {
    u: FlowSolution<T>,
    v: FlowSolution<T>,
    spec: FlowSpec<Complex<T>>,
    swapped: bool,
    native: CoeffPair,
    route: CoeffPair,
}

impl<T: Real> CoeffPath<T> {
    fn horizon(&self) -> Option<T> {
        match (self.u.horizon(), self.v.horizon()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn available(&self) -> Option<T> {
        match (self.u.valid_until(), self.v.valid_until()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn coeffs(&self, t: T) -> Result<[Complex<T>; 2]> {
        let (u, v) = (self.u.eval(t)?, self.v.eval(t)?);
        Ok(if self.swapped { [v, u] } else { [u, v] })
    }

    fn recover(&self, y: [Complex<T>; 2], hint: &Zeros<T>) -> Result<Recovery<T>> {
        let rec = recover_zeros_detailed(self.native, y, None, Some(hint))?;
        if self.route == self.native {
            return Ok(rec);
        }
        let full = coeffs_from_zeros(&rec.zeros);
        check_route_preconditions(self.route, &rec.zeros)?;
        recover_zeros_detailed(self.route, self.route.project(&full), None, Some(hint))
    }

    fn recover_at(&self, t: T, hint: &Zeros<T>) -> Result<Step<T>> {
        let y = self.coeffs(t)?;
        Ok(Step { rec: self.recover(y, hint)?, y, refined: false, dip: None })
    }

    // Zero velocities at `z` with active coefficients `y`.
    fn velocity(&self, z: &Zeros<T>, y: [Complex<T>; 2]) -> Option<(Complex<T>, Complex<T>)> {
        let ydot = self.spec.rhs_ordered(y).ok()?;
        let v = transfer(self.native, &z.x1, &z.x2, ydot).ok()?;
        (v.0.norm() + v.1.norm()).is_finite().then_some(v)
    }

    // Recovery at `t` continued from `prev` at `t_prev`: the candidate nearest
    // an Euler prediction is taken when its distance to the competing
    // candidates is at least 10x both the prediction miss and the trapezoidal
    // corrector miss. Otherwise the interval is resampled REFINE_FACTOR times
    // denser, recursively up to MAX_REFINE.
    fn recover_continued(&self, t_prev: T, t: T, prev: &Zeros<T>) -> Result<Step<T>> {
        self.recover_refined(t_prev, t, prev, 0)
    }

    fn recover_refined(&self, t_prev: T, t: T, prev: &Zeros<T>, depth: u32) -> Result<Step<T>> {
        let last_level = t == t_prev || depth == MAX_REFINE;
        let dt = Complex::from(t - t_prev);
        let v0 = if t == t_prev { None } else { self.coeffs(t_prev).ok().and_then(|y| self.velocity(prev, y)) };
        let pred = v0.map_or(*prev, |(a, b)| Zeros::new(prev.x1 + a * dt, prev.x2 + b * dt));
        // the velocity is unbounded next to a collision; fall back to `prev`
        let attempt = match self.recover_at(t, &pred) {
            Err(Error::AmbiguousBranch(_)) if v0.is_some() => self.recover_at(t, prev),
            other => other,
        };
        match attempt {
            Ok(mut step) => {
                let z = step.rec.zeros;
                let v1 = self.velocity(&z, step.y);
                let miss = match (v0, v1) {
                    (Some(a), Some(b)) => {
                        let corr = prev.x1 + (a.0 + b.0) * dt * lit::<T>(0.5);
                        (z.x1 - pred.x1).norm().max((z.x1 - corr).norm())
                    }
                    _ => z.distance(prev),
                };
                if last_level || step.rec.branch_distance >= lit::<T>(REFINE_FACTOR as f64) * miss {
                    if let (Some(a), Some(b)) = (v0, v1) {
                        step.dip = hermite_dip(t_prev, prev, a, t, &z, b).map(|tp| (t_prev, *prev, tp));
                    }
                    return Ok(step);
                }
            }
            // a closer hint may separate the candidates
            Err(Error::AmbiguousBranch(_)) if !last_level => {}
            Err(e) => return Err(e),
        }
        let mut hint = *prev;
        let mut s0 = t_prev;
        let mut last = None;
        let mut dip = None;
        for k in 1..=REFINE_FACTOR {
            let s = t_prev + (t - t_prev) * lit(k as f64 / REFINE_FACTOR as f64);
            let sub = self.recover_refined(s0, s, &hint, depth + 1)?;
            hint = sub.rec.zeros;
            s0 = s;
            dip = dip.or(sub.dip);
            last = Some(sub);
        }
        let mut step = last.expect("at least one refinement step");
        step.refined = true;
        step.dip = dip;
        Ok(step)
    }

    // Bisects `(t_prev, t]` for the first time `hit` holds, tracking the zeros
    // from `prev`; `t` itself if the intermediate recoveries fail.
    fn crossing(&self, t_prev: T, t: T, prev: &Zeros<T>, hit: impl Fn(&Zeros<T>) -> bool) -> T {
        let (mut lo, mut hi, mut z_lo) = (t_prev, t, *prev);
        for _ in 0..40 {
            let mid = (lo + hi) * lit(0.5);
            if !(mid > lo && mid < hi) {
                break;
            }
            match self.recover_continued(lo, mid, &z_lo) {
                Ok(s) if hit(&s.rec.zeros) => hi = mid,
                Ok(s) => {
                    lo = mid;
                    z_lo = s.rec.zeros;
                }
                Err(_) => hi = mid,
            }
        }
        hi
    }

    fn residual(&self, y: &[Complex<T>; 2], z: &Zeros<T>) -> T {
        let mut full = coeffs_from_zeros(z).to_array();
        let (a, b) = self.native.indices();
        full[a - 1] = y[0];
        full[b - 1] = y[1];
        double_root_residual(&Coeffs::from_array(full))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Param;

    type C = Complex<f64>;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn linear_a1_1() {
        let p = ModelParams::new().with(Param::A, r(1.0)).with(Param::B, r(0.0));
        let tr = algebraic_solve(ModelId::A1_1, &p, &Zeros::new(r(1.0), r(-2.0)), &[0.0, 1.0]).unwrap();
        let (_, z) = tr.last().unwrap();
        let e = 1f64.exp();
        assert!((z.x1 - r(e)).norm() < 1e-12 && (z.x2 - r(-2.0 * e)).norm() < 1e-12, "{z:?}");
        assert_eq!(tr.termination, TrajectoryEnd::Completed);
    }

    #[test]
    fn translation_a3_1() {
        let p = ModelParams::new().with(Param::A, r(1.0)).with(Param::B, r(0.0));
        let z0 = Zeros::new(C::new(0.4, 0.1), C::new(-0.7, 0.3));
        let times = uniform_times(1.5, 30);
        let tr = algebraic_solve(ModelId::A3_1, &p, &z0, &times).unwrap();
        for (t, z) in tr.times.iter().zip(&tr.states) {
            assert!((z.x1 - z0.x1 - r(*t)).norm() < 1e-9, "t={t}");
            assert!((z.x2 - z0.x2 - r(*t)).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn isochronous_return() {
        let tau = 2.0 * std::f64::consts::PI;
        let p = ModelParams::new().with(Param::A, C::new(0.0, tau)).with(Param::B, r(0.05));
        let z0 = Zeros::new(r(0.3), C::new(-0.1, 0.2));
        let tr = algebraic_solve(ModelId::A1_1, &p, &z0, &uniform_times(1.0, 200)).unwrap();
        let (_, z1) = tr.last().unwrap();
        assert!(z1.distance(&z0) < 1e-6, "{z1:?}");
        assert!(tr.max_relative_residual() < 1e-8);
    }

    #[test]
    fn pole_truncates() {
        // u' = u^3 from u0 = -2.2 has its pole near t = 0.103
        let p = ModelParams::new().with(Param::A, r(0.0)).with(Param::B, r(1.0));
        let z0 = Zeros::new(r(1.0), r(0.2));
        let tr = algebraic_solve(ModelId::A1_1, &p, &z0, &uniform_times(5.0, 500)).unwrap();
        match tr.termination {
            TrajectoryEnd::SingularityReached { cause: Cause::BlowUp, t_est } => assert!(t_est > 0.0 && t_est < 5.0),
            other => panic!("{other:?}"),
        }
        assert!(tr.len() < 501 && tr.len() == tr.diagnostics.len());
    }

    #[test]
    fn rejects_bad_grids() {
        let p = ModelParams::new().with(Param::A, r(1.0));
        let z0 = Zeros::new(r(1.0), r(-2.0));
        for times in [vec![], vec![0.5, 1.0], vec![0.0, 1.0, 1.0]] {
            assert!(matches!(algebraic_solve(ModelId::A1_1, &p, &z0, &times), Err(Error::InvalidInput(_))));
        }
        let coll = Zeros::new(r(1.0), r(1.0));
        assert!(matches!(algebraic_solve(ModelId::A1_1, &p, &coll, &[0.0, 1.0]), Err(Error::ZeroCollision(_))));
    }

    #[test]
    fn every_route_gives_the_same_path() {
        let p = ModelParams::new().with(Param::A, C::new(0.2, 0.3)).with(Param::B, C::new(-0.1, 0.05));
        let z0 = Zeros::new(C::new(0.8, 0.1), C::new(-0.3, 0.4));
        let times = uniform_times(1.0, 200);
        let base = algebraic_solve(ModelId::A1_2, &p, &z0, &times).unwrap();
        for route in CoeffPair::ALL {
            let opts = SolveOptions { route: Some(route), ..Default::default() };
            let tr = algebraic_solve_with(ModelId::A1_2, &p, &z0, &times, &opts).unwrap();
            assert_eq!(tr.len(), base.len());
            for (a, b) in tr.states.iter().zip(&base.states) {
                assert!(a.distance(b) < 1e-9, "{route:?}");
            }
        }
    }

    #[test]
    fn single_precision() {
        let p = ModelParams::new().with(Param::A, Complex::<f32>::new(1.0, 0.0));
        let z0 = Zeros::new(Complex::new(1.0f32, 0.0), Complex::new(-2.0, 0.0));
        let tr = algebraic_solve(ModelId::A1_1, &p, &z0, &uniform_times(1.0f32, 10)).unwrap();
        let (_, z) = tr.last().unwrap();
        assert!((z.x1.re - std::f32::consts::E).abs() < 1e-4);
    }
}
