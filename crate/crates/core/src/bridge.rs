//! Coefficient/zero correspondence for the monic cubic `(z - x1)^2 (z - x2)`.
//!
//! `x1` is the double zero, `x2` the simple one. Any two of the three
//! coefficients determine the zeros up to a finite choice of branch; the
//! recovery routes below pick the branch and rebuild `x2` explicitly.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real, Ring};

/// Relative threshold below which `|x1 - x2|` or `|x1|` count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Relative tolerance used to declare two branch candidates tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

const NEWTON_POLISH_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeros<T> {
    /// Double zero.
    pub x1: Complex<T>,
    /// Simple zero.
    pub x2: Complex<T>,
}

impl<T: Real> Zeros<T> {
    pub fn new(x1: Complex<T>, x2: Complex<T>) -> Self {
        Zeros { x1, x2 }
    }

    pub fn scale(&self) -> T {
        T::one() + self.x1.norm() + self.x2.norm()
    }

    /// Max-norm distance between two zero pairs.
    pub fn distance(&self, other: &Self) -> T {
        (self.x1 - other.x1).norm().max((self.x2 - other.x2).norm())
    }

    pub fn is_finite(&self) -> bool {
        crate::scalar::is_finite(self.x1) && crate::scalar::is_finite(self.x2)
    }
}

/// Coefficients of `z^3 + y1 z^2 + y2 z + y3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs<T> {
    pub y1: Complex<T>,
    pub y2: Complex<T>,
    pub y3: Complex<T>,
}

impl<T: Real> Coeffs<T> {
    pub fn new(y1: Complex<T>, y2: Complex<T>, y3: Complex<T>) -> Self {
        Coeffs { y1, y2, y3 }
    }

    pub fn from_array(y: [Complex<T>; 3]) -> Self {
        Coeffs::new(y[0], y[1], y[2])
    }

    pub fn to_array(self) -> [Complex<T>; 3] {
        [self.y1, self.y2, self.y3]
    }

    /// Coefficient `y_m` for `m` in `1..=3`.
    pub fn get(&self, m: usize) -> Complex<T> {
        match m {
            1 => self.y1,
            2 => self.y2,
            3 => self.y3,
            _ => panic!("coefficient index {m} out of range"),
        }
    }

    /// `1 + max_m |y_m|`.
    pub fn scale(&self) -> T {
        T::one() + self.y1.norm().max(self.y2.norm()).max(self.y3.norm())
    }
}

/// Which two coefficients drive the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffPair {
    Y12,
    Y13,
    Y23,
}

impl CoeffPair {
    pub const ALL: [CoeffPair; 3] = [CoeffPair::Y12, CoeffPair::Y13, CoeffPair::Y23];

    /// Coefficient indices in ascending order.
    pub fn indices(self) -> (usize, usize) {
        match self {
            CoeffPair::Y12 => (1, 2),
            CoeffPair::Y13 => (1, 3),
            CoeffPair::Y23 => (2, 3),
        }
    }

    /// Index of the coefficient not in the pair.
    pub fn third(self) -> usize {
        6 - self.indices().0 - self.indices().1
    }

    /// Pair for an unordered index couple, e.g. `(3, 1)` gives `Y13`.
    pub fn from_indices(a: usize, b: usize) -> Option<Self> {
        match (a.min(b), a.max(b)) {
            (1, 2) => Some(CoeffPair::Y12),
            (1, 3) => Some(CoeffPair::Y13),
            (2, 3) => Some(CoeffPair::Y23),
            _ => None,
        }
    }

    /// Whether the transfer formulas divide by `x1`.
    pub fn divides_by_x1(self) -> bool {
        !matches!(self, CoeffPair::Y12)
    }

    /// Whether zero recovery divides by `x1`.
    pub fn recovery_divides_by_x1(self) -> bool {
        matches!(self, CoeffPair::Y23)
    }

    pub fn project<T: Real>(self, c: &Coeffs<T>) -> [Complex<T>; 2] {
        let (a, b) = self.indices();
        [c.get(a), c.get(b)]
    }

    pub fn name(self) -> &'static str {
        match self {
            CoeffPair::Y12 => "Y12",
            CoeffPair::Y13 => "Y13",
            CoeffPair::Y23 => "Y23",
        }
    }
}

impl std::fmt::Display for CoeffPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CoeffPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "Y12" => Ok(CoeffPair::Y12),
            "Y13" => Ok(CoeffPair::Y13),
            "Y23" => Ok(CoeffPair::Y23),
            _ => Err(Error::InvalidInput(format!("unknown coefficient pair {s:?}"))),
        }
    }
}

/// `(y1, y2, y3) = (-(2x1 + x2), x1 (x1 + 2x2), -x1^2 x2)` over any ring.
pub fn coeffs_from_zeros_in<R: Ring>(x1: &R, x2: &R) -> [R; 3] {
    let y1 = -(x1.scale(2) + x2.clone());
    let y2 = x1.clone() * (x1.clone() + x2.scale(2));
    let y3 = -(x1.clone() * x1.clone() * x2.clone());
    [y1, y2, y3]
}

pub fn coeffs_from_zeros<T: Real>(z: &Zeros<T>) -> Coeffs<T> {
    Coeffs::from_array(coeffs_from_zeros_in(&z.x1, &z.x2))
}

/// Horner evaluation of `p3` and `p3'` at `z`.
pub fn eval_p3<T: Real>(c: &Coeffs<T>, z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::one();
    let mut dp = Complex::zero();
    for y in [c.y1, c.y2, c.y3] {
        dp = dp * z + p;
        p = p * z + y;
    }
    (p, dp)
}

/// Roots of `a2 z^2 + a1 z + a0`, avoiding cancellation in `-a1 +- sqrt(D)`.
pub fn solve_quadratic<T: Real>(
    a2: Complex<T>,
    a1: Complex<T>,
    a0: Complex<T>,
) -> Result<[Complex<T>; 2]> {
    if a2.is_zero() {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let four = lit::<T>(4.0);
    let sd = (a1 * a1 - a2 * a0 * four).sqrt();
    let (plus, minus) = (a1 + sd, a1 - sd);
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    let q = -big * lit::<T>(0.5);
    if q.is_zero() {
        // a1 = 0 and a0 = 0
        return Ok([Complex::zero(), Complex::zero()]);
    }
    Ok([q / a2, a0 / q])
}

fn principal_cbrt<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.is_zero() {
        return w;
    }
    let (r, theta) = w.to_polar();
    Complex::from_polar(r.cbrt(), theta / lit(3.0))
}

fn eval_monic_cubic<T: Real>(
    c2: Complex<T>,
    c1: Complex<T>,
    c0: Complex<T>,
    z: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    eval_p3(&Coeffs::new(c2, c1, c0), z)
}

/// Newton iteration on the monic cubic, keeping only steps that shrink `|p|`.
fn polish<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>, mut z: Complex<T>) -> Complex<T> {
    let (mut f, mut df) = eval_monic_cubic(c2, c1, c0, z);
    for _ in 0..NEWTON_POLISH_STEPS {
        if f.is_zero() || df.norm() <= T::min_positive_value() {
            break;
        }
        let trial = z - f / df;
        let (ft, dft) = eval_monic_cubic(c2, c1, c0, trial);
        if ft.norm() >= f.norm() {
            break;
        }
        z = trial;
        f = ft;
        df = dft;
    }
    z
}

/// All three roots of `z^3 + c2 z^2 + c1 z + c0`.
///
/// Closed form on the depressed cubic, then Newton polishing on the original
/// coefficients.
pub fn solve_cubic<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>) -> [Complex<T>; 3] {
    let three = lit::<T>(3.0);
    let shift = c2 / three;
    let p = c1 - c2 * c2 / three;
    let q = c2 * c2 * c2 * lit::<T>(2.0 / 27.0) - c2 * c1 / three + c0;
    let half_q = q * lit::<T>(0.5);
    let third_p = p / three;
    let sd = (half_q * half_q + third_p * third_p * third_p).sqrt();
    let (wa, wb) = (-half_q + sd, -half_q - sd);
    let w = if wa.norm() >= wb.norm() { wa } else { wb };
    let u = principal_cbrt(w);

    let roots = if u.is_zero() {
        [-shift; 3]
    } else {
        let v = -p / (u * three);
        let half = lit::<T>(0.5);
        let s3 = lit::<T>(3.0f64.sqrt() * 0.5);
        let omega = Complex::new(-half, s3);
        let omega2 = Complex::new(-half, -s3);
        [
            u + v - shift,
            u * omega + v * omega2 - shift,
            u * omega2 + v * omega - shift,
        ]
    };
    roots.map(|r| polish(c2, c1, c0, r))
}

/// Candidate values of `x1` for the given route.
///
/// `yvals` holds the route's two coefficients in ascending index order.
pub fn route_candidates<T: Real>(pair: CoeffPair, yvals: [Complex<T>; 2]) -> Vec<Complex<T>> {
    let [ya, yb] = yvals;
    let two = lit::<T>(2.0);
    match pair {
        // 3 x^2 + 2 y1 x + y2 = 0
        CoeffPair::Y12 => solve_quadratic(Complex::from(lit::<T>(3.0)), ya * two, yb)
            .expect("leading coefficient is 3")
            .to_vec(),
        // 2 x^3 + y1 x^2 - y3 = 0
        CoeffPair::Y13 => solve_cubic(ya / two, Complex::zero(), -yb / two).to_vec(),
        // x^3 - y2 x - 2 y3 = 0
        CoeffPair::Y23 => solve_cubic(Complex::zero(), -ya, -yb * two).to_vec(),
    }
}

/// The simple zero from the double zero via the route's explicit formula.
pub fn x2_from_x1<T: Real>(
    pair: CoeffPair,
    x1: Complex<T>,
    yvals: [Complex<T>; 2],
) -> Result<Complex<T>> {
    let [ya, yb] = yvals;
    let two = lit::<T>(2.0);
    match pair {
        CoeffPair::Y12 | CoeffPair::Y13 => Ok(-(x1 * two + ya)),
        CoeffPair::Y23 => {
            let scale = T::one() + ya.norm().max(yb.norm());
            if x1.norm() < lit::<T>(DEGENERACY_THRESHOLD) * scale {
                return Err(Error::DivisionByZeroX1(crate::scalar::to_f64(x1.norm())));
            }
            Ok((-(x1 * x1) + ya) / (x1 * two))
        }
    }
}

/// Zero recovery together with the selection margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovery<T> {
    pub zeros: Zeros<T>,
    /// Distance from the selected `x1` to the nearest competing candidate.
    pub branch_distance: T,
}

/// Recovers the zeros from two coefficients.
///
/// Branch selection: closest candidate to `hint.x1` if a hint is given, else
/// smallest `|p3(x1)|` using the full triple if `third` is given, else only
/// succeeds when all candidates coincide.
pub fn recover_zeros<T: Real>(
    pair: CoeffPair,
    yvals: [Complex<T>; 2],
    third: Option<Complex<T>>,
    hint: Option<&Zeros<T>>,
) -> Result<Zeros<T>> {
    recover_zeros_detailed(pair, yvals, third, hint).map(|r| r.zeros)
}

pub fn recover_zeros_detailed<T: Real>(
    pair: CoeffPair,
    yvals: [Complex<T>; 2],
    third: Option<Complex<T>>,
    hint: Option<&Zeros<T>>,
) -> Result<Recovery<T>> {
    let candidates = route_candidates(pair, yvals);
    let mut scale = T::one() + yvals[0].norm().max(yvals[1].norm());
    if let Some(y) = third {
        scale = scale.max(T::one() + y.norm());
    }
    // distances between candidates live in x units, residuals in y units
    let xscale = candidates.iter().fold(T::one(), |m, c| m.max(T::one() + c.norm()));
    let tie_x = lit::<T>(TIE_TOLERANCE) * xscale;
    let tie = lit::<T>(TIE_TOLERANCE) * if hint.is_some() { xscale } else { scale };

    let keys: Option<Vec<T>> = if let Some(h) = hint {
        Some(candidates.iter().map(|c| (*c - h.x1).norm()).collect())
    } else if let Some(y) = third {
        let full = full_coeffs(pair, yvals, y);
        Some(candidates.iter().map(|c| eval_p3(&full, *c).0.norm()).collect())
    } else {
        None
    };

    let best = match keys {
        Some(keys) => {
            let best = (0..candidates.len())
                .min_by(|&i, &j| keys[i].partial_cmp(&keys[j]).unwrap_or(std::cmp::Ordering::Equal))
                .expect("at least two candidates");
            for j in 0..candidates.len() {
                let apart = (candidates[j] - candidates[best]).norm();
                if j != best && apart > tie_x && (keys[j] - keys[best]).abs() <= tie {
                    return Err(Error::AmbiguousBranch(crate::scalar::to_f64(apart)));
                }
            }
            best
        }
        None => {
            let spread = candidates
                .iter()
                .map(|c| (*c - candidates[0]).norm())
                .fold(T::zero(), T::max);
            if spread > tie_x {
                return Err(Error::AmbiguousBranch(crate::scalar::to_f64(spread)));
            }
            0
        }
    };

    let x1 = candidates[best];
    let x2 = x2_from_x1(pair, x1, yvals)?;
    let branch_distance = candidates
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != best)
        .map(|(_, c)| (*c - x1).norm())
        .fold(T::infinity(), T::min);
    Ok(Recovery { zeros: Zeros::new(x1, x2), branch_distance })
}

fn full_coeffs<T: Real>(pair: CoeffPair, yvals: [Complex<T>; 2], third: Complex<T>) -> Coeffs<T> {
    let mut y = [Complex::zero(); 3];
    let (a, b) = pair.indices();
    y[a - 1] = yvals[0];
    y[b - 1] = yvals[1];
    y[pair.third() - 1] = third;
    Coeffs::from_array(y)
}

/// Transfer formulas from coefficient velocities to zero velocities, over any
/// ring. `ydot` is in ascending index order of the pair.
pub fn transfer<R: Ring>(pair: CoeffPair, x1: &R, x2: &R, ydot: [R; 2]) -> Result<(R, R)> {
    let [da, db] = ydot;
    let diff = x1.clone() - x2.clone();
    match pair {
        CoeffPair::Y12 => {
            let n1 = -(x1.scale(2) * da.clone() + db.clone());
            let n2 = (x1.clone() + x2.clone()) * da + db;
            Ok((n1.try_div(&diff.scale(2))?, n2.try_div(&diff)?))
        }
        CoeffPair::Y13 => {
            let n1 = -(x1.clone() * x1.clone() * da.clone()) + db.clone();
            let n2 = x1.clone() * x2.clone() * da - db;
            let d2 = x1.clone() * diff;
            Ok((n1.try_div(&d2.scale(2))?, n2.try_div(&d2)?))
        }
        CoeffPair::Y23 => {
            let n1 = x1.clone() * da.clone() + db.scale(2);
            let n2 = -(x1.clone() * x2.clone() * da + (x1.clone() + x2.clone()) * db);
            let d1 = x1.clone() * diff;
            let d2 = x1.clone() * d1.clone();
            Ok((n1.try_div(&d1.scale(2))?, n2.try_div(&d2)?))
        }
    }
}

/// Checks the separation preconditions of a route at `z`.
pub fn check_route_preconditions<T: Real>(pair: CoeffPair, z: &Zeros<T>) -> Result<()> {
    let thr = lit::<T>(DEGENERACY_THRESHOLD) * z.scale();
    let gap = (z.x1 - z.x2).norm();
    if gap < thr {
        return Err(Error::ZeroCollision(crate::scalar::to_f64(gap)));
    }
    if pair.divides_by_x1() && z.x1.norm() < thr {
        return Err(Error::DivisionByZeroX1(crate::scalar::to_f64(z.x1.norm())));
    }
    Ok(())
}

pub fn xdot_from_ydot<T: Real>(
    pair: CoeffPair,
    z: &Zeros<T>,
    ydot: [Complex<T>; 2],
) -> Result<(Complex<T>, Complex<T>)> {
    check_route_preconditions(pair, z)?;
    transfer(pair, &z.x1, &z.x2, ydot)
}

/// How far `c` is from having a double root, relative to `1 + max|y_m|`.
pub fn double_root_residual<T: Real>(c: &Coeffs<T>) -> T {
    let candidates = route_candidates(CoeffPair::Y12, [c.y1, c.y2]);
    let scale = c.scale();
    candidates
        .iter()
        .map(|x| {
            let (p, dp) = eval_p3(c, *x);
            p.norm().max(dp.norm()) / scale
        })
        .fold(T::infinity(), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type C = Complex<f64>;

    fn z(x1: C, x2: C) -> Zeros<f64> {
        Zeros::new(x1, x2)
    }

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn same_multiset(mut a: Vec<C>, mut b: Vec<C>, tol: f64) -> bool {
        if a.len() != b.len() {
            return false;
        }
        while let Some(x) = a.pop() {
            match b.iter().position(|y| close(x, *y, tol)) {
                Some(i) => {
                    b.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }

    #[test]
    fn coeffs_from_zeros_examples() {
        let k = coeffs_from_zeros(&z(r(0.0), r(0.0)));
        assert_eq!(k.to_array(), [r(0.0); 3]);
        let k = coeffs_from_zeros(&z(r(1.0), r(-2.0)));
        assert_eq!(k.to_array(), [r(0.0), r(-3.0), r(2.0)]);
        let k = coeffs_from_zeros(&z(C::i(), r(1.0)));
        assert_eq!(k.to_array(), [c(-1.0, -2.0), c(-1.0, 2.0), r(1.0)]);
    }

    #[test]
    fn eval_p3_examples() {
        let k = Coeffs::new(r(0.0), r(-3.0), r(2.0));
        assert_eq!(eval_p3(&k, r(1.0)), (r(0.0), r(0.0)));
        assert_eq!(eval_p3(&k, r(-2.0)), (r(0.0), r(9.0)));
        let k = Coeffs::new(r(0.0), r(0.0), r(0.0));
        assert_eq!(eval_p3(&k, r(2.0)), (r(8.0), r(12.0)));
    }

    #[test]
    fn solve_quadratic_examples() {
        let q = solve_quadratic(r(1.0), r(0.0), r(-1.0)).unwrap();
        assert!(same_multiset(q.to_vec(), vec![r(1.0), r(-1.0)], 1e-15));
        let q = solve_quadratic(r(3.0), r(0.0), r(-3.0)).unwrap();
        assert!(same_multiset(q.to_vec(), vec![r(1.0), r(-1.0)], 1e-15));
        let q = solve_quadratic(r(1.0), c(0.0, -2.0), r(-1.0)).unwrap();
        assert!(same_multiset(q.to_vec(), vec![C::i(), C::i()], 1e-15));
    }

    #[test]
    fn solve_quadratic_rejects_zero_leading() {
        assert!(matches!(
            solve_quadratic(r(0.0), r(1.0), r(1.0)),
            Err(Error::DegenerateLeadingCoefficient)
        ));
    }

    #[test]
    fn solve_quadratic_keeps_small_root_accurate() {
        // x^2 - 1e8 x + 1: small root ~1e-8 loses all digits without the
        // cancellation-safe form.
        let q = solve_quadratic(r(1.0), r(-1e8), r(1.0)).unwrap();
        let small = if q[0].norm() < q[1].norm() { q[0] } else { q[1] };
        assert!((small.re - 1e-8).abs() < 1e-22);
    }

    #[test]
    fn solve_cubic_examples() {
        let roots = solve_cubic(r(0.0), r(0.0), r(-1.0));
        let h = 3f64.sqrt() / 2.0;
        assert!(same_multiset(
            roots.to_vec(),
            vec![r(1.0), c(-0.5, h), c(-0.5, -h)],
            1e-14
        ));
        let roots = solve_cubic(r(0.0), r(-3.0), r(2.0));
        assert!(same_multiset(roots.to_vec(), vec![r(1.0), r(1.0), r(-2.0)], 1e-7));
        assert_eq!(solve_cubic(r(0.0), r(0.0), r(0.0)), [r(0.0); 3]);
    }

    #[test]
    fn recover_y12_by_residual() {
        let got = recover_zeros(CoeffPair::Y12, [r(0.0), r(-3.0)], Some(r(2.0)), None).unwrap();
        assert!(close(got.x1, r(1.0), 1e-14));
        assert!(close(got.x2, r(-2.0), 1e-14));
    }

    #[test]
    fn recover_triple_root_without_selector() {
        let got = recover_zeros(CoeffPair::Y12, [r(-3.0), r(3.0)], None, None).unwrap();
        assert!(close(got.x1, r(1.0), 1e-7));
        assert!(close(got.x2, r(1.0), 2e-7));
    }

    #[test]
    fn recover_y23_with_hint() {
        let hint = z(r(1.01), r(0.0));
        let got = recover_zeros(CoeffPair::Y23, [r(-3.0), r(2.0)], None, Some(&hint)).unwrap();
        assert!(close(got.x1, r(1.0), 1e-14));
        assert!(close(got.x2, r(-2.0), 1e-14));
    }

    #[test]
    fn recover_without_selector_is_ambiguous() {
        let err = recover_zeros(CoeffPair::Y12, [r(0.0), r(-3.0)], None, None).unwrap_err();
        assert!(matches!(err, Error::AmbiguousBranch(_)));
    }

    #[test]
    fn recover_equidistant_hint_is_ambiguous() {
        // candidates +-1, hint at 0
        let hint = z(r(0.0), r(0.0));
        let err = recover_zeros(CoeffPair::Y12, [r(0.0), r(-3.0)], None, Some(&hint)).unwrap_err();
        assert!(matches!(err, Error::AmbiguousBranch(_)));
    }

    #[test]
    fn recover_y23_at_origin_divides_by_zero() {
        let hint = z(r(0.0), r(0.0));
        let err = recover_zeros(CoeffPair::Y23, [r(0.0), r(0.0)], None, Some(&hint)).unwrap_err();
        assert!(matches!(err, Error::DivisionByZeroX1(_)));
    }

    #[test]
    fn y13_route_uses_consistent_sign() {
        // (1, -2): y1 = 0, y3 = 2
        let got = recover_zeros(CoeffPair::Y13, [r(0.0), r(2.0)], Some(r(-3.0)), None).unwrap();
        assert!(close(got.x1, r(1.0), 1e-14));
        assert!(close(got.x2, r(-2.0), 1e-14));
    }

    #[test]
    fn xdot_examples() {
        let at = z(r(1.0), r(-2.0));
        let (a, b) = xdot_from_ydot(CoeffPair::Y12, &at, [r(1.0), r(0.0)]).unwrap();
        assert!(close(a, r(-1.0 / 3.0), 1e-15) && close(b, r(-1.0 / 3.0), 1e-15));
        let (a, b) = xdot_from_ydot(CoeffPair::Y12, &at, [r(0.0), r(1.0)]).unwrap();
        assert!(close(a, r(-1.0 / 6.0), 1e-15) && close(b, r(1.0 / 3.0), 1e-15));
        let (a, b) = xdot_from_ydot(CoeffPair::Y13, &at, [r(0.0), r(1.0)]).unwrap();
        assert!(close(a, r(1.0 / 6.0), 1e-15) && close(b, r(-1.0 / 3.0), 1e-15));
    }

    #[test]
    fn xdot_degeneracies() {
        let coll = z(r(1.0), r(1.0));
        assert!(matches!(
            xdot_from_ydot(CoeffPair::Y12, &coll, [r(1.0), r(0.0)]),
            Err(Error::ZeroCollision(_))
        ));
        let origin = z(r(0.0), r(1.0));
        assert!(xdot_from_ydot(CoeffPair::Y12, &origin, [r(1.0), r(0.0)]).is_ok());
        for pair in [CoeffPair::Y13, CoeffPair::Y23] {
            assert!(matches!(
                xdot_from_ydot(pair, &origin, [r(1.0), r(0.0)]),
                Err(Error::DivisionByZeroX1(_))
            ));
        }
    }

    #[test]
    fn double_root_residual_examples() {
        assert!(double_root_residual(&Coeffs::new(r(0.0), r(-3.0), r(2.0))) <= 1e-12);
        assert_eq!(double_root_residual(&Coeffs::new(r(0.0), r(0.0), r(0.0))), 0.0);
        assert!(double_root_residual(&Coeffs::new(r(0.0), r(0.0), r(-1.0))) > 1e-3);
    }

    #[test]
    fn pair_bookkeeping() {
        assert_eq!(CoeffPair::Y13.third(), 2);
        assert_eq!(CoeffPair::from_indices(3, 2), Some(CoeffPair::Y23));
        assert_eq!(CoeffPair::from_indices(2, 2), None);
        assert_eq!("y12".parse::<CoeffPair>().unwrap(), CoeffPair::Y12);
    }

    #[test]
    fn works_in_single_precision() {
        let zz = Zeros::<f32>::new(Complex::new(0.7, 0.1), Complex::new(-0.4, 0.3));
        let k = coeffs_from_zeros(&zz);
        for pair in CoeffPair::ALL {
            let got = recover_zeros(pair, pair.project(&k), None, Some(&zz)).unwrap();
            assert!(got.distance(&zz) < 1e-5);
        }
    }
}
