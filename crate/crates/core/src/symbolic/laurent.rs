use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::GaussianRational;
use crate::error::{Error, Result};
use crate::params::Param;
use crate::scalar::{powu, Real, Ring};

/// Indeterminates of the symbolic ring: the two zeros and every parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X1,
    X2,
    P(Param),
}

pub const NVARS: usize = 2 + Param::ALL.len();

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X1 => 0,
            Var::X2 => 1,
            Var::P(p) => 2 + p.index(),
        }
    }

    pub fn from_index(i: usize) -> Var {
        match i {
            0 => Var::X1,
            1 => Var::X2,
            _ => Var::P(Param::ALL[i - 2]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::P(p) => p.name(),
        }
    }
}

/// Exponent vector. Only the `x1` slot may go negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub [i32; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.0[v.index()]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Monomial(e)
    }

    /// `self / other` when the quotient keeps every non-`x1` exponent
    /// nonnegative.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut e = self.0;
        for (i, (a, b)) in e.iter_mut().zip(other.0.iter()).enumerate() {
            *a -= b;
            if i != 0 && *a < 0 {
                return None;
            }
        }
        Some(Monomial(e))
    }

    pub fn with_exp(mut self, v: Var, k: i32) -> Self {
        self.0[v.index()] = k;
        self
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        // parameters first, then x1, x2
        let order = (2..NVARS).chain(0..2);
        for i in order {
            let k = self.0[i];
            if k == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let name = Var::from_index(i).name();
            if k == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{name}^{k}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Multivariate Laurent polynomial with Gaussian-rational coefficients.
///
/// Terms are kept in a sorted map with no zero coefficients, so structural
/// equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl LaurentPoly {
    pub fn constant(c: GaussianRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(GaussianRational::one(), Monomial::var(v))
    }

    pub fn x1() -> Self {
        Self::var(Var::X1)
    }

    pub fn x2() -> Self {
        Self::var(Var::X2)
    }

    pub fn param(p: Param) -> Self {
        Self::var(Var::P(p))
    }

    pub fn term(c: GaussianRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn mul_term(&self, c: &GaussianRational, m: &Monomial) -> Self {
        let mut out = LaurentPoly::zero();
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.mul(m), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        powu(self, e)
    }

    /// Lowest and highest exponent of `v` over all terms.
    pub fn exp_range(&self, v: Var) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.exp(v));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    /// Coefficient of `v^k`, as a polynomial free of `v`.
    pub fn coeff_of(&self, v: Var, k: i32) -> Self {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                out.terms.insert(m.with_exp(v, 0), c.clone());
            }
        }
        out
    }

    /// Renames indeterminates; exponents of variables mapped together add up.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut e = [0; NVARS];
            for (i, k) in m.0.iter().enumerate() {
                e[f(Var::from_index(i)).index()] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact evaluation. Fails with `DivisionByZero` if `x1` has a negative
    /// exponent and evaluates to zero.
    pub fn eval_exact(&self, value: impl Fn(Var) -> GaussianRational) -> Result<GaussianRational> {
        let vals: Vec<GaussianRational> = (0..NVARS).map(|i| value(Var::from_index(i))).collect();
        let mut total = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let base = if k < 0 {
                    vals[i].inv().ok_or(Error::DivisionByZero)?
                } else {
                    vals[i].clone()
                };
                t = t * powu(&base, k.unsigned_abs());
            }
            total = total + t;
        }
        Ok(total)
    }

    pub fn eval_complex<T: Real>(&self, value: impl Fn(Var) -> Complex<T>) -> Complex<T> {
        let vals: Vec<Complex<T>> = (0..NVARS).map(|i| value(Var::from_index(i))).collect();
        let mut total = Complex::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_complex::<T>();
            for (i, &k) in m.0.iter().enumerate() {
                if k != 0 {
                    t = t * vals[i].powi(k);
                }
            }
            total = total + t;
        }
        total
    }

    /// Divides by `x1 - x2` treating `x1` as the main variable. On failure
    /// returns the remainder `r` with `self = (x1 - x2) q + r`.
    pub fn div_x1_minus_x2(&self) -> std::result::Result<Self, Self> {
        let Some((lo, hi)) = self.exp_range(Var::X1) else {
            return Ok(LaurentPoly::zero());
        };
        let x2 = LaurentPoly::x2();
        // b_n = C_n, b_i = C_i + x2 b_{i+1}; quotient coefficient of x1^(i-1) is b_i.
        let mut quotient = LaurentPoly::zero();
        let mut b = LaurentPoly::zero();
        for k in (lo..=hi).rev() {
            b = self.coeff_of(Var::X1, k) + x2.clone() * b;
            if k > lo {
                let shift = Monomial::one().with_exp(Var::X1, k - 1);
                quotient = quotient + b.mul_term(&GaussianRational::one(), &shift);
            }
        }
        if b.is_zero() {
            Ok(quotient)
        } else {
            let shift = Monomial::one().with_exp(Var::X1, lo);
            Err(b.mul_term(&GaussianRational::one(), &shift))
        }
    }

    /// Exact quotient `self / den` for denominators built from `x1`,
    /// `x1 - x2` and constants.
    pub fn exact_div(&self, den: &LaurentPoly) -> Result<LaurentPoly> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rest = den.clone();
        let mut collisions = 0u32;
        while rest.len() > 1 {
            match rest.div_x1_minus_x2() {
                Ok(q) => {
                    rest = q;
                    collisions += 1;
                }
                Err(_) => return Err(Error::UnsupportedDenominator(Box::new(den.clone()))),
            }
        }
        let (mono, coef) = rest.terms.iter().next().map(|(m, c)| (*m, c.clone())).expect("nonzero");

        let mut num = self.clone();
        for _ in 0..collisions {
            num = num
                .div_x1_minus_x2()
                .map_err(|r| Error::InexactDivision { remainder: Box::new(r) })?;
        }
        let inv = coef.inv().expect("nonzero coefficient");
        let mut out = LaurentPoly::zero();
        for (m, c) in &num.terms {
            let Some(q) = m.checked_div(&mono) else {
                return Err(Error::InexactDivision { remainder: Box::new(num.clone()) });
            };
            out.terms.insert(q, c * &inv);
        }
        Ok(out)
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        LaurentPoly::constant(GaussianRational::one())
    }
}

impl Add for LaurentPoly {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for LaurentPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for LaurentPoly {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for LaurentPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Ring for LaurentPoly {
    fn from_int(n: i64) -> Self {
        LaurentPoly::constant(GaussianRational::from_int(n))
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.exact_div(rhs)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg_real = c.is_real() && c.re < num_rational::BigRational::zero();
            let mag = if neg_real { -c.clone() } else { c.clone() };
            match (i, neg_real) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_unit = mag.is_one();
            let is_const = *m == Monomial::one();
            if is_const {
                write!(f, "{mag}")?;
            } else if is_unit {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
