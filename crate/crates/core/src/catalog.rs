//! The eleven catalogued models: vector fields, flow headers, parameters.
//!
//! Vector fields are transcribed as printed and never generated from the flow
//! headers; [`crate::certify`] checks the two against each other.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::bridge::{coeffs_from_zeros, CoeffPair, Zeros, DEGENERACY_THRESHOLD};
use crate::error::{Error, Result};
use crate::flows::{A1Spec, A2Spec, A3Spec, FlowSpec};
use crate::params::{ModelParams, Param};
use crate::scalar::{lit, powu, to_f64, Real, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    A1_1,
    A1_2,
    A1_3,
    A2_1,
    A2_2,
    A2_3,
    A2_4,
    A2_5,
    A2_6,
    A3_1,
    A3_2,
}

/// Which flow header to attach to a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Header {
    /// The parameter assignment as published.
    Printed,
    /// The assignment that reproduces the published vector field.
    #[default]
    Effective,
}

impl ModelId {
    pub const ALL: [ModelId; 11] = [
        ModelId::A1_1,
        ModelId::A1_2,
        ModelId::A1_3,
        ModelId::A2_1,
        ModelId::A2_2,
        ModelId::A2_3,
        ModelId::A2_4,
        ModelId::A2_5,
        ModelId::A2_6,
        ModelId::A3_1,
        ModelId::A3_2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::A1_1 => "A1_1",
            ModelId::A1_2 => "A1_2",
            ModelId::A1_3 => "A1_3",
            ModelId::A2_1 => "A2_1",
            ModelId::A2_2 => "A2_2",
            ModelId::A2_3 => "A2_3",
            ModelId::A2_4 => "A2_4",
            ModelId::A2_5 => "A2_5",
            ModelId::A2_6 => "A2_6",
            ModelId::A3_1 => "A3_1",
            ModelId::A3_2 => "A3_2",
        }
    }

    pub fn family(self) -> u8 {
        match self {
            ModelId::A1_1 | ModelId::A1_2 | ModelId::A1_3 => 1,
            ModelId::A3_1 | ModelId::A3_2 => 3,
            _ => 2,
        }
    }

    pub fn params(self) -> &'static [Param] {
        use Param::*;
        match self {
            ModelId::A1_1 | ModelId::A1_2 | ModelId::A1_3 | ModelId::A3_1 | ModelId::A3_2 => &[A, B],
            ModelId::A2_1 | ModelId::A2_3 => &[A0, A1, A2, B0, B1, B2, B3],
            ModelId::A2_2 => &[C1, C2, C3],
            ModelId::A2_4 | ModelId::A2_5 | ModelId::A2_6 => &[C0, C1, C2],
        }
    }

    /// Vector field has a `1/x1` factor.
    pub fn is_rational(self) -> bool {
        matches!(self, ModelId::A2_3 | ModelId::A3_2)
    }

    /// Active coefficient pair.
    pub fn pair(self) -> CoeffPair {
        match self {
            ModelId::A1_1 | ModelId::A2_1 | ModelId::A2_2 | ModelId::A3_1 => CoeffPair::Y12,
            ModelId::A1_2 | ModelId::A2_3 | ModelId::A2_4 | ModelId::A3_2 => CoeffPair::Y13,
            ModelId::A1_3 | ModelId::A2_5 | ModelId::A2_6 => CoeffPair::Y23,
        }
    }

    /// Whether the published header differs from the effective one.
    pub fn header_erratum(self) -> Option<&'static str> {
        match self {
            ModelId::A2_2 => Some("m1=2, m2=1; alpha_l=2c_l, beta_l=c_l (printed: m1=1, m2=2; alpha_l=c_l, beta_l=2c_l)"),
            ModelId::A2_3 => Some("alpha_l=(-1)^(l-1)(a_(l-1)-9b_l) (printed: (-1)^(l-1)(a_0-9b_l))"),
            ModelId::A2_4 => Some("alpha_l=(-1)^(l-1)3c_(l-1) (printed: (-1)^(l-1)3c_l)"),
            _ => None,
        }
    }

    /// Vector field of `self` matches that of the returned model after the
    /// returned parameter relabelling.
    pub fn twin(self) -> Option<(ModelId, &'static [(Param, Param)])> {
        const SHIFT: &[(Param, Param)] = &[(Param::C1, Param::C0), (Param::C2, Param::C1), (Param::C3, Param::C2)];
        match self {
            ModelId::A2_2 => Some((ModelId::A2_5, SHIFT)),
            ModelId::A2_4 => Some((ModelId::A2_6, &[])),
            _ => None,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('.', "_");
        ModelId::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model {s:?}")))
    }
}

fn int<R: Ring>(n: i64) -> R {
    R::from_int(n)
}

// (-1)^l x
fn sg<R: Ring>(l: i64, x: R) -> R {
    if l.rem_euclid(2) == 0 {
        x
    } else {
        -x
    }
}

fn cubic_in<R: Ring>(x1: &R, x2: &R, c: [i64; 4]) -> R {
    // c0 x1^3 + c1 x1^2 x2 + c2 x1 x2^2 + c3 x2^3
    let mut acc = R::zero();
    for (k, ck) in c.iter().enumerate() {
        if *ck != 0 {
            acc = acc + int::<R>(*ck) * powu(x1, 3 - k as u32) * powu(x2, k as u32);
        }
    }
    acc
}

fn quartic_in<R: Ring>(x1: &R, x2: &R, c: [i64; 5]) -> R {
    let mut acc = R::zero();
    for (k, ck) in c.iter().enumerate() {
        if *ck != 0 {
            acc = acc + int::<R>(*ck) * powu(x1, 4 - k as u32) * powu(x2, k as u32);
        }
    }
    acc
}

fn poly<R: Ring>(coeffs: &[R], x: &R) -> R {
    coeffs.iter().rev().fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// The published vector field `(x1', x2')`, over any ring.
///
/// The two rational models divide through [`Ring::try_div`].
pub fn printed_field<R: Ring>(id: ModelId, p: &ModelParams<R>, x1: &R, x2: &R) -> Result<[R; 2]> {
    use Param::*;
    let a = p.get(A);
    let b = p.get(B);
    let sq = |x: &R| x.clone() * x.clone();
    Ok(match id {
        ModelId::A1_1 => {
            let q = int::<R>(5) * sq(x1) + int::<R>(5) * x1.clone() * x2.clone() - sq(x2);
            [
                a.clone() * x1.clone() + b.clone() * x1.clone() * q,
                a * x2.clone() - b * cubic_in(x1, x2, [2, -2, -8, -1]),
            ]
        }
        ModelId::A1_2 => [
            x1.clone() * (a.clone() + b.clone() * cubic_in(x1, x2, [16, 48, -9, -1])),
            x2.clone() * (a - int::<R>(2) * b * cubic_in(x1, x2, [16, -33, -9, -1])),
        ],
        ModelId::A1_3 => {
            let c1 = powu(x1, 3);
            [
                x1.clone() * (a.clone() + b.clone() * c1.clone() * cubic_in(x1, x2, [1, 9, 33, -16])),
                x2.clone() * (a - b * c1 * cubic_in(x1, x2, [2, 18, -15, -32])),
            ]
        }
        ModelId::A2_1 | ModelId::A2_3 => {
            let x = int::<R>(2) * x1.clone() + x2.clone();
            let pa = poly(&[p.get(A0), p.get(A1), p.get(A2)], &x);
            let pb = poly(&[p.get(B0), p.get(B1), p.get(B2), p.get(B3)], &x);
            if id == ModelId::A2_1 {
                [x1.clone() * pa.clone() - pb.clone(), x2.clone() * pa - pb]
            } else {
                let f1 = (int::<R>(5) * x1.clone() + x2.clone()).try_div(&(int::<R>(2) * x1.clone()))?;
                let f2 = (int::<R>(4) * x1.clone() - x2.clone()).try_div(x1)?;
                [x1.clone() * pa.clone() - f1 * pb.clone(), x2.clone() * pa - f2 * pb]
            }
        }
        ModelId::A2_2 | ModelId::A2_5 => {
            let x = x1.clone() * (x1.clone() + int::<R>(2) * x2.clone());
            let cs = if id == ModelId::A2_2 { [C1, C2, C3] } else { [C0, C1, C2] };
            let pc = poly(&cs.map(|k| p.get(k)), &x);
            [x1.clone() * pc.clone(), x2.clone() * pc]
        }
        ModelId::A2_4 | ModelId::A2_6 => {
            let x = sq(x1) * x2.clone();
            let pc = poly(&[p.get(C0), p.get(C1), p.get(C2)], &x);
            [x1.clone() * pc.clone(), x2.clone() * pc]
        }
        ModelId::A3_1 => [
            a.clone() + b.clone() * (sq(x1) + int::<R>(7) * x1.clone() * x2.clone() + sq(x2)),
            a + b * (int::<R>(7) * sq(x1) + int::<R>(4) * x1.clone() * x2.clone() - int::<R>(2) * sq(x2)),
        ],
        ModelId::A3_2 => {
            let n1 = a.clone() * (int::<R>(5) * x1.clone() + x2.clone()) + b.clone() * quartic_in(x1, x2, [32, -131, -51, -11, -1]);
            let n2 = int::<R>(2) * a * (int::<R>(4) * x1.clone() - x2.clone()) - int::<R>(2) * b * quartic_in(x1, x2, [32, 112, -51, -11, -1]);
            [n1.try_div(x1)?, n2.try_div(x1)?]
        }
    })
}

/// Numeric vector field, with the `x1 → 0` guard for the rational models.
pub fn model_rhs<T: Real>(id: ModelId, p: &ModelParams<Complex<T>>, z: &Zeros<T>) -> Result<(Complex<T>, Complex<T>)> {
    if id.is_rational() && z.x1.norm() < lit::<T>(DEGENERACY_THRESHOLD) * z.scale() {
        return Err(Error::DivisionByZeroX1(to_f64(z.x1.norm())));
    }
    let [d1, d2] = printed_field(id, p, &z.x1, &z.x2)?;
    Ok((d1, d2))
}

/// Flow header for `id` with the given parameters.
pub fn flow_header<R: Ring>(id: ModelId, p: &ModelParams<R>, which: Header) -> FlowSpec<R> {
    use Param::*;
    let g = |k: Param| p.get(k);
    let n = |k: i64, x: R| int::<R>(k) * x;
    let zero = R::zero;
    let printed = which == Header::Printed;
    match id {
        ModelId::A1_1 => FlowSpec::A1(A1Spec { m1: 1, m2: 2, alpha: vec![g(A), g(B)], beta: vec![n(2, g(A)), n(6, g(B))] }),
        ModelId::A1_2 => FlowSpec::A1(A1Spec {
            m1: 1,
            m2: 3,
            alpha: vec![g(A), n(-2, g(B))],
            beta: vec![n(3, g(A)), n(-162, g(B))],
        }),
        ModelId::A1_3 => FlowSpec::A1(A1Spec {
            m1: 2,
            m2: 3,
            alpha: vec![n(2, g(A)), n(2, g(B))],
            beta: vec![n(3, g(A)), n(81, g(B))],
        }),
        ModelId::A2_1 => {
            let (a, b) = ([A0, A1, A2], [B0, B1, B2, B3]);
            FlowSpec::A2(A2Spec {
                m1: 1,
                m2: 2,
                alpha: vec![n(3, g(B0)), g(A0) - n(3, g(B1)), -g(A1) + n(3, g(B2)), g(A2) - n(3, g(B3))],
                beta: (0..4).map(|l| if l == 0 { zero() } else { sg(l - 1, n(2, g(a[l as usize - 1]))) }).collect(),
                gamma: (0..4).map(|l| sg(l, n(2, g(b[l as usize])))).collect(),
            })
        }
        ModelId::A2_2 => {
            let c = [zero(), g(C1), g(C2), g(C3)];
            if printed {
                FlowSpec::A2(A2Spec {
                    m1: 1,
                    m2: 2,
                    alpha: c.to_vec(),
                    beta: (0..4).map(|l| if l == 0 { zero() } else { n(2, c[l].clone()) }).collect(),
                    gamma: vec![zero(); 4],
                })
            } else {
                FlowSpec::A2(A2Spec {
                    m1: 2,
                    m2: 1,
                    alpha: c.iter().map(|x| n(2, x.clone())).collect(),
                    beta: c.to_vec(),
                    gamma: vec![zero(); 4],
                })
            }
        }
        ModelId::A2_3 => {
            let (a, b) = ([A0, A1, A2], [B0, B1, B2, B3]);
            let mut alpha = vec![n(9, g(B0))];
            for l in 1..4i64 {
                let lead = if printed { g(A0) } else { g(a[l as usize - 1]) };
                alpha.push(sg(l - 1, lead - n(9, g(b[l as usize]))));
            }
            FlowSpec::A2(A2Spec {
                m1: 1,
                m2: 3,
                alpha,
                beta: (0..4).map(|l| if l == 0 { zero() } else { sg(l - 1, n(3, g(a[l as usize - 1]))) }).collect(),
                gamma: (0..4).map(|l| sg(l, g(b[l as usize]))).collect(),
            })
        }
        ModelId::A2_4 | ModelId::A2_6 => {
            let c = [C0, C1, C2, C3];
            let k = if id == ModelId::A2_4 { 1 } else { 2 };
            let alpha_c = |l: usize| if printed && id == ModelId::A2_4 { g(c[l]) } else { g(c[l - 1]) };
            FlowSpec::A2(A2Spec {
                m1: 3,
                m2: if id == ModelId::A2_4 { 1 } else { 2 },
                alpha: (0..4).map(|l| if l == 0 { zero() } else { sg(l as i64 - 1, n(3, alpha_c(l))) }).collect(),
                beta: (0..4).map(|l| if l == 0 { zero() } else { sg(l as i64 - 1, n(k, g(c[l - 1]))) }).collect(),
                gamma: vec![zero(); 4],
            })
        }
        ModelId::A2_5 => {
            let c = [C0, C1, C2];
            FlowSpec::A2(A2Spec {
                m1: 2,
                m2: 3,
                alpha: (0..4).map(|l| if l == 0 { zero() } else { n(2, g(c[l - 1])) }).collect(),
                beta: (0..4).map(|l| if l == 0 { zero() } else { n(3, g(c[l - 1])) }).collect(),
                gamma: vec![zero(); 4],
            })
        }
        ModelId::A3_1 => FlowSpec::A3(A3Spec {
            alpha0: n(-3, g(A)),
            alpha1: n(-9, g(B)),
            beta0: n(-2, g(A)),
            beta1: n(-2, g(B)),
            m: 2,
        }),
        ModelId::A3_2 => FlowSpec::A3(A3Spec {
            alpha0: n(-18, g(A)),
            alpha1: n(-486, g(B)),
            beta0: n(-2, g(A)),
            beta1: n(-2, g(B)),
            m: 3,
        }),
    }
}

/// Active pair and instantiated (effective) flow.
pub fn model_spec<R: Ring>(id: ModelId, p: &ModelParams<R>) -> (CoeffPair, FlowSpec<R>) {
    let spec = flow_header(id, p, Header::Effective);
    (spec.pair(), spec)
}

/// Projects `z0`'s coefficients onto `pair` (ascending index order); the
/// third coefficient is returned alongside.
pub fn x0_to_y0<T: Real>(pair: CoeffPair, z0: &Zeros<T>) -> ([Complex<T>; 2], Complex<T>) {
    let c = coeffs_from_zeros(z0);
    (pair.project(&c), c.get(pair.third()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::xdot_from_ydot;

    type C = Complex<f64>;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn rhs_examples() {
        let p = ModelParams::new().with(Param::A, r(1.0)).with(Param::B, r(1.0));
        assert_eq!(model_rhs(ModelId::A1_1, &p, &Zeros::new(r(1.0), r(0.0))).unwrap(), (r(6.0), r(-2.0)));
        let p = ModelParams::new().with(Param::A, r(1.0)).with(Param::B, r(0.0));
        let z = Zeros::new(C::new(0.3, -0.7), C::new(1.1, 0.4));
        assert_eq!(model_rhs(ModelId::A1_1, &p, &z).unwrap(), (z.x1, z.x2));
        let p = ModelParams::new().with(Param::C1, r(1.0)).with(Param::C2, r(0.0)).with(Param::C3, r(0.0));
        assert_eq!(model_rhs(ModelId::A2_2, &p, &Zeros::new(r(3.0), r(5.0))).unwrap(), (r(3.0), r(5.0)));
    }

    #[test]
    fn rational_models_guard_x1() {
        let p = ModelParams::new().with(Param::A, r(1.0));
        for id in [ModelId::A2_3, ModelId::A3_2] {
            let p = p.clone().with(Param::B0, r(1.0));
            assert!(matches!(model_rhs(id, &p, &Zeros::new(r(0.0), r(1.0))), Err(Error::DivisionByZeroX1(_))));
        }
    }

    #[test]
    fn spec_headers() {
        let p = ModelParams::new().with(Param::A, r(1.5)).with(Param::B, r(-0.5));
        let (pair, spec) = model_spec(ModelId::A1_1, &p);
        assert_eq!(pair, CoeffPair::Y12);
        assert_eq!(spec, FlowSpec::A1(A1Spec { m1: 1, m2: 2, alpha: vec![r(1.5), r(-0.5)], beta: vec![r(3.0), r(-3.0)] }));
        let (pair, spec) = model_spec(ModelId::A1_3, &p);
        assert_eq!(pair, CoeffPair::Y23);
        assert_eq!(spec, FlowSpec::A1(A1Spec { m1: 2, m2: 3, alpha: vec![r(3.0), r(-1.0)], beta: vec![r(4.5), r(-40.5)] }));
        let (pair, spec) = model_spec(ModelId::A3_1, &p);
        assert_eq!(pair, CoeffPair::Y12);
        assert_eq!(spec, FlowSpec::A3(A3Spec { alpha0: r(-4.5), alpha1: r(4.5), beta0: r(-3.0), beta1: r(1.0), m: 2 }));
    }

    #[test]
    fn projections() {
        let z = Zeros::new(r(1.0), r(-2.0));
        assert_eq!(x0_to_y0(CoeffPair::Y12, &z), ([r(0.0), r(-3.0)], r(2.0)));
        assert_eq!(x0_to_y0(CoeffPair::Y13, &z), ([r(0.0), r(2.0)], r(-3.0)));
        assert_eq!(x0_to_y0(CoeffPair::Y23, &Zeros::new(r(0.0), r(0.0))), ([r(0.0), r(0.0)], r(0.0)));
    }

    #[test]
    fn names_parse() {
        for id in ModelId::ALL {
            assert_eq!(id.name().parse::<ModelId>().unwrap(), id);
        }
        assert_eq!("a2.3".parse::<ModelId>().unwrap(), ModelId::A2_3);
        assert!("A4_1".parse::<ModelId>().is_err());
    }

    // The printed field equals the effective flow pushed through the transfer
    // formulas, at a few numeric points.
    #[test]
    fn effective_headers_reproduce_fields() {
        let p = ModelParams::from_pairs(
            Param::ALL.iter().enumerate().map(|(i, &k)| (k, C::new(0.1 * (i as f64 + 1.0), 0.05 * i as f64 - 0.2))),
        );
        let z = Zeros::new(C::new(0.7, 0.2), C::new(-0.4, 0.5));
        for id in ModelId::ALL {
            let (pair, spec) = model_spec(id, &p);
            let c = coeffs_from_zeros(&z);
            let ydot = spec.rhs_ordered(pair.project(&c)).unwrap();
            let got = xdot_from_ydot(pair, &z, ydot).unwrap();
            let want = model_rhs(id, &p, &z).unwrap();
            assert!((got.0 - want.0).norm() + (got.1 - want.1).norm() < 1e-12, "{id}");
        }
    }
}
