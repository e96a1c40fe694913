//! Exact re-derivation of the catalogued vector fields.
//!
//! The flow header is evaluated with the parameters as indeterminates, the
//! coefficients are replaced by their expressions in `(x1, x2)` and the
//! transfer formulas are applied with exact division. The result is compared
//! with the transcribed field by exact subtraction.

use std::fmt::{self, Write as _};

use num_traits::Zero;

use super::{LaurentPoly, Var};
use crate::bridge::{coeffs_from_zeros_in, transfer, CoeffPair};
use crate::catalog::{flow_header, printed_field, Header, ModelId};
use crate::error::{Error, Result};
use crate::flows::FlowSpec;
use crate::params::{ModelParams, Param};

/// Version tag written in report headers.
pub const REPORT_VERSION: &str = "algflow-certify/1";

fn symbolic_params() -> ModelParams<LaurentPoly> {
    ModelParams::from_pairs(Param::ALL.into_iter().map(|p| (p, LaurentPoly::param(p))))
}

/// `(x1', x2')` implied by a flow on `pair`.
pub fn derive_from_flow(pair: CoeffPair, spec: &FlowSpec<LaurentPoly>) -> Result<[LaurentPoly; 2]> {
    let (x1, x2) = (LaurentPoly::x1(), LaurentPoly::x2());
    let y = coeffs_from_zeros_in(&x1, &x2);
    let (a, b) = pair.indices();
    let ydot = spec.rhs_ordered([y[a - 1].clone(), y[b - 1].clone()])?;
    let (d1, d2) = transfer(pair, &x1, &x2, ydot)?;
    Ok([d1, d2])
}

/// Vector field derived from the model's header.
pub fn derive_with_header(id: ModelId, which: Header) -> Result<[LaurentPoly; 2]> {
    let spec = flow_header(id, &symbolic_params(), which);
    derive_from_flow(spec.pair(), &spec)
}

/// Vector field derived from the effective header.
pub fn derive_model_rhs(id: ModelId) -> Result<[LaurentPoly; 2]> {
    derive_with_header(id, Header::Effective)
}

/// The transcribed vector field as a Laurent polynomial.
pub fn catalog_rhs(id: ModelId) -> [LaurentPoly; 2] {
    printed_field(id, &symbolic_params(), &LaurentPoly::x1(), &LaurentPoly::x2())
        .expect("catalogued denominators are powers of x1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Derived and transcribed fields agree under the published header.
    Pass,
    /// The published header fails, a corrected header passes.
    Erratum,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Erratum => "ERRATUM",
            Status::Fail => "FAIL",
        }
    }

    /// PASS or a documented erratum.
    pub fn is_acceptable(self) -> bool {
        !matches!(self, Status::Fail)
    }
}

/// Outcome of one derivation: either the field or the failure.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub field: Option<[LaurentPoly; 2]>,
    /// `derived - catalogued`, when the derivation succeeded.
    pub diff: Option<[LaurentPoly; 2]>,
    pub error: Option<String>,
}

impl Derivation {
    fn against(result: Result<[LaurentPoly; 2]>, catalog: &[LaurentPoly; 2]) -> Self {
        match result {
            Ok(field) => {
                let diff = [field[0].clone() - catalog[0].clone(), field[1].clone() - catalog[1].clone()];
                Derivation { field: Some(field), diff: Some(diff), error: None }
            }
            Err(e) => Derivation { field: None, diff: None, error: Some(e.to_string()) },
        }
    }

    pub fn is_exact(&self) -> bool {
        self.diff.as_ref().is_some_and(|d| d[0].is_zero() && d[1].is_zero())
    }
}

#[derive(Debug, Clone)]
pub struct ModelReport {
    pub id: ModelId,
    pub pair: CoeffPair,
    pub status: Status,
    pub catalog: [LaurentPoly; 2],
    pub printed: Derivation,
    /// Present only when the effective header differs from the printed one.
    pub corrected: Option<(String, Derivation)>,
}

impl ModelReport {
    /// Field certified for this model (corrected header where needed).
    pub fn certified_field(&self) -> Option<&[LaurentPoly; 2]> {
        match self.status {
            Status::Pass => self.printed.field.as_ref(),
            Status::Erratum => self.corrected.as_ref().and_then(|(_, d)| d.field.as_ref()),
            Status::Fail => None,
        }
    }
}

/// Compares derivations against an explicit catalogue entry; used directly
/// for fault injection.
pub fn verify_against(id: ModelId, catalog: [LaurentPoly; 2]) -> ModelReport {
    let printed = Derivation::against(derive_with_header(id, Header::Printed), &catalog);
    let corrected = id
        .header_erratum()
        .map(|note| (note.to_string(), Derivation::against(derive_with_header(id, Header::Effective), &catalog)));
    let status = match (&corrected, printed.is_exact()) {
        (_, true) => Status::Pass,
        (Some((_, d)), false) if d.is_exact() => Status::Erratum,
        _ => Status::Fail,
    };
    ModelReport { id, pair: id.pair(), status, catalog, printed, corrected }
}

pub fn verify_model(id: ModelId) -> ModelReport {
    verify_against(id, catalog_rhs(id))
}

/// Catalogue entry with `+1` added to the coefficient of `monomial` in the
/// chosen component.
pub fn perturbed_catalog(id: ModelId, component: usize, monomial: &LaurentPoly) -> [LaurentPoly; 2] {
    let mut c = catalog_rhs(id);
    c[component] = c[component].clone() + monomial.clone();
    c
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub left: ModelId,
    pub right: ModelId,
    pub relabel: Vec<(Param, Param)>,
    pub pass: bool,
    /// `left (relabelled) - right`.
    pub diff: Option<[LaurentPoly; 2]>,
    pub error: Option<String>,
}

fn relabel(p: &LaurentPoly, map: &[(Param, Param)]) -> LaurentPoly {
    p.rename(|v| match v {
        Var::P(q) => Var::P(map.iter().find(|(from, _)| *from == q).map_or(q, |(_, to)| *to)),
        other => other,
    })
}

/// Exact identity of the derived fields of two models after relabelling the
/// parameters of `left`.
pub fn check_identity(left: ModelId, right: ModelId, map: &[(Param, Param)]) -> IdentityReport {
    let pair = derive_model_rhs(left).and_then(|l| derive_model_rhs(right).map(|r| (l, r)));
    match pair {
        Ok((l, r)) => {
            let diff = [relabel(&l[0], map) - r[0].clone(), relabel(&l[1], map) - r[1].clone()];
            let pass = diff[0].is_zero() && diff[1].is_zero();
            IdentityReport { left, right, relabel: map.to_vec(), pass, diff: Some(diff), error: None }
        }
        Err(e) => IdentityReport { left, right, relabel: map.to_vec(), pass: false, diff: None, error: Some(e.to_string()) },
    }
}

/// The two identical-field pairs of the catalogue.
pub fn verify_twin_models() -> Vec<IdentityReport> {
    ModelId::ALL
        .into_iter()
        .filter_map(|id| id.twin().map(|(twin, map)| check_identity(id, twin, map)))
        .collect()
}

/// Whole-catalogue certification.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub models: Vec<ModelReport>,
    pub identities: Vec<IdentityReport>,
}

impl CertificationReport {
    pub fn all_acceptable(&self) -> bool {
        self.models.iter().all(|m| m.status.is_acceptable()) && self.identities.iter().all(|i| i.pass)
    }
}

pub fn verify_all() -> CertificationReport {
    CertificationReport { models: ModelId::ALL.into_iter().map(verify_model).collect(), identities: verify_twin_models() }
}

fn write_field(out: &mut String, key: &str, f: &[LaurentPoly; 2]) {
    let _ = writeln!(out, "{key}.x1dot={}", f[0]);
    let _ = writeln!(out, "{key}.x2dot={}", f[1]);
}

fn write_derivation(out: &mut String, key: &str, d: &Derivation) {
    if let Some(f) = &d.field {
        write_field(out, &format!("{key}.derived"), f);
    }
    if let Some(f) = &d.diff {
        write_field(out, &format!("{key}.diff"), f);
    }
    if let Some(e) = &d.error {
        let _ = writeln!(out, "{key}.error={e}");
    }
}

impl ModelReport {
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[model {}]", self.id);
        let _ = writeln!(out, "status={}", self.status.as_str());
        let _ = writeln!(out, "pair={}", self.pair);
        let _ = writeln!(out, "rational={}", self.id.is_rational());
        write_field(&mut out, "catalog", &self.catalog);
        write_derivation(&mut out, "printed_header", &self.printed);
        if let Some((note, d)) = &self.corrected {
            let _ = writeln!(out, "corrected_header={note}");
            write_derivation(&mut out, "corrected_header", d);
        }
        out
    }
}

impl IdentityReport {
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[identity {}={}]", self.left, self.right);
        let _ = writeln!(out, "status={}", if self.pass { "PASS" } else { "FAIL" });
        let map: Vec<String> = self.relabel.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        let _ = writeln!(out, "relabel={}", if map.is_empty() { "none".to_string() } else { map.join(",") });
        if let Some(d) = &self.diff {
            write_field(&mut out, "diff", d);
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error={e}");
        }
        out
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {REPORT_VERSION}")?;
        writeln!(f, "models={}", self.models.len())?;
        writeln!(f, "identities={}", self.identities.len())?;
        for m in &self.models {
            writeln!(f)?;
            f.write_str(&m.to_record())?;
        }
        for i in &self.identities {
            writeln!(f)?;
            f.write_str(&i.to_record())?;
        }
        Ok(())
    }
}

/// Maps [`Error::InexactDivision`] to its remainder, for callers that want
/// the certification failure signal itself.
pub fn inexact_remainder(e: &Error) -> Option<&LaurentPoly> {
    match e {
        Error::InexactDivision { remainder } => Some(remainder),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{GaussianRational, Monomial};

    fn lp(s: &[(i64, &[(Var, i32)])]) -> LaurentPoly {
        s.iter().fold(LaurentPoly::default(), |acc, (c, vars)| {
            let m = vars.iter().fold(Monomial::one(), |m, (v, k)| m.with_exp(*v, *k));
            acc + LaurentPoly::term(GaussianRational::from_int(*c), m)
        })
    }

    #[test]
    fn a1_1_passes_and_matches_hand_form() {
        let r = verify_model(ModelId::A1_1);
        assert_eq!(r.status, Status::Pass);
        let f = r.printed.field.unwrap();
        let (a, b) = (Var::P(Param::A), Var::P(Param::B));
        let x1dot = lp(&[
            (1, &[(a, 1), (Var::X1, 1)]),
            (5, &[(b, 1), (Var::X1, 3)]),
            (5, &[(b, 1), (Var::X1, 2), (Var::X2, 1)]),
            (-1, &[(b, 1), (Var::X1, 1), (Var::X2, 2)]),
        ]);
        assert_eq!(f[0], x1dot);
    }

    #[test]
    fn linear_part_of_a1_1() {
        let spec = flow_header(ModelId::A1_1, &symbolic_params(), Header::Effective);
        let zeroed = match spec {
            FlowSpec::A1(mut s) => {
                s.alpha[1] = LaurentPoly::default();
                s.beta[1] = LaurentPoly::default();
                FlowSpec::A1(s)
            }
            _ => unreachable!(),
        };
        let f = derive_from_flow(CoeffPair::Y12, &zeroed).unwrap();
        let a = LaurentPoly::param(Param::A);
        assert_eq!(f, [a.clone() * LaurentPoly::x1(), a * LaurentPoly::x2()]);
    }

    #[test]
    fn every_model_certifies() {
        for id in ModelId::ALL {
            let r = verify_model(id);
            let want = if id.header_erratum().is_some() { Status::Erratum } else { Status::Pass };
            assert_eq!(r.status, want, "{id}: {}", r.to_record());
        }
    }

    #[test]
    fn a2_3_polynomial_without_b() {
        let f = derive_model_rhs(ModelId::A2_3).unwrap();
        for comp in &f {
            for (m, _) in comp.terms() {
                let has_b = [Param::B0, Param::B1, Param::B2, Param::B3].iter().any(|p| m.exp(Var::P(*p)) > 0);
                if m.exp(Var::X1) < 0 {
                    assert!(has_b);
                }
            }
        }
    }

    #[test]
    fn injected_fault_is_reported_verbatim() {
        let mono = lp(&[(1, &[(Var::P(Param::A), 1), (Var::X2, 2)])]);
        for id in [ModelId::A1_1, ModelId::A2_4, ModelId::A3_2] {
            let r = verify_against(id, perturbed_catalog(id, 1, &mono));
            assert_eq!(r.status, Status::Fail);
            let d = match &r.corrected {
                Some((_, d)) => d.diff.clone().unwrap(),
                None => r.printed.diff.clone().unwrap(),
            };
            assert!(d[0].is_zero());
            assert_eq!(d[1], -mono.clone());
        }
    }

    #[test]
    fn identities() {
        let reps = verify_twin_models();
        assert_eq!(reps.len(), 2);
        assert!(reps.iter().all(|r| r.pass));
        assert!(!check_identity(ModelId::A2_2, ModelId::A2_5, &[]).pass);
        assert!(!check_identity(ModelId::A2_2, ModelId::A2_1, &[]).pass);
    }

    #[test]
    fn report_format() {
        let rep = verify_all();
        let text = rep.to_string();
        assert!(text.starts_with("# algflow-certify/1\n"));
        assert_eq!(text.matches("[model ").count(), 11);
        assert_eq!(text.matches("[identity ").count(), 2);
        assert!(rep.all_acceptable());
    }
}
