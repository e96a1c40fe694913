//! Named model parameters.
//!
//! The same parameter names are numeric values in simulations and ring
//! indeterminates in symbolic derivations, so [`ModelParams`] is generic over
//! the coefficient ring.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::scalar::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    A,
    B,
    A0,
    A1,
    A2,
    B0,
    B1,
    B2,
    B3,
    C0,
    C1,
    C2,
    C3,
}

impl Param {
    pub const ALL: [Param; 13] = [
        Param::A,
        Param::B,
        Param::A0,
        Param::A1,
        Param::A2,
        Param::B0,
        Param::B1,
        Param::B2,
        Param::B3,
        Param::C0,
        Param::C1,
        Param::C2,
        Param::C3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::A0 => "a0",
            Param::A1 => "a1",
            Param::A2 => "a2",
            Param::B0 => "b0",
            Param::B1 => "b1",
            Param::B2 => "b2",
            Param::B3 => "b3",
            Param::C0 => "c0",
            Param::C1 => "c1",
            Param::C2 => "c2",
            Param::C3 => "c3",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter {s:?}")))
    }
}

/// Parameter assignment; unassigned parameters read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<R> {
    values: Vec<Option<R>>,
}

impl<R: Ring> Default for ModelParams<R> {
    fn default() -> Self {
        ModelParams { values: vec![None; Param::ALL.len()] }
    }
}

impl<R: Ring> ModelParams<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Param, R)>>(pairs: I) -> Self {
        let mut p = Self::new();
        for (k, v) in pairs {
            p.set(k, v);
        }
        p
    }

    pub fn set(&mut self, key: Param, value: R) {
        self.values[key.index()] = Some(value);
    }

    pub fn with(mut self, key: Param, value: R) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: Param) -> R {
        self.values[key.index()].clone().unwrap_or_else(R::zero)
    }

    pub fn is_set(&self, key: Param) -> bool {
        self.values[key.index()].is_some()
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Param, &R)> + '_ {
        Param::ALL
            .into_iter()
            .filter_map(move |p| self.values[p.index()].as_ref().map(|v| (p, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn unassigned_reads_zero() {
        let p = ModelParams::<Complex64>::new().with(Param::A, Complex64::new(1.0, 2.0));
        assert_eq!(p.get(Param::A), Complex64::new(1.0, 2.0));
        assert_eq!(p.get(Param::B), Complex64::new(0.0, 0.0));
        assert_eq!(p.assigned().count(), 1);
    }

    #[test]
    fn names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert!("z9".parse::<Param>().is_err());
    }
}
