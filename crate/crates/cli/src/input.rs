//! Command-line values: complex numbers, parameters, seeds.

use std::collections::BTreeMap;

use algflow::catalog::ModelId;
use algflow::params::Param;
use algflow::sample::DEFAULT_SEED;
use algflow::Complex64;
use thiserror::Error;

use crate::manifest::RunManifest;
use crate::{Route, RunArgs};

/// Malformed or missing command-line input.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct Usage(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

pub const SEED_VAR: &str = "ALGFLOW_SEED";

/// `ALGFLOW_SEED` if set, else `fallback`.
pub fn seed(fallback: u64) -> anyhow::Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| usage(format!("{SEED_VAR}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(fallback),
    }
}

pub fn model(s: &str) -> anyhow::Result<ModelId> {
    s.parse().map_err(|_| usage(format!("unknown model {s:?}")))
}

/// `re,im`, `(re,im)` or a bare real.
pub fn complex(s: &str) -> anyhow::Result<Complex64> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let bad = || usage(format!("expected a complex number as re,im, got {s:?}"));
    let num = |p: &str| p.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    match t.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(num(re).ok_or_else(bad)?, num(im).ok_or_else(bad)?)),
        None => Ok(Complex64::new(num(t).ok_or_else(bad)?, 0.0)),
    }
}

/// `name=re,im` entries checked against the model's parameter list.
pub fn params(id: ModelId, entries: &[String]) -> anyhow::Result<BTreeMap<Param, Complex64>> {
    let mut named = Vec::new();
    for e in entries {
        let (name, value) = e.split_once('=').ok_or_else(|| usage(format!("expected name=re,im, got {e:?}")))?;
        named.push((name.trim(), complex(value)?));
    }
    assign(id, named)
}

/// Every parameter of `id`, zero unless named.
pub fn assign<'a>(id: ModelId, named: impl IntoIterator<Item = (&'a str, Complex64)>) -> anyhow::Result<BTreeMap<Param, Complex64>> {
    let mut out: BTreeMap<Param, Complex64> = id.params().iter().map(|&p| (p, Complex64::new(0.0, 0.0))).collect();
    for (name, value) in named {
        let p: Param = name.parse().map_err(|_| usage(format!("unknown parameter {name:?}")))?;
        if !id.params().contains(&p) {
            let names: Vec<&str> = id.params().iter().map(|p| p.name()).collect();
            return Err(usage(format!("{id} has no parameter {p}; expected one of {}", names.join(", "))));
        }
        out.insert(p, value);
    }
    Ok(out)
}

pub fn manifest(run: &RunArgs, samples: usize, route: Route) -> anyhow::Result<RunManifest> {
    let id = model(run.model.as_deref().ok_or_else(|| usage("--model is required"))?)?;
    let params = params(id, &run.params)?;
    let [x1, x2] = match run.x0.as_slice() {
        [a, b] => [complex(a)?, complex(b)?],
        _ => return Err(usage("--x0 takes two values re,im")),
    };
    if !(run.t1.is_finite() && run.t1 > 0.0) {
        return Err(usage("--t1 must be positive"));
    }
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    Ok(RunManifest::new(id, &params, [x1, x2], run.t1, samples, route, seed(DEFAULT_SEED)?))
}
