//! `sweep`: classify seeded instances drawn from a grid description.
//!
//! Instance `i` draws from its own streams keyed by `(seed, i)`, and rows are
//! written in index order, so output does not depend on `--workers`.

use std::collections::BTreeMap;
use std::path::Path;

use algflow::bridge::Zeros;
use algflow::catalog::ModelId;
use algflow::params::{ModelParams, Param};
use algflow::sample::{self, Bounds, DEFAULT_SEED};
use algflow::trajectory::{algebraic_solve, uniform_times, Trajectory, TrajectoryEnd};
use algflow::Complex64;
use anyhow::Context;
use rayon::prelude::*;
use serde::Deserialize;

use crate::input::{self, usage};

/// A parameter drawn uniformly from a disk.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    #[serde(default)]
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroBounds {
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "half")]
    pub min_x1: f64,
    #[serde(default = "half")]
    pub min_gap: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl Default for ZeroBounds {
    fn default() -> Self {
        ZeroBounds { radius: 1.0, min_x1: 0.5, min_gap: 0.5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub model: Option<String>,
    #[serde(default)]
    pub count: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "one")]
    pub t1: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Test `x(T) = x(0)` at this `T`, which must be a sample time.
    pub period: Option<f64>,
    #[serde(default = "default_period_tol")]
    pub period_tol: f64,
    /// Unlisted parameters are drawn from the disk of radius 0.5.
    #[serde(default)]
    pub params: BTreeMap<String, Disk>,
    #[serde(default)]
    pub x0: ZeroBounds,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    200
}

fn default_period_tol() -> f64 {
    1e-6
}

impl Grid {
    /// An empty file is an empty grid.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let text = if text.trim().is_empty() { "{}" } else { text };
        serde_json::from_str(text).map_err(|e| usage(format!("bad grid: {e}")))
    }
}

/// Grid resolved against a model.
struct Plan {
    id: ModelId,
    seed: u64,
    draws: Vec<(Param, Disk)>,
    bounds: Bounds,
    times: Vec<f64>,
    /// Sample index of the period and the period.
    period: Option<(usize, f64)>,
    period_tol: f64,
}

impl Plan {
    fn new(id: ModelId, g: &Grid, seed: u64) -> anyhow::Result<Self> {
        for name in g.params.keys() {
            input::assign(id, [(name.as_str(), Complex64::new(0.0, 0.0))])?;
        }
        let draws = id
            .params()
            .iter()
            .map(|&p| (p, g.params.get(p.name()).copied().unwrap_or(Disk { center: [0.0, 0.0], radius: 0.5 })))
            .collect();
        if !(g.t1 > 0.0 && g.t1.is_finite()) || g.samples == 0 {
            return Err(usage("grid needs t1 > 0 and samples >= 1"));
        }
        let times = uniform_times(g.t1, g.samples);
        let period = match g.period {
            None => None,
            Some(p) => {
                let k = times.iter().position(|t| (t - p).abs() <= 1e-12 * g.t1.max(1.0));
                match k {
                    Some(k) if k > 0 => Some((k, p)),
                    _ => return Err(usage(format!("period {p} is not a positive sample time of [0, {}]", g.t1))),
                }
            }
        };
        let b = &g.x0;
        let bounds = Bounds { param_radius: 0.5, zero_radius: b.radius, min_x1: b.min_x1, min_gap: b.min_gap };
        if !(b.radius > 0.0 && b.min_x1 < b.radius && b.min_gap < 2.0 * b.radius) {
            return Err(usage("x0 bounds admit no initial state"));
        }
        Ok(Plan { id, seed, draws, bounds, times, period, period_tol: g.period_tol })
    }

    fn instance(&self, index: u64) -> (ModelParams<Complex64>, Zeros<f64>) {
        // separate streams keep the zeros independent of the parameter draws
        let mut rng = sample::instance_rng(self.seed, 2 * index);
        let mut p = ModelParams::new();
        for (k, d) in &self.draws {
            let c = Complex64::new(d.center[0], d.center[1]);
            let v = if d.radius > 0.0 { c + sample::disk(&mut rng, d.radius) } else { c };
            p.set(*k, v);
        }
        (p, sample::zeros(&mut sample::instance_rng(self.seed, 2 * index + 1), &self.bounds))
    }

    fn classify(&self, traj: &Trajectory<f64>, z0: &Zeros<f64>) -> (&'static str, Option<f64>, Option<String>) {
        match traj.termination {
            TrajectoryEnd::SingularityReached { t_est, cause } => ("singular", Some(t_est), Some(cause.to_string())),
            TrajectoryEnd::Horizon { t } => ("horizon", Some(t), None),
            TrajectoryEnd::Completed => match self.period {
                Some((k, p)) if traj.states[k].distance(z0) <= self.period_tol => ("periodic", Some(p), None),
                _ => ("completed", None, None),
            },
        }
    }

    fn row(&self, index: u64) -> Vec<String> {
        let (p, z0) = self.instance(index);
        let (class, time, cause, residual, error) = match algebraic_solve(self.id, &p, &z0, &self.times) {
            Ok(traj) => {
                let (class, time, cause) = self.classify(&traj, &z0);
                (class, time, cause, Some(traj.max_relative_residual()), None)
            }
            Err(e) => ("error", None, None, None, Some(e.to_string())),
        };
        let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
        let mut r = vec![index.to_string(), class.to_string(), opt(time), cause.unwrap_or_default()];
        for c in [z0.x1, z0.x2] {
            r.extend([format!("{:?}", c.re), format!("{:?}", c.im)]);
        }
        for (k, _) in &self.draws {
            let v = p.get(*k);
            r.extend([format!("{:?}", v.re), format!("{:?}", v.im)]);
        }
        r.push(opt(residual));
        r.push(error.unwrap_or_default());
        r
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["index", "classification", "time", "cause", "re_x1", "im_x1", "re_x2", "im_x2"]
            .map(String::from)
            .into();
        for (k, _) in &self.draws {
            h.extend([format!("re_{k}"), format!("im_{k}")]);
        }
        h.extend(["max_residual".into(), "error".into()]);
        h
    }
}

const EMPTY_HEADER: [&str; 4] = ["index", "classification", "time", "cause"];

/// Rows in index order; `None` for an empty grid.
pub fn sweep(model: Option<&str>, g: &Grid, workers: usize) -> anyhow::Result<Option<(Vec<String>, Vec<Vec<String>>)>> {
    if g.count == 0 {
        return Ok(None);
    }
    let name = model.or(g.model.as_deref()).ok_or_else(|| usage("give --model or a model in the grid"))?;
    let plan = Plan::new(input::model(name)?, g, input::seed(g.seed)?)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let rows = pool.install(|| (0..g.count).into_par_iter().map(|i| plan.row(i)).collect());
    Ok(Some((plan.header(), rows)))
}

pub fn run(model: Option<&str>, grid: &Path, workers: usize, out: &Path) -> anyhow::Result<bool> {
    if workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let text = std::fs::read_to_string(grid).with_context(|| format!("reading {}", grid.display()))?;
    let g = Grid::parse(&text)?;
    let mut w = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    let Some((header, rows)) = sweep(model, &g, workers)? else {
        w.write_record(EMPTY_HEADER)?;
        w.flush()?;
        println!("empty grid, no instances");
        return Ok(true);
    };
    w.write_record(&header)?;
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &rows {
        w.write_record(r)?;
        *counts.entry(r[1].as_str()).or_default() += 1;
    }
    w.flush()?;
    let summary: Vec<String> = counts.iter().map(|(k, n)| format!("{k}={n}")).collect();
    println!("{} instances: {}", rows.len(), summary.join(" "));
    Ok(true)
}
