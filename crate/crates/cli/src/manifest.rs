//! JSON sidecar that pins down a simulation run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use algflow::bridge::{CoeffPair, Zeros};
use algflow::catalog::ModelId;
use algflow::flows::{A3_TOL, QUAD_TOL, SCALAR_TOL};
use algflow::params::{ModelParams, Param};
use algflow::trajectory::{uniform_times, SolveOptions, TrajectoryEnd};
use algflow::Complex64;
use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::input::{self, usage};
use crate::Route;

pub const FORMAT: &str = "algflow-run/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTolerances {
    /// `[rtol, atol]` of numerically integrated scalar components.
    pub scalar: [f64; 2],
    /// `[rtol, atol]` of the A3 second-order system.
    pub a3: [f64; 2],
    pub quadrature: f64,
}

impl Default for FlowTolerances {
    fn default() -> Self {
        FlowTolerances { scalar: [SCALAR_TOL.0, SCALAR_TOL.1], a3: [A3_TOL.0, A3_TOL.1], quadrature: QUAD_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// `completed`, `singular` or `horizon`.
    pub termination: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_est: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
    pub rows: usize,
}

impl Outcome {
    pub fn new(end: &TrajectoryEnd<f64>, rows: usize) -> Self {
        let (termination, t_est, cause) = match *end {
            TrajectoryEnd::Completed => ("completed", None, None),
            TrajectoryEnd::SingularityReached { t_est, cause } => ("singular", Some(t_est), Some(cause.to_string())),
            TrajectoryEnd::Horizon { t } => ("horizon", Some(t), None),
        };
        Outcome { termination: termination.into(), t_est, cause, rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: String,
    pub model: String,
    /// Parameter values as `[re, im]`.
    pub params: BTreeMap<String, [f64; 2]>,
    pub x0: [[f64; 2]; 2],
    pub t1: f64,
    pub samples: usize,
    pub route: String,
    pub tolerances: FlowTolerances,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

impl RunManifest {
    pub fn new(
        id: ModelId,
        params: &BTreeMap<Param, Complex64>,
        x0: [Complex64; 2],
        t1: f64,
        samples: usize,
        route: Route,
        seed: u64,
    ) -> Self {
        let route = match route {
            Route::Auto => "auto",
            Route::Y12 => "Y12",
            Route::Y13 => "Y13",
            Route::Y23 => "Y23",
        };
        RunManifest {
            format: FORMAT.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            model: id.name().into(),
            params: params.iter().map(|(k, v)| (k.name().to_string(), pair(*v))).collect(),
            x0: [pair(x0[0]), pair(x0[1])],
            t1,
            samples,
            route: route.into(),
            tolerances: FlowTolerances::default(),
            seed,
            outcome: None,
        }
    }

    /// Reads a manifest; `ALGFLOW_SEED` still overrides the stored seed.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut m: RunManifest =
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: not a run manifest: {e}", path.display())))?;
        if m.format != FORMAT {
            return Err(usage(format!("{}: unsupported manifest format {:?}", path.display(), m.format)));
        }
        m.seed = input::seed(m.seed)?;
        m.outcome = None;
        m.id()?;
        m.model_params()?;
        m.options()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// `traj.csv` -> `traj.manifest.json`.
    pub fn sidecar(csv: &Path) -> PathBuf {
        csv.with_extension("manifest.json")
    }

    pub fn id(&self) -> anyhow::Result<ModelId> {
        input::model(&self.model)
    }

    pub fn model_params(&self) -> anyhow::Result<ModelParams<Complex64>> {
        let id = self.id()?;
        let named = self.params.iter().map(|(k, v)| (k.as_str(), Complex64::new(v[0], v[1])));
        Ok(ModelParams::from_pairs(input::assign(id, named)?))
    }

    pub fn z0(&self) -> Zeros<f64> {
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        Zeros::new(c(self.x0[0]), c(self.x0[1]))
    }

    pub fn times(&self) -> Vec<f64> {
        uniform_times(self.t1, self.samples)
    }

    pub fn options(&self) -> anyhow::Result<SolveOptions> {
        let route = match self.route.as_str() {
            "auto" => None,
            r => Some(r.parse::<CoeffPair>().map_err(|_| usage(format!("unknown route {r:?}")))?),
        };
        Ok(SolveOptions { route, ..Default::default() })
    }
}
