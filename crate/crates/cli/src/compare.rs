//! `compare`: algebraic path against the reference integrator.

use algflow::compare::{compare_model, Verdict};
use algflow::oracle::IntegrationSettings;
use algflow::trajectory::TrajectoryEnd;

use crate::input::usage;
use crate::manifest::RunManifest;

fn describe(end: &TrajectoryEnd<f64>) -> String {
    match *end {
        TrajectoryEnd::Completed => "completed".into(),
        TrajectoryEnd::SingularityReached { t_est, cause } => format!("{cause} at t = {t_est}"),
        TrajectoryEnd::Horizon { t } => format!("horizon at t = {t}"),
    }
}

pub fn run(m: &RunManifest, tol: f64, rtol: f64, atol: f64) -> anyhow::Result<bool> {
    if !(tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let settings = IntegrationSettings::new(rtol, atol).map_err(|e| usage(e.to_string()))?;
    let (id, p) = (m.id()?, m.model_params()?);
    let c = compare_model(id, &p, &m.z0(), m.t1, m.samples, &settings, &m.options()?).map_err(crate::simulate::screen)?;
    let verdict = c.verdict(tol);
    println!("model={}", m.model);
    println!("deviation={:e}", c.deviation);
    println!("compared_samples={}", c.compared);
    println!("algebraic={}", describe(&c.algebraic.termination));
    match c.oracle.singularity {
        Some((t, cause)) => println!("oracle={cause} at t = {t}"),
        None => println!("oracle=completed"),
    }
    match verdict {
        Verdict::Agree { .. } => println!("verdict=agree (tol {tol:e})"),
        Verdict::SingularAgree { algebraic, oracle, .. } => {
            println!("verdict=singular_agree (|dt| = {:e})", (algebraic - oracle).abs())
        }
        Verdict::Disagree { reason } => println!("verdict=disagree ({reason})"),
    }
    Ok(verdict.is_ok())
}
