//! `simulate`: algebraic trajectory to CSV plus manifest.

use std::path::Path;

use algflow::trajectory::{algebraic_solve_with, Trajectory};
use algflow::Error;
use anyhow::Context;
use serde::Serialize;

use crate::input::usage;
use crate::manifest::{Outcome, RunManifest};

#[derive(Serialize)]
struct Row {
    t: f64,
    re_x1: f64,
    im_x1: f64,
    re_x2: f64,
    im_x2: f64,
    residual: f64,
    branch_distance: f64,
}

/// Rejected initial states are usage errors, everything else is a failure.
pub fn screen(e: Error) -> anyhow::Error {
    match e {
        Error::InvalidInput(_) | Error::ZeroCollision(_) | Error::DivisionByZeroX1(_) => usage(format!("initial state rejected: {e}")),
        e => e.into(),
    }
}

pub fn solve(m: &RunManifest) -> anyhow::Result<Trajectory<f64>> {
    let (id, p, opts) = (m.id()?, m.model_params()?, m.options()?);
    algebraic_solve_with(id, &p, &m.z0(), &m.times(), &opts).map_err(screen)
}

pub fn write_csv(traj: &Trajectory<f64>, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for ((t, z), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        w.serialize(Row {
            t: *t,
            re_x1: z.x1.re,
            im_x1: z.x1.im,
            re_x2: z.x2.re,
            im_x2: z.x2.im,
            residual: d.residual,
            branch_distance: d.branch_distance,
        })?;
    }
    if traj.is_empty() {
        w.write_record(["t", "re_x1", "im_x1", "re_x2", "im_x2", "residual", "branch_distance"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(mut m: RunManifest, out: &Path) -> anyhow::Result<bool> {
    let traj = solve(&m)?;
    write_csv(&traj, out)?;
    let outcome = Outcome::new(&traj.termination, traj.len());
    match (outcome.t_est, &outcome.cause) {
        (Some(t), Some(cause)) => eprintln!("{}: {cause} near t = {t}, {} rows kept", m.model, traj.len()),
        (Some(t), None) => eprintln!("{}: coefficient solution ends at t = {t}, {} rows kept", m.model, traj.len()),
        _ => {}
    }
    m.outcome = Some(outcome);
    let sidecar = RunManifest::sidecar(out);
    m.save(&sidecar)?;
    println!("wrote {} rows to {} (manifest {})", traj.len(), out.display(), sidecar.display());
    Ok(true)
}
