//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use algflow::bridge::{coeffs_from_zeros, recover_zeros, CoeffPair};
use algflow::catalog::ModelId;
use algflow::compare::{compare_model, Verdict};
use algflow::flows::{a3_energy, a3_solve, bernoulli_solve, riccati_solve, A3Spec, FlowSolution};
use algflow::ode::{dopri5, Tolerances};
use algflow::oracle::IntegrationSettings;
use algflow::params::{ModelParams, Param};
use algflow::sample::{self, Bounds};
use algflow::symbolic::certify::{verify_all, Status};
use algflow::trajectory::{algebraic_solve, uniform_times, TrajectoryEnd};
use algflow::Complex64 as C;
use num_traits::Zero;

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let dt = start.elapsed();
    o.detail = format!("{} [{:.2}s, limit {}s]", o.detail, dt.as_secs_f64(), limit.as_secs());
    o.pass &= dt <= limit;
    o
}

fn criterion_1() -> Outcome {
    let report = verify_all();
    let mut bad = Vec::new();
    for m in &report.models {
        let ok = match m.status {
            Status::Pass => true,
            Status::Erratum => m.corrected.as_ref().is_some_and(|(_, d)| d.error.is_none() && d.diff.as_ref().is_some_and(|f| f.iter().all(|p| p.is_zero()))),
            Status::Fail => false,
        };
        if !ok {
            bad.push(m.id.name());
        }
    }
    let a11 = report.models.iter().find(|m| m.id == ModelId::A1_1).is_some_and(|m| m.status == Status::Pass);
    let errata: Vec<_> = report.models.iter().filter(|m| m.status == Status::Erratum).map(|m| m.id.name()).collect();
    outcome(
        report.models.len() == 11 && bad.is_empty() && a11,
        format!("{} models derived, errata {:?}, unexplained {:?}, A1_1 pass={a11}", report.models.len(), errata, bad),
    )
}

fn criterion_2() -> Outcome {
    let report = verify_all();
    let passed = report.identities.iter().filter(|i| i.pass).count();
    outcome(report.identities.len() == 2 && passed == 2, format!("{passed}/{} identities exact", report.identities.len()))
}

fn criterion_3() -> Outcome {
    let b = Bounds::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..10_000u64 {
        let mut rng = sample::instance_rng(SEED, i);
        let z = sample::zeros(&mut rng, &b);
        let c = coeffs_from_zeros(&z);
        for pair in CoeffPair::ALL {
            let third = c.get(pair.third());
            match recover_zeros(pair, pair.project(&c), Some(third), None) {
                Ok(r) => worst = worst.max(r.distance(&z) / (z.x1.norm() + z.x2.norm())),
                Err(_) => failures += 1,
            }
        }
    }
    outcome(worst <= 1e-9 && failures == 0, format!("3x10^4 recoveries, max relative error {worst:.2e}, failures {failures}"))
}

// Criteria 4 and 8 share the same runs.
fn criteria_4_and_8() -> (Outcome, Outcome) {
    let b = Bounds::default();
    // the reference must be tighter than the 1e-6 it adjudicates on the stiffest models
    let settings = IntegrationSettings::new(1e-12, 1e-14).unwrap();
    let mut lines = Vec::new();
    let mut all_ok = true;
    let mut worst_res: f64 = 0.0;
    let mut accepted = 0;
    for id in ModelId::ALL {
        let (mut smooth, mut singular, mut worst_dev) = (0, 0, 0.0f64);
        let mut bad = Vec::new();
        for i in 0..100u64 {
            let inst = sample::instance(id, SEED, i, &b);
            match compare_model(id, &inst.params, &inst.z0, 1.0, 200, &settings, &Default::default()) {
                Ok(c) => match c.verdict(1e-6) {
                    Verdict::Agree { deviation } => {
                        smooth += 1;
                        worst_dev = worst_dev.max(deviation);
                        accepted += 1;
                        worst_res = worst_res.max(c.algebraic.max_relative_residual());
                    }
                    Verdict::SingularAgree { .. } => {
                        singular += 1;
                        accepted += 1;
                        worst_res = worst_res.max(c.algebraic.max_relative_residual());
                    }
                    Verdict::Disagree { reason } => bad.push(format!("#{i}: {reason} (dev {:.1e})", c.deviation)),
                },
                Err(e) => bad.push(format!("#{i}: {e}")),
            }
        }
        all_ok &= bad.is_empty();
        lines.push(format!(
            "    {}: {smooth} smooth (max dev {worst_dev:.1e}), {singular} singular, {} failed{}",
            id.name(),
            bad.len(),
            bad.first().map(|s| format!(", first {s}")).unwrap_or_default()
        ));
    }
    let c4 = outcome(all_ok, format!("11 models x 100 instances\n{}", lines.join("\n")));
    let c8 = outcome(
        accepted > 0 && worst_res <= 1e-8,
        format!("{accepted} accepted trajectories, max relative double-root residual {worst_res:.2e}"),
    );
    (c4, c8)
}

fn reference(f: impl Fn(C) -> C, y0: C, t1: f64) -> Option<algflow::DenseOutput64> {
    dopri5(|_, y: &[C], dy: &mut [C]| dy[0] = f(y[0]), 0.0, t1, &[y0], &Tolerances::new(1e-13, 1e-15)).ok()
}

// Max over samples in [0, min(1, 0.9 horizon)] of |y - y_ref| / (1 + |y_ref|).
fn closed_form_error(sol: &FlowSolution<f64>, f: impl Fn(C) -> C, y0: C) -> f64 {
    let t1 = sol.horizon().map_or(1.0, |h| (0.9 * h).min(1.0));
    let Some(r) = reference(f, y0, t1) else { return f64::INFINITY };
    let mut worst: f64 = 0.0;
    for t in uniform_times(t1, 50) {
        let (Ok(y), Ok(yr)) = (sol.eval(t), r.eval(t)) else { return f64::INFINITY };
        worst = worst.max((y - yr[0]).norm() / (1.0 + yr[0].norm()));
    }
    worst
}

fn criterion_5() -> Outcome {
    let mut worst_b: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = sample::instance_rng(SEED ^ 0xb0, i);
        let m = 1 + (i % 3) as u32;
        let mut a = sample::disk(&mut rng, 1.0);
        if i % 10 == 0 {
            a *= 1e-11;
        }
        let b = sample::disk(&mut rng, 0.5);
        let y0 = sample::disk(&mut rng, 1.0);
        let sol = bernoulli_solve(a, b, m, y0);
        worst_b = worst_b.max(closed_form_error(&sol, |y| a * y + b * y.powu(m + 1), y0));
    }
    for i in 0..100u64 {
        let mut rng = sample::instance_rng(SEED ^ 0x71, i);
        let a0 = sample::disk(&mut rng, 1.0);
        let mut a1 = sample::disk(&mut rng, 1.0);
        let a2 = sample::disk(&mut rng, 1.0);
        if i % 10 == 0 {
            // Δ² = a1² - 4 a0 a2 pushed to ~1e-12
            a1 = (4.0 * a0 * a2).sqrt() + C::new(1e-12, 0.0);
        }
        if i % 10 == 5 {
            a1 = (4.0 * a0 * a2 + C::new(0.0, 1.0)).sqrt();
        }
        let y0 = sample::disk(&mut rng, 1.0);
        let sol = riccati_solve(a0, a1, a2, y0);
        worst_r = worst_r.max(closed_form_error(&sol, |y| a0 + a1 * y + a2 * y * y, y0));
    }
    outcome(
        worst_b <= 1e-9 && worst_r <= 1e-9,
        format!("Bernoulli max error {worst_b:.2e}, Riccati max error {worst_r:.2e} (100 instances each)"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in [2u32, 3] {
        for i in 0..100u64 {
            let mut rng = sample::instance_rng(SEED ^ (0xe0 + u64::from(m)), i);
            let mut d = || sample::disk(&mut rng, 0.5);
            let spec = A3Spec { alpha0: d(), alpha1: d(), beta0: d(), beta1: d(), m };
            let y0 = [sample::disk(&mut rng, 1.0), sample::disk(&mut rng, 1.0)];
            let sols = match a3_solve(&spec, y0, 1.0) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("m={m} #{i}: {e}"));
                    continue;
                }
            };
            if sols[0].horizon().is_some_and(|h| h <= 1.0) {
                continue;
            }
            let e0 = a3_energy(&spec, y0[0], spec.alpha0 + spec.alpha1 * y0[1]);
            let mut drift: f64 = 0.0;
            for t in uniform_times(1.0, 100) {
                let (u, v) = (sols[0].eval(t).unwrap(), sols[1].eval(t).unwrap());
                drift = drift.max((a3_energy(&spec, u, spec.alpha0 + spec.alpha1 * v) - e0).norm() / (1.0 + e0.norm()));
            }
            worst = worst.max(drift);
            checked += 1;
        }
    }
    outcome(
        failures.is_empty() && worst <= 1e-8 && checked > 0,
        format!("{checked} instances, max relative drift {worst:.2e}, failures {failures:?}"),
    )
}

fn criterion_7() -> Outcome {
    let b = Bounds::default();
    let times = uniform_times(1.0, 200);
    let (mut worst, mut regular, mut singular) = (0.0f64, 0, 0);
    let mut errors = Vec::new();
    for i in 0..50u64 {
        let mut rng = sample::instance_rng(SEED ^ 0x150, i);
        let p = ModelParams::new()
            .with(Param::A, C::new(0.0, std::f64::consts::TAU))
            .with(Param::B, sample::disk(&mut rng, 0.05));
        let z0 = sample::zeros(&mut rng, &b);
        match algebraic_solve(ModelId::A1_1, &p, &z0, &times) {
            Ok(tr) if tr.termination == TrajectoryEnd::Completed => {
                regular += 1;
                worst = worst.max(tr.last().unwrap().1.distance(&z0));
            }
            Ok(_) => singular += 1,
            Err(e) => errors.push(format!("#{i}: {e}")),
        }
    }
    outcome(
        errors.is_empty() && regular > 0 && worst <= 1e-6,
        format!("{regular} regular, {singular} singular, max |x(1)-x(0)| {worst:.2e}, errors {errors:?}"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, timed(Duration::from_secs(5), criterion_1)));
    results.push((2, criterion_2()));
    results.push((3, timed(Duration::from_secs(5), criterion_3)));
    let start = Instant::now();
    let (mut c4, c8) = criteria_4_and_8();
    let dt = start.elapsed();
    c4.detail = format!("{} [{:.1}s, limit 300s]", c4.detail, dt.as_secs_f64());
    c4.pass &= dt <= Duration::from_secs(300);
    results.push((4, c4));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    results.push((7, criterion_7()));
    results.push((8, c8));
    let mut ok = true;
    for (n, o) in &results {
        println!("{} criterion {n}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        ok &= o.pass;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
