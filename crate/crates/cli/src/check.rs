//! `check`: the invariant suite at reduced instance counts.

use std::time::Instant;

use algflow::bridge::{coeffs_from_zeros, recover_zeros, xdot_from_ydot, CoeffPair};
use algflow::catalog::{model_rhs, ModelId};
use algflow::compare::{compare_model, Verdict};
use algflow::flows::{a3_energy, a3_solve, bernoulli_solve, riccati_solve, A3Spec, FlowSolution};
use algflow::ode::{dopri5, Tolerances};
use algflow::oracle::{integrate, integrate_model, IntegrationSettings};
use algflow::params::{ModelParams, Param};
use algflow::sample::{self, Bounds};
use algflow::symbolic::certify::{catalog_rhs, perturbed_catalog, verify_against, verify_twin_models, Status};
use algflow::symbolic::LaurentPoly;
use algflow::trajectory::{algebraic_solve, uniform_times, TrajectoryEnd};
use algflow::Complex64 as C;

struct Counts {
    round_trip: u64,
    agreement: u64,
    transfer: u64,
    closed_form: u64,
    energy: u64,
    isochrony: u64,
}

impl Counts {
    fn new(fast: bool) -> Self {
        if fast {
            Counts { round_trip: 2_000, agreement: 4, transfer: 2, closed_form: 20, energy: 10, isochrony: 10 }
        } else {
            Counts { round_trip: 10_000, agreement: 20, transfer: 5, closed_form: 100, energy: 50, isochrony: 50 }
        }
    }
}

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn verify_models(fault: Option<ModelId>) -> Outcome {
    let mut bad = Vec::new();
    for id in ModelId::ALL {
        let catalog = if fault == Some(id) { perturbed_catalog(id, 0, &LaurentPoly::x1()) } else { catalog_rhs(id) };
        let r = verify_against(id, catalog);
        if !r.status.is_acceptable() || (id == ModelId::A1_1 && r.status != Status::Pass) {
            bad.push(format!("{id} {}", r.status.as_str()));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "11 models certified".into() } else { bad.join(", ") })
}

fn twin_identities() -> Outcome {
    let r = verify_twin_models();
    let pass = r.iter().filter(|i| i.pass).count();
    verdict(r.len() == 2 && pass == 2, format!("{pass}/{} identities exact", r.len()))
}

fn round_trip(seed: u64, n: u64) -> Outcome {
    let b = Bounds::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..n {
        let z = sample::zeros(&mut sample::instance_rng(seed, i), &b);
        let c = coeffs_from_zeros(&z);
        for pair in CoeffPair::ALL {
            match recover_zeros(pair, pair.project(&c), Some(c.get(pair.third())), None) {
                Ok(r) => worst = worst.max(r.distance(&z) / (z.x1.norm() + z.x2.norm())),
                Err(_) => failures += 1,
            }
        }
    }
    verdict(worst <= 1e-9 && failures == 0, format!("{} recoveries, max relative error {worst:.1e}, failures {failures}", 3 * n))
}

fn reference_settings() -> IntegrationSettings {
    IntegrationSettings::new(1e-12, 1e-14).expect("positive tolerances")
}

// Oracle agreement and double-root preservation share their runs.
fn agreement(seed: u64, n: u64) -> (Outcome, Outcome) {
    let b = Bounds::default();
    let settings = reference_settings();
    let (mut worst_dev, mut worst_res, mut accepted) = (0.0f64, 0.0f64, 0);
    let mut bad = Vec::new();
    for id in ModelId::ALL {
        for i in 0..n {
            let inst = sample::instance(id, seed, i, &b);
            match compare_model(id, &inst.params, &inst.z0, 1.0, 200, &settings, &Default::default()) {
                Ok(c) => match c.verdict(1e-6) {
                    Verdict::Disagree { reason } => bad.push(format!("{id} #{i}: {reason}")),
                    v => {
                        if let Verdict::Agree { deviation } = v {
                            worst_dev = worst_dev.max(deviation);
                        }
                        accepted += 1;
                        worst_res = worst_res.max(c.algebraic.max_relative_residual());
                    }
                },
                Err(e) => bad.push(format!("{id} #{i}: {e}")),
            }
        }
    }
    let dev = verdict(
        bad.is_empty(),
        format!("{accepted}/{} instances, max deviation {worst_dev:.1e}{}", 11 * n, bad.first().map(|s| format!(", {s}")).unwrap_or_default()),
    );
    let res = verdict(accepted > 0 && worst_res <= 1e-8, format!("max relative residual {worst_res:.1e}"));
    (dev, res)
}

// Finite-difference coefficient velocities pushed through the transfer
// formulas reproduce the vector field along reference trajectories.
fn transfer_consistency(seed: u64, n: u64) -> Outcome {
    let b = Bounds::default();
    let settings = reference_settings();
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for id in ModelId::ALL {
        let pair = id.pair();
        for i in 0..n {
            let inst = sample::instance(id, seed ^ 0x7f, i, &b);
            let run = match integrate_model(id, &inst.params, &inst.z0, 1.0, &settings) {
                Ok(r) => r,
                Err(e) => {
                    bad.push(format!("{id} #{i}: {e}"));
                    continue;
                }
            };
            let t_end = run.dense.t_end();
            let y = |t: f64| run.zeros_at(t).map(|z| pair.project(&coeffs_from_zeros(&z)));
            for k in 1..10 {
                let t = 0.1 * k as f64 * t_end;
                let Ok(z) = run.zeros_at(t) else { continue };
                let Ok(f) = model_rhs(id, &inst.params, &z) else { continue };
                // step shrinks with the local speed of the zeros
                let h = 1e-4 * t_end * z.scale() / (z.scale() + f.0.norm() + f.1.norm());
                let [Ok(m2), Ok(m1), Ok(p1), Ok(p2)] = [-2.0, -1.0, 1.0, 2.0].map(|s| y(t + s * h)) else { continue };
                let ydot = [0, 1].map(|j| (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * h));
                match xdot_from_ydot(pair, &z, ydot) {
                    Ok(xd) => {
                        worst = worst.max((xd.0 - f.0).norm() / (1.0 + f.0.norm()));
                        worst = worst.max((xd.1 - f.1).norm() / (1.0 + f.1.norm()));
                    }
                    Err(e) => bad.push(format!("{id} #{i}: {e}")),
                }
            }
        }
    }
    verdict(bad.is_empty() && worst <= 1e-5, format!("max relative mismatch {worst:.1e}{}", bad.first().map(|s| format!(", {s}")).unwrap_or_default()))
}

fn integrator() -> Outcome {
    let s = IntegrationSettings::default();
    let e = integrate(|_, y: &[C], dy: &mut [C]| dy[0] = y[0], &[C::new(1.0, 0.0)], 0.0, 1.0, &s).and_then(|d| d.eval(1.0));
    let rot = integrate(|_, y: &[C], dy: &mut [C]| dy[0] = C::i() * y[0], &[C::new(1.0, 0.0)], 0.0, std::f64::consts::TAU, &s)
        .and_then(|d| d.eval(std::f64::consts::TAU));
    let pole = integrate(|_, y: &[C], dy: &mut [C]| dy[0] = y[0] * y[0], &[C::new(1.0, 0.0)], 0.0, 2.0, &s);
    let err_e = e.map(|y| (y[0] - std::f64::consts::E).norm()).unwrap_or(f64::INFINITY);
    let err_rot = rot.map(|y| (y[0] - 1.0).norm()).unwrap_or(f64::INFINITY);
    let t_pole = match pole {
        Err(algflow::Error::StepCollapse { t_est }) => t_est,
        _ => f64::NAN,
    };
    verdict(
        err_e <= 1e-10 && err_rot <= 1e-9 && (0.99..=1.01).contains(&t_pole),
        format!("exp error {err_e:.1e}, rotation error {err_rot:.1e}, pole at {t_pole:.4}"),
    )
}

fn closed_form_error(sol: &FlowSolution<f64>, f: impl Fn(C) -> C, y0: C) -> f64 {
    let t1 = sol.horizon().map_or(1.0, |h| (0.9 * h).min(1.0));
    let Ok(r) = dopri5(|_, y: &[C], dy: &mut [C]| dy[0] = f(y[0]), 0.0, t1, &[y0], &Tolerances::new(1e-13, 1e-15)) else {
        return f64::INFINITY;
    };
    let mut worst: f64 = 0.0;
    for t in uniform_times(t1, 50) {
        let (Ok(y), Ok(yr)) = (sol.eval(t), r.eval(t)) else { return f64::INFINITY };
        worst = worst.max((y - yr[0]).norm() / (1.0 + yr[0].norm()));
    }
    worst
}

fn closed_forms(seed: u64, n: u64) -> Outcome {
    let (mut worst_b, mut worst_r) = (0.0f64, 0.0f64);
    for i in 0..n {
        let mut rng = sample::instance_rng(seed ^ 0xb0, i);
        let m = 1 + (i % 3) as u32;
        let a = sample::disk(&mut rng, 1.0) * if i % 10 == 0 { 1e-11 } else { 1.0 };
        let b = sample::disk(&mut rng, 0.5);
        let y0 = sample::disk(&mut rng, 1.0);
        worst_b = worst_b.max(closed_form_error(&bernoulli_solve(a, b, m, y0), |y| a * y + b * y.powu(m + 1), y0));

        let mut rng = sample::instance_rng(seed ^ 0x71, i);
        let (a0, mut a1, a2) = (sample::disk(&mut rng, 1.0), sample::disk(&mut rng, 1.0), sample::disk(&mut rng, 1.0));
        if i % 10 == 0 {
            a1 = (4.0 * a0 * a2).sqrt() + C::new(1e-12, 0.0);
        }
        let y0 = sample::disk(&mut rng, 1.0);
        worst_r = worst_r.max(closed_form_error(&riccati_solve(a0, a1, a2, y0), |y| a0 + a1 * y + a2 * y * y, y0));
    }
    verdict(worst_b <= 1e-9 && worst_r <= 1e-9, format!("Bernoulli {worst_b:.1e}, Riccati {worst_r:.1e}"))
}

fn energy(seed: u64, n: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for m in [2u32, 3] {
        for i in 0..n {
            let mut rng = sample::instance_rng(seed ^ (0xe0 + u64::from(m)), i);
            let mut d = || sample::disk(&mut rng, 0.5);
            let spec = A3Spec { alpha0: d(), alpha1: d(), beta0: d(), beta1: d(), m };
            let y0 = [sample::disk(&mut rng, 1.0), sample::disk(&mut rng, 1.0)];
            let sols = match a3_solve(&spec, y0, 1.0) {
                Ok(s) => s,
                Err(e) => {
                    bad.push(format!("m={m} #{i}: {e}"));
                    continue;
                }
            };
            if sols[0].horizon().is_some_and(|h| h <= 1.0) {
                continue;
            }
            let e0 = a3_energy(&spec, y0[0], spec.alpha0 + spec.alpha1 * y0[1]);
            for t in uniform_times(1.0, 50) {
                let (Ok(u), Ok(v)) = (sols[0].eval(t), sols[1].eval(t)) else { continue };
                worst = worst.max((a3_energy(&spec, u, spec.alpha0 + spec.alpha1 * v) - e0).norm() / (1.0 + e0.norm()));
            }
        }
    }
    verdict(bad.is_empty() && worst <= 1e-8, format!("max relative drift {worst:.1e}{}", bad.first().map(|s| format!(", {s}")).unwrap_or_default()))
}

fn isochrony(seed: u64, n: u64) -> Outcome {
    let b = Bounds::default();
    let times = uniform_times(1.0, 200);
    let (mut worst, mut regular) = (0.0f64, 0);
    let mut bad = Vec::new();
    for i in 0..n {
        let mut rng = sample::instance_rng(seed ^ 0x150, i);
        let p = ModelParams::new().with(Param::A, C::new(0.0, std::f64::consts::TAU)).with(Param::B, sample::disk(&mut rng, 0.05));
        let z0 = sample::zeros(&mut rng, &b);
        match algebraic_solve(ModelId::A1_1, &p, &z0, &times) {
            Ok(tr) if tr.termination == TrajectoryEnd::Completed => {
                regular += 1;
                worst = worst.max(tr.last().expect("completed run has samples").1.distance(&z0));
            }
            Ok(_) => {}
            Err(e) => bad.push(format!("#{i}: {e}")),
        }
    }
    verdict(bad.is_empty() && regular > 0 && worst <= 1e-6, format!("{regular}/{n} periodic runs, max |x(1)-x(0)| {worst:.1e}"))
}

/// Prints one line per invariant; true iff all pass.
pub fn run(fast: bool, fault: Option<ModelId>, seed: u64) -> bool {
    let n = Counts::new(fast);
    let start = Instant::now();
    let (agree, residual) = agreement(seed, n.agreement);
    let results = [
        ("verify_model", verify_models(fault)),
        ("verify_remark_321", twin_identities()),
        ("round_trip", round_trip(seed, n.round_trip)),
        ("oracle_agreement", agree),
        ("double_root_preservation", residual),
        ("transfer_consistency", transfer_consistency(seed, n.transfer)),
        ("integrator", integrator()),
        ("closed_forms", closed_forms(seed, n.closed_form)),
        ("energy_invariant", energy(seed, n.energy)),
        ("isochrony", isochrony(seed, n.isochrony)),
    ];
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                println!("FAIL {name}: {d}");
                ok = false;
            }
        }
    }
    println!("{} in {:.1}s", if ok { "all invariants hold" } else { "invariant failures" }, start.elapsed().as_secs_f64());
    ok
}
