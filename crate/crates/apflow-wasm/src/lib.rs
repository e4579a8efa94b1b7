//! Browser demo bindings: three interactive views onto the toolkit, each
//! returning a JSON payload the static page renders onto canvases.
//!
//! 1. `synthetic_demo` — accelerated vs. plain factored descent on a small
//!    Gaussian sensing instance (error curves).
//! 2. `theory_curve` — |λ₁| of the contraction matrix across τ for several
//!    momentum values, with the divergence threshold.
//! 3. `qst_demo` — GHZ/Hadamard/random-state tomography with shot noise
//!    (fidelity, convergence curve, reconstructed density matrix).

use apflow::geometry::gram;
use apflow::qst::{qst_pipeline, CircuitKind, QstRun};
use apflow::sensing::SensingOperator;
use apflow::solver::{
    accelerated_pf, init_spectral, procrustes_flow, MomentumRule, SolverConfig, StepRule,
    TraceTargets,
};
use apflow::theory;
use apflow::DenseMatrix;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err_json(e: impl std::fmt::Display) -> String {
    json!({ "error": format!("{e}") }).to_string()
}

/// Accelerated vs. plain Procrustes flow on a random rank-r instance with a
/// calibrated Gaussian ensemble; returns per-iteration relative errors.
#[wasm_bindgen]
pub fn synthetic_demo(n: usize, r: usize, c: usize, mu: f64, noise: f64, seed: u64) -> String {
    match synthetic_demo_impl(n.clamp(8, 64), r.clamp(1, 5), c.clamp(2, 10), mu, noise, seed) {
        Ok(s) => s,
        Err(e) => err_json(e),
    }
}

fn synthetic_demo_impl(
    n: usize,
    r: usize,
    c: usize,
    mu: f64,
    noise: f64,
    seed: u64,
) -> apflow::Result<String> {
    let raw = apflow::solver::init_random::<f64>(n, r, seed);
    let norm = gram(&raw).fro_norm();
    let u_star = raw.scaled(1.0 / norm.sqrt());
    let x_star = gram(&u_star);
    let m = c * n * r;
    let op = SensingOperator::<f64>::gaussian(n, m, seed ^ 0x5ead)?;
    let mut y = op.apply(&x_star)?;
    if noise > 0.0 {
        let w = apflow::solver::init_random::<f64>(m, 1, seed ^ 0x0153);
        let s = noise / w.fro_norm();
        for (yi, wi) in y.iter_mut().zip(w.data()) {
            *yi += s * wi;
        }
    }
    let u0 = init_spectral(&op, &y, r, 1.5)?;
    let cfg = SolverConfig {
        rank: r,
        momentum: MomentumRule::Fixed(mu.clamp(0.0, 0.95)),
        step: StepRule::Auto,
        delta_estimate: 0.1,
        max_iters: 400,
        rel_change_tol: 1e-9,
        record_trace: true,
        seed,
    };
    let targets = TraceTargets {
        x_star: Some(&x_star),
        u_star: None,
        stop_at_rel_err: None,
    };
    let apf = accelerated_pf(&op, &y, &u0, &cfg, targets)?;
    let pf = procrustes_flow(&op, &y, &u0, &cfg, targets)?;
    let errs = |trace: &apflow::solver::IterTrace| -> Vec<f64> {
        trace
            .records
            .iter()
            .filter_map(|rec| rec.rel_err)
            .collect()
    };
    Ok(json!({
        "n": n, "r": r, "m": m, "mu": mu.clamp(0.0, 0.95), "noise": noise,
        "apf_err": errs(&apf.trace),
        "pf_err": errs(&pf.trace),
    })
    .to_string())
}

/// |λ₁(A)| across τ for a list of momentum values at fixed κ, plus the
/// |λ₁| = 1 crossing of the largest μ.
#[wasm_bindgen]
pub fn theory_curve(kappa: f64, mus_csv: String, tau_max: f64, points: usize) -> String {
    match theory_curve_impl(kappa.max(1.0), &mus_csv, tau_max.clamp(2.0, 5000.0), points.clamp(16, 2000)) {
        Ok(s) => s,
        Err(e) => err_json(e),
    }
}

fn theory_curve_impl(
    kappa: f64,
    mus_csv: &str,
    tau_max: f64,
    points: usize,
) -> apflow::Result<String> {
    let mus: Vec<f64> = mus_csv
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .filter(|&m: &f64| m >= 0.0)
        .collect();
    let mus = if mus.is_empty() { vec![0.0, 1e-3] } else { mus };
    let taus: Vec<f64> = (0..points)
        .map(|i| 1.0 + (tau_max - 1.0) * i as f64 / (points - 1) as f64)
        .collect();
    let mut curves = Vec::new();
    let mut crossings = Vec::new();
    for &mu in &mus {
        let lam: Vec<f64> = taus
            .iter()
            .map(|&t| {
                theory::contraction_eigs(theory::xi_of(kappa, t), mu)
                    .map(|(l1, _)| l1.abs())
                    .unwrap_or(f64::NAN)
            })
            .collect();
        crossings.push(theory::tau_threshold(kappa, mu, 1.0, tau_max));
        curves.push(json!({ "mu": mu, "lambda1": lam }));
    }
    Ok(json!({
        "kappa": kappa,
        "tau": taus,
        "curves": curves,
        "crossings": crossings,
    })
    .to_string())
}

/// Shot-noise tomography of a small pure state; returns fidelity, the
/// convergence curve and the reconstructed density matrix.
#[wasm_bindgen]
pub fn qst_demo(q: usize, circuit: String, m: usize, shots: u64, mu: f64, seed: u64) -> String {
    match qst_demo_impl(q.clamp(1, 4), &circuit, m, shots, mu, seed) {
        Ok(s) => s,
        Err(e) => err_json(e),
    }
}

fn qst_demo_impl(
    q: usize,
    circuit: &str,
    m: usize,
    shots: u64,
    mu: f64,
    seed: u64,
) -> apflow::Result<String> {
    let kind = CircuitKind::parse(circuit)?;
    let total = 4usize.pow(q as u32);
    let m = if m == 0 { QstRun::default_m(q) } else { m }.min(total);
    let mut run = QstRun::new(q, kind, m, shots, seed);
    run.mu = Some(mu.clamp(0.0, 0.95));
    let outcome = qst_pipeline(&run)?;
    let truth = &outcome.truth;
    let dim = truth.dim();
    let grid = |mat: &DenseMatrix<apflow::Complex>, im: bool| -> Vec<Vec<f64>> {
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if im { mat.get(i, j).im } else { mat.get(i, j).re })
                    .collect()
            })
            .collect()
    };
    let errs: Vec<f64> = outcome
        .trace
        .records
        .iter()
        .map(|rec| rec.rel_change)
        .collect();
    Ok(json!({
        "q": q, "m": m, "shots": shots, "mu": mu.clamp(0.0, 0.95),
        "fidelity": outcome.fidelity,
        "iterations": outcome.iterations,
        "converged": outcome.converged,
        "rel_change": errs,
        "rho_re": grid(outcome.reconstruction.matrix(), false),
        "rho_im": grid(outcome.reconstruction.matrix(), true),
        "truth_re": grid(truth.matrix(), false),
        "truth_im": grid(truth.matrix(), true),
    })
    .to_string())
}
