//! Theory calculator against its reference values, and the lemma
//! verification suite at its default configuration.

mod common;

use apflow::lemmas::{verify_lemmas, LemmaVerifyConfig};
use apflow::matrix::DenseMatrix;
use apflow::theory;
use common::*;

#[test]
fn kappa_reference_value() {
    let kappa = theory::kappa_of_delta(0.1).unwrap();
    assert!((kappa - 1.2222222222222223).abs() < 1e-12);
    assert!((kappa - 1.223).abs() < 1e-3);
}

#[test]
fn mu_reference_value_for_unit_spectrum() {
    // σ₁ = σ_r = τ = r = 1, ε = 1 at κ = 1.223.
    let delta = theory::delta_of_kappa(1.223).unwrap();
    let mu = theory::mu_theory(delta, 1.0, 1.0, 1, 1.0).unwrap();
    assert!((mu - 4.5e-4).abs() <= 0.05 * 4.5e-4, "mu = {mu:e}");
}

#[test]
fn xi_reference_value_at_tau_50() {
    let xi = theory::xi_of(1.223, 50.0);
    assert!((xi - 0.9968).abs() < 1e-4, "xi = {xi}");
}

#[test]
fn lambda1_below_one_for_tau_up_to_78() {
    let kappa = 1.223;
    let mu = 1e-3;
    let mut tau = 1.0;
    while tau <= 78.0 {
        let (l1, l2) = theory::contraction_eigs(theory::xi_of(kappa, tau), mu).unwrap();
        assert!(l1.abs() < 1.0, "lambda1 = {l1} at tau = {tau}");
        assert!(l2.abs() <= l1.abs());
        tau += 0.5;
    }
}

#[test]
fn kappa_bounded_for_small_delta() {
    let mut delta = 0.0;
    while delta <= 0.1 + 1e-12 {
        assert!(theory::kappa_of_delta(delta).unwrap() <= 1.223);
        delta += 1e-3;
    }
}

#[test]
fn matrix_power_matches_repeated_multiplication_randomized() {
    let mut r = rng(19);
    let mut tested = 0;
    while tested < 100 {
        let a = randn::<f64>(2, 2, &mut r);
        let tr = a.get(0, 0) + a.get(1, 1);
        let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
        if tr * tr - 4.0 * det <= 1e-3 {
            continue; // need distinct real eigenvalues
        }
        tested += 1;
        let mut prod = DenseMatrix::<f64>::identity(2);
        for i in 1..=20usize {
            prod = prod.matmul(&a);
            let closed = theory::matrix_power_2x2(&a, i).unwrap();
            let err = closed.sub(&prod).fro_norm() / prod.fro_norm().max(1e-300);
            assert!(err <= 1e-9, "i = {i}, err = {err}");
        }
    }
}

#[test]
fn rank_one_init_quality_depends_on_delta_only() {
    // X* = uuᵀ: τ = srank = 1, so γ′ reduces to the δ factor.
    let mut r = rng(23);
    let u = randn::<f64>(6, 1, &mut r);
    let x = apflow::geometry::gram(&u);
    let sigma = x.fro_norm(); // rank-1: σ₁ = ‖X‖_F
    for delta in [0.02, 0.1, 0.3] {
        let got = theory::init_quality(&x, delta).unwrap();
        let gamma = ((1.0 - (1.0 - delta) / (1.0 + delta)) / (2.0 * (2f64.sqrt() - 1.0))).sqrt();
        assert!((got - gamma * sigma.sqrt()).abs() < 1e-10 * sigma.sqrt().max(1.0));
    }
}

#[test]
fn theory_report_consistency() {
    let rep = theory::constants(0.1, 2.0, 0.5, 2, 1.0).unwrap();
    assert!(rep.kappa >= 1.0);
    assert!(rep.tau >= 1.0);
    assert!(rep.xi > 0.0 && rep.xi < 1.0);
    assert!(rep.lambda2.abs() <= rep.lambda1.abs());
    let basin = rep.basin_radius;
    assert!((basin - 0.5f64.sqrt() / (1e3 * (rep.kappa * 4.0).sqrt())).abs() < 1e-15);
}

#[test]
fn lemma_suite_default_configuration_passes() {
    let reports = verify_lemmas(&LemmaVerifyConfig::default()).unwrap();
    assert_eq!(reports.len(), 8);
    for rep in &reports {
        assert!(
            rep.pass,
            "{} failed: worst slack {}",
            rep.id, rep.worst_slack
        );
        assert_eq!(rep.instances, 100);
    }
    let lemma5 = reports
        .iter()
        .find(|r| r.id == "lemma5_step_size_equivalence")
        .unwrap();
    let get = |name: &str| {
        lemma5
            .observed
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap()
    };
    assert!(get("eta_hat_over_eta_min") >= 10.0 / 10.5);
    assert!(get("eta_hat_over_eta_max") <= 10.0 / 9.0);
    assert!(get("eta_over_eta_star_min") >= 100.0 / 102.0);
    assert!(get("eta_over_eta_star_max") <= 102.0 / 100.0);
}

#[test]
fn lemma_suite_covers_higher_condition_numbers() {
    let cfg = LemmaVerifyConfig {
        n: 24,
        r: 3,
        tau: 20.0,
        trials: 40,
        seed: 3,
        ..LemmaVerifyConfig::default()
    };
    for rep in verify_lemmas(&cfg).unwrap() {
        assert!(rep.pass, "{} failed at tau = 20", rep.id);
    }
}
