//! Numerical verification of the supporting lemma chain on sampled
//! instances.
//!
//! Instances are built so every precondition holds by construction: the
//! ground truth `X* = U*U*ᵀ` has a prescribed condition number, the
//! operator is full observation (exact isometry, δ = 0 so every RIP
//! premise is certifiable), perturbations are drawn inside the basin
//! radius, and μ follows the theory formula with ε ∈ (0, 1].
//!
//! Each report covers one inequality family; a pass requires the worst
//! normalized slack (RHS − LHS scaled to the check's magnitude) to be at
//! least −1e-9.

use crate::error::{Error, Result};
use crate::geometry::{gram, optimal_rotation, procrustes_distance};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::sensing::SensingOperator;
use crate::svd::{factor_singular_values, orthonormal_columns};
use crate::{eig, theory};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct LemmaVerifyConfig {
    /// Ambient dimension of X*.
    pub n: usize,
    pub r: usize,
    /// Condition number of the sampled ground truth.
    pub tau: f64,
    /// Perturbation radius as a fraction of the basin radius, in (0, 1].
    pub radius: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for LemmaVerifyConfig {
    fn default() -> Self {
        LemmaVerifyConfig {
            n: 16,
            r: 2,
            tau: 5.0,
            radius: 1.0,
            trials: 100,
            seed: 7,
        }
    }
}

impl LemmaVerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.r == 0 || self.r > self.n {
            return Err(Error::Invalid("need 1 <= r <= n".into()));
        }
        if self.tau < 1.0 {
            return Err(Error::Invalid("tau must be >= 1".into()));
        }
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(Error::Invalid("radius must lie in (0, 1]".into()));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub id: &'static str,
    pub instances: usize,
    /// min over instances of the normalized RHS − LHS.
    pub worst_slack: f64,
    pub pass: bool,
    /// Observed auxiliary constants (name, value).
    pub observed: Vec<(&'static str, f64)>,
}

const PASS_SLACK: f64 = -1e-9;

struct Instance {
    u_star: DenseMatrix<f64>,
    x_star: DenseMatrix<f64>,
    sigma1: f64,
    sigma_r: f64,
    basin: f64,
    mu: f64,
    u: DenseMatrix<f64>,
    z: DenseMatrix<f64>,
    z0: DenseMatrix<f64>,
}

fn random_orthonormal(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Option<DenseMatrix<f64>> {
    let g = DenseMatrix::<f64>::from_fn(n, r, |_, _| f64::standard_normal(rng));
    let q = orthonormal_columns(&g);
    if q.cols() == r {
        Some(q)
    } else {
        None
    }
}

fn perturb_in_basin(
    base: &DenseMatrix<f64>,
    basin: f64,
    max_frac: f64,
    rng: &mut ChaCha8Rng,
) -> DenseMatrix<f64> {
    let (n, r) = base.shape();
    let e = DenseMatrix::<f64>::from_fn(n, r, |_, _| f64::standard_normal(rng));
    let frac: f64 = rng.random_range(0.0..max_frac);
    let scale = frac * basin / e.fro_norm().max(1e-300);
    base.lin_comb(1.0, &e, scale)
}

fn sample_instance(cfg: &LemmaVerifyConfig, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let q = random_orthonormal(cfg.n, cfg.r, rng)?;
    // Spectrum interpolated between tau and 1: τ(X*) = cfg.tau exactly.
    let sigmas: Vec<f64> = (0..cfg.r)
        .map(|i| {
            if cfg.r == 1 {
                cfg.tau
            } else {
                cfg.tau + (1.0 - cfg.tau) * i as f64 / (cfg.r - 1) as f64
            }
        })
        .collect();
    let u_star = DenseMatrix::from_fn(cfg.n, cfg.r, |i, j| q.get(i, j) * sigmas[j].sqrt());
    let x_star = gram(&u_star);
    let sigma1 = sigmas[0];
    let sigma_r = sigmas[cfg.r - 1];
    let tau = sigma1 / sigma_r;
    let kappa = 1.0; // delta = 0 (full observation)
    let basin = theory::basin_radius(kappa, sigma_r, tau);
    let epsilon: f64 = rng.random_range(0.05..1.0);
    let mu = basin * epsilon / (2.0 * sigma1.sqrt() * cfg.r as f64);

    let u = perturb_in_basin(&u_star, basin, cfg.radius, rng);
    let u_minus = perturb_in_basin(&u_star, basin, cfg.radius, rng);
    let z0 = perturb_in_basin(&u_star, basin, cfg.radius, rng);
    let z = u.lin_comb(1.0 + mu, &u_minus, -mu);

    // Preconditions, re-checked against the rotation-invariant distance.
    let du = procrustes_distance(&u, &u_star).ok()?;
    let dum = procrustes_distance(&u_minus, &u_star).ok()?;
    if du > basin * (1.0 + 1e-9) || dum > basin * (1.0 + 1e-9) {
        return None;
    }
    Some(Instance {
        u_star,
        x_star,
        sigma1,
        sigma_r,
        basin,
        mu,
        u,
        z,
        z0,
    })
}

struct InstanceSlacks {
    lemma3: f64,
    lemma4: f64,
    cor_sigma: f64,
    cor_tau: f64,
    lemma5: f64,
    lemma6: f64,
    lemma7: f64,
    lemma8: f64,
    eta_hat_over_eta: f64,
    eta_over_eta_star: f64,
    theta: f64,
    beta: f64,
}

fn evaluate(inst: &Instance, op: &SensingOperator<f64>, y: &[f64]) -> Result<InstanceSlacks> {
    let mu = inst.mu;
    let s1h = inst.sigma1.sqrt();
    let srh = inst.sigma_r.sqrt();
    let delta = 0.0f64;

    // Lemma 3: singular-value sandwich for a basin point.
    let su = factor_singular_values(&inst.u)?;
    let lemma3 = [
        (s1h * (1.0 + 1e-3) - su[0]) / s1h,
        (su[0] - s1h * (1.0 - 1e-3)) / s1h,
        (srh * (1.0 + 1e-3) - su[su.len() - 1]) / srh,
        (su[su.len() - 1] - srh * (1.0 - 1e-3)) / srh,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);

    // Lemma 4: momentum point stays within (3/2 + 2|μ|)·basin.
    let dz = procrustes_distance(&inst.z, &inst.u_star)?;
    let l4_rhs = (1.5 + 2.0 * mu) * inst.basin;
    let lemma4 = (l4_rhs - dz) / l4_rhs;

    // Corollary: singular values of Z and the Gram operator norms.
    let sz = factor_singular_values(&inst.z)?;
    let sz0 = factor_singular_values(&inst.z0)?;
    let c = (1.5 + 2.0 * mu) * 1e-3;
    let mut cor_sigma = f64::INFINITY;
    for (val, reference) in [(sz[0], s1h), (sz[sz.len() - 1], srh)] {
        cor_sigma = cor_sigma
            .min((reference * (1.0 + c) - val) / reference)
            .min((val - reference * (1.0 - c)) / reference);
    }
    // ‖ZZᵀ‖₂ within [99/100, 101/100]·‖X*‖₂ for both Z and Z₀, and the two
    // Gram norms within [99/101, 101/99] of each other.
    let nz = sz[0] * sz[0];
    let nz0 = sz0[0] * sz0[0];
    let nxs = inst.sigma1;
    for (val, lo, hi) in [
        (nz / nxs, 0.99, 1.01),
        (nz0 / nxs, 0.99, 1.01),
        (nz / nz0, 99.0 / 101.0, 101.0 / 99.0),
    ] {
        cor_sigma = cor_sigma.min(hi - val).min(val - lo);
    }

    // Corollary: condition-number transfer τ(ZZᵀ) ≤ β²·τ(X*).
    let beta = (1.0 + c) / (1.0 - c);
    let tau_z = (sz[0] / sz[sz.len() - 1]).powi(2);
    let tau_star = inst.sigma1 / inst.sigma_r;
    let cor_tau_rhs = beta * beta * tau_star;
    let cor_tau = (cor_tau_rhs - tau_z) / cor_tau_rhs;

    // Step sizes.
    let gram_z0 = gram(&inst.z0);
    let gram_z = gram(&inst.z);
    let g0 = op.gradient(&gram_z0, y)?;
    let gz = op.gradient(&gram_z, y)?;
    let eta = 1.0
        / (4.0 * ((1.0 + delta) * nz0 + eig::spectral_norm(&g0, 1e-10)));
    let qz = orthonormal_columns(&inst.z);
    let gz_proj = gz.matmul(&qz).matmul(&qz.conj_transpose());
    let eta_hat = 1.0
        / (4.0 * ((1.0 + delta) * nz + eig::spectral_norm(&gz_proj, 1e-10)));
    let eta_star = 1.0 / (4.0 * (1.0 + delta) * eig::spectral_norm(&inst.x_star, 1e-10));
    let r1 = eta_hat / eta;
    let r2 = eta / eta_star;
    let lemma5 = [
        (10.0 / 9.0 - r1) / (10.0 / 9.0),
        (r1 - 10.0 / 10.5) / (10.0 / 10.5),
        (102.0 / 100.0 - r2) / (102.0 / 100.0),
        (r2 - 100.0 / 102.0) / (100.0 / 102.0),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);

    // Lemma 6: inner-product lower bound with θ, β.
    let align = optimal_rotation(&inst.z, &inst.u_star)?;
    let delta_z = inst.z.sub(&inst.u_star.matmul(&align.rotation));
    let lhs6 = gz.inner(&gram(&delta_z));
    let one2mu = 1.0 + 2.0 * mu;
    let theta = (1.0 - delta) * (1.0 + one2mu / 200.0).powi(2) / 1e3
        + (1.0 + delta) * (2.0 + one2mu / 200.0) * one2mu / 200.0;
    let gz_z = gz.matmul(&inst.z);
    let rhs6 = -(theta * inst.sigma_r * dz * dz
        + (10.1 / 100.0)
            * beta
            * beta
            * eta_hat
            * (one2mu * one2mu / (1.0 - one2mu / 200.0).powi(2))
            * gz_z.fro_norm_sq());
    let lemma6 = (lhs6 - rhs6) / lhs6.abs().max(rhs6.abs()).max(1e-30);

    // Lemma 7: descent inequality.
    let diff = gram_z.sub(&inst.x_star);
    let lhs7 = gz.inner(&diff);
    let rhs7 = 1.1172 * eta * gz_z.fro_norm_sq() + (1.0 - delta) / 2.0 * diff.fro_norm_sq();
    let lemma7 = (lhs7 - rhs7) / lhs7.abs().max(rhs7.abs()).max(1e-30);

    // Lemma 8: Gram-distance lower bound.
    let lhs8 = diff.fro_norm_sq();
    let rhs8 = 2.0 * (2f64.sqrt() - 1.0) * inst.sigma_r * dz * dz;
    let lemma8 = (lhs8 - rhs8) / lhs8.abs().max(rhs8.abs()).max(1e-30);

    Ok(InstanceSlacks {
        lemma3,
        lemma4,
        cor_sigma,
        cor_tau,
        lemma5,
        lemma6,
        lemma7,
        lemma8,
        eta_hat_over_eta: r1,
        eta_over_eta_star: r2,
        theta,
        beta,
    })
}

/// Verifies the supporting lemma chain on `cfg.trials` sampled instances;
/// returns one report per inequality family (8 rows).
pub fn verify_lemmas(cfg: &LemmaVerifyConfig) -> Result<Vec<LemmaReport>> {
    cfg.validate()?;
    let op = SensingOperator::<f64>::full_observation(cfg.n, cfg.n);

    let resample_cap = 50 * cfg.trials;
    let slacks: Vec<InstanceSlacks> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(crate::sensing::mix_seed(cfg.seed, t as u64));
            let mut attempts = 0;
            let inst = loop {
                if let Some(inst) = sample_instance(cfg, &mut rng) {
                    break inst;
                }
                attempts += 1;
                if attempts > resample_cap {
                    return Err(Error::Generation(resample_cap));
                }
            };
            let y = op.apply(&inst.x_star)?;
            evaluate(&inst, &op, &y)
        })
        .collect::<Result<Vec<_>>>()?;

    let worst = |f: fn(&InstanceSlacks) -> f64| slacks.iter().map(f).fold(f64::INFINITY, f64::min);
    let minmax = |f: fn(&InstanceSlacks) -> f64| {
        let lo = slacks.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = slacks.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (r1_lo, r1_hi) = minmax(|s| s.eta_hat_over_eta);
    let (r2_lo, r2_hi) = minmax(|s| s.eta_over_eta_star);
    let theta_max = slacks.iter().map(|s| s.theta).fold(0.0f64, f64::max);
    let beta_max = slacks.iter().map(|s| s.beta).fold(0.0f64, f64::max);

    let report = |id: &'static str, w: f64, observed: Vec<(&'static str, f64)>| LemmaReport {
        id,
        instances: cfg.trials,
        worst_slack: w,
        pass: w >= PASS_SLACK,
        observed,
    };

    Ok(vec![
        report("lemma3_singular_value_sandwich", worst(|s| s.lemma3), vec![]),
        report("lemma4_momentum_distance", worst(|s| s.lemma4), vec![]),
        report(
            "cor_sigma_bounds_z",
            worst(|s| s.cor_sigma),
            vec![("beta_max", beta_max)],
        ),
        report(
            "cor_tau_condition_number",
            worst(|s| s.cor_tau),
            vec![("beta_max", beta_max)],
        ),
        report(
            "lemma5_step_size_equivalence",
            worst(|s| s.lemma5),
            vec![
                ("eta_hat_over_eta_min", r1_lo),
                ("eta_hat_over_eta_max", r1_hi),
                ("eta_over_eta_star_min", r2_lo),
                ("eta_over_eta_star_max", r2_hi),
            ],
        ),
        report(
            "lemma6_inner_product_bound",
            worst(|s| s.lemma6),
            vec![("theta_max", theta_max), ("beta_max", beta_max)],
        ),
        report("lemma7_descent_inequality", worst(|s| s.lemma7), vec![]),
        report("lemma8_gram_distance_bound", worst(|s| s.lemma8), vec![]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        let cfg = LemmaVerifyConfig {
            trials: 0,
            ..LemmaVerifyConfig::default()
        };
        assert!(verify_lemmas(&cfg).is_err());
    }

    #[test]
    fn small_run_passes() {
        let cfg = LemmaVerifyConfig {
            n: 8,
            r: 2,
            tau: 3.0,
            trials: 10,
            ..LemmaVerifyConfig::default()
        };
        let reports = verify_lemmas(&cfg).unwrap();
        assert_eq!(reports.len(), 8);
        for rep in &reports {
            assert!(rep.pass, "{} failed with slack {}", rep.id, rep.worst_slack);
        }
    }

    #[test]
    fn zero_perturbation_gives_exact_sandwich() {
        // Lemma 3 with U = U*: σᵢ(U) = σᵢ(X*)^{1/2} exactly.
        let cfg = LemmaVerifyConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = sample_instance(&cfg, &mut rng).unwrap();
        let su = factor_singular_values(&inst.u_star).unwrap();
        assert!((su[0] - inst.sigma1.sqrt()).abs() < 1e-10);
        assert!((su[su.len() - 1] - inst.sigma_r.sqrt()).abs() < 1e-10);
    }
}
