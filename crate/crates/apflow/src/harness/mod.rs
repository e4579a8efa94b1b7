//! Experiment orchestration: desk-scale reproductions of the synthetic
//! recovery study, the tomography study, the rate-threshold sweep, and the
//! lemma verification suite, all driven by a flat key=value config and
//! emitting CSV summaries plus per-cell trace files.

mod config;

pub use config::KvConfig;

use crate::error::{Error, Result};
use crate::geometry::gram;
use crate::lemmas::{verify_lemmas, LemmaReport, LemmaVerifyConfig};
use crate::matrix::{vec_norm, DenseMatrix};
use crate::qst::{CircuitKind, QstRun};
use crate::scalar::Scalar;
use crate::sensing::{mix_seed, LowpassParams, SensingOperator};
use crate::solver::{
    accelerated_pf, accelerated_pf_rect, iht_baseline, init_random, init_spectral, objective,
    procrustes_flow, MomentumRule, SolverConfig, StepRule, Termination, TraceTargets,
};
use crate::theory;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Synthetic,
    Qst,
    TheorySweep,
    LemmaVerify,
    Rect,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "synthetic" => Ok(ExperimentKind::Synthetic),
            "qst" => Ok(ExperimentKind::Qst),
            "theory-sweep" => Ok(ExperimentKind::TheorySweep),
            "lemma-verify" => Ok(ExperimentKind::LemmaVerify),
            "rect" => Ok(ExperimentKind::Rect),
            other => Err(Error::Config(format!("unknown experiment kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pf,
    Apf,
    Iht,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pf" => Ok(Method::Pf),
            "apf" => Ok(Method::Apf),
            "iht" => Ok(Method::Iht),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Pf => "pf",
            Method::Apf => "apf",
            Method::Iht => "iht",
        }
    }
}

/// Momentum entry in a config grid: a number or the theory value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuSpec {
    Fixed(f64),
    Theory,
}

impl MuSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "theory" {
            return Ok(MuSpec::Theory);
        }
        s.parse()
            .map(MuSpec::Fixed)
            .map_err(|_| Error::Config(format!("bad momentum `{s}`")))
    }

    pub fn label(&self) -> String {
        match self {
            MuSpec::Fixed(v) => format!("{v}"),
            MuSpec::Theory => "theory".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Random,
    Spectral,
}

impl InitKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitKind::Random),
            "spectral" => Ok(InitKind::Spectral),
            other => Err(Error::Config(format!("unknown init kind `{other}`"))),
        }
    }
}

/// Parsed experiment configuration. The measurement count is always
/// derived as `m = c·n·r` and never stored.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub outdir: PathBuf,
    pub seeds: Vec<u64>,
    pub workers: usize,

    // synthetic
    pub n: usize,
    pub r: usize,
    pub c: usize,
    pub noise: f64,
    pub operator: String,
    pub methods: Vec<Method>,
    pub mus: Vec<MuSpec>,
    pub init: InitKind,
    pub l_hat: f64,
    pub max_iters: usize,
    pub tol: f64,

    // qst
    pub q: usize,
    pub circuits: Vec<CircuitKind>,
    pub m_override: Option<usize>,
    pub shots: u64,
    pub qst_mus: Vec<MuSpec>,
    pub reltol: f64,
    pub qst_max_iters: usize,

    // theory sweep
    pub kappa: f64,
    pub sweep_mus: Vec<f64>,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub epsilon: f64,
    pub threshold_mu: f64,

    // lemma verify
    pub lemma: LemmaVerifyConfig,

    // rect
    pub rect_depths: usize,
    pub rect_time_len: usize,
    pub rect_r: usize,
    pub rect_taps: usize,
    pub rect_f_max: f64,
}

impl ExperimentConfig {
    pub fn from_kv(kv: &KvConfig) -> Result<Self> {
        let kind = ExperimentKind::parse(&kv.str_or("experiment", "synthetic"))?;
        let seeds: Vec<u64> = kv.parse_list("seeds", "1,2,3")?;
        if seeds.is_empty() {
            return Err(Error::Config("seeds list must be non-empty".into()));
        }
        let methods = kv
            .list("methods", "pf,apf")
            .iter()
            .map(|s| Method::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let mus = kv
            .list("mus", "0.6666666666666666")
            .iter()
            .map(|s| MuSpec::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let circuits = kv
            .list("circuits", "ghz")
            .iter()
            .map(|s| CircuitKind::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let qst_mus = kv
            .list("qst_mus", "theory,0.125,0.25,0.3333333333333333,0.75")
            .iter()
            .map(|s| MuSpec::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let m_override = match kv.parse_or("m", 0usize)? {
            0 => None,
            m => Some(m),
        };
        let lemma = LemmaVerifyConfig {
            n: kv.parse_or("lv_n", 16)?,
            r: kv.parse_or("lv_r", 2)?,
            tau: kv.parse_or("lv_tau", 5.0)?,
            radius: kv.parse_or("lv_radius", 1.0)?,
            trials: kv.parse_or("trials", 100)?,
            seed: *seeds.first().unwrap(),
        };
        Ok(ExperimentConfig {
            kind,
            outdir: PathBuf::from(kv.str_or("outdir", "out")),
            seeds,
            workers: kv.parse_or("workers", 0)?,
            n: kv.parse_or("n", 256)?,
            r: kv.parse_or("r", 5)?,
            c: kv.parse_or("c", 5)?,
            noise: kv.parse_or("noise", 0.0)?,
            operator: kv.str_or("operator", "gaussian"),
            methods,
            mus,
            init: InitKind::parse(&kv.str_or("init", "spectral"))?,
            l_hat: kv.parse_or("l_hat", 1.5)?,
            max_iters: kv.parse_or("max_iters", 4000)?,
            tol: kv.parse_or("tol", 1e-3)?,
            q: kv.parse_or("q", 4)?,
            circuits,
            m_override,
            shots: kv.parse_or("shots", 8192)?,
            qst_mus,
            reltol: kv.parse_or("reltol", 5e-4)?,
            qst_max_iters: kv.parse_or("qst_max_iters", 1000)?,
            kappa: kv.parse_or("kappa", 1.223)?,
            sweep_mus: kv.parse_list("sweep_mus", "0,0.001,0.25,0.6666666666666666")?,
            tau_min: kv.parse_or("tau_min", 1.0)?,
            tau_max: kv.parse_or("tau_max", 120.0)?,
            tau_steps: kv.parse_or("tau_steps", 120)?,
            epsilon: kv.parse_or("epsilon", 1.0)?,
            threshold_mu: kv.parse_or("threshold_mu", 1e-3)?,
            lemma,
            rect_depths: kv.parse_or("rect_depths", 24)?,
            rect_time_len: kv.parse_or("rect_time_len", 160)?,
            rect_r: kv.parse_or("rect_r", 3)?,
            rect_taps: kv.parse_or("rect_taps", 31)?,
            rect_f_max: kv.parse_or("rect_f_max", 0.8)?,
        })
    }

    pub fn measurement_count(&self) -> usize {
        self.c * self.n * self.r
    }
}

/// One solver cell's outcome; the summary CSV row.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub method: String,
    pub mu: f64,
    pub seed: u64,
    pub iters: usize,
    pub wall_ms: f64,
    pub final_rel_err: Option<f64>,
    pub final_objective: f64,
    pub converged: bool,
}

pub const SUMMARY_HEADER: &str = "method,mu,seed,iters,wall_ms,final_rel_err,final_objective,converged";

impl RunSummary {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method,
            self.mu,
            self.seed,
            self.iters,
            self.wall_ms,
            self.final_rel_err.map(|v| v.to_string()).unwrap_or_default(),
            self.final_objective,
            self.converged
        )
    }
}

fn prepare_outdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    // Probe writability before any compute.
    let probe = dir.join(".write_probe");
    std::fs::write(&probe, b"ok")?;
    std::fs::remove_file(&probe)?;
    Ok(())
}

fn with_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

fn write_lines(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for r in rows {
        writeln!(f, "{r}")?;
    }
    Ok(())
}

struct SyntheticInstance {
    u_star: DenseMatrix<f64>,
    x_star: DenseMatrix<f64>,
    sigma1: f64,
    sigma_r: f64,
    op: SensingOperator<f64>,
    y: Vec<f64>,
    u0: DenseMatrix<f64>,
}

fn build_synthetic_instance(cfg: &ExperimentConfig, seed: u64) -> Result<SyntheticInstance> {
    let n = cfg.n;
    let r = cfg.r;
    let m = cfg.measurement_count();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xa11ce));
    let raw = DenseMatrix::<f64>::from_fn(n, r, |_, _| f64::standard_normal(&mut rng));
    // ‖X*‖_F = 1 normalization carried on the factor.
    let norm = gram(&raw).fro_norm();
    let u_star = raw.scaled(1.0 / norm.sqrt());
    let x_star = gram(&u_star);
    let (sigma1, sigma_r) = theory::factor_spectrum(&u_star)?;

    let op = match cfg.operator.as_str() {
        "gaussian" => SensingOperator::<f64>::gaussian(n, m, mix_seed(seed, 0x0b))?,
        "fast_transform" => SensingOperator::<f64>::fast_transform(n, m, mix_seed(seed, 0x0b))?,
        other => return Err(Error::Config(format!("unknown operator kind `{other}`"))),
    };
    let mut y = op.apply(&x_star)?;
    if cfg.noise > 0.0 {
        let mut nrng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x0c));
        let mut w: Vec<f64> = (0..m).map(|_| f64::standard_normal(&mut nrng)).collect();
        let scale = cfg.noise / vec_norm(&w);
        for (yi, wi) in y.iter_mut().zip(&mut w) {
            *wi *= scale;
            *yi += *wi;
        }
    }
    let u0 = match cfg.init {
        InitKind::Spectral => init_spectral(&op, &y, r, cfg.l_hat)?,
        InitKind::Random => init_random(n, r, mix_seed(seed, 0x0d)),
    };
    Ok(SyntheticInstance {
        u_star,
        x_star,
        sigma1,
        sigma_r,
        op,
        y,
        u0,
    })
}

fn mu_value(spec: MuSpec, inst_sigma1: f64, inst_sigma_r: f64, r: usize, tol_delta: f64) -> Result<f64> {
    match spec {
        MuSpec::Fixed(v) => Ok(v),
        MuSpec::Theory => theory::mu_theory(tol_delta, inst_sigma1, inst_sigma_r, r, 1.0),
    }
}

/// Runs the synthetic study: one instance per seed, each (method, μ) cell
/// solved on it, one trace CSV per cell plus a summary CSV.
pub fn run_synthetic(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    prepare_outdir(&cfg.outdir)?;
    if cfg.seeds.is_empty() {
        return Err(Error::Config("seeds list must be non-empty".into()));
    }

    let mut summaries: Vec<RunSummary> = Vec::new();
    with_pool(cfg.workers, || -> Result<()> {
        for &seed in &cfg.seeds {
            let inst = build_synthetic_instance(cfg, seed)?;

            // cells in config order: methods × mus (μ ignored by pf/iht)
            let mut cells: Vec<(Method, MuSpec)> = Vec::new();
            for &method in &cfg.methods {
                match method {
                    Method::Apf => {
                        for &mu in &cfg.mus {
                            cells.push((method, mu));
                        }
                    }
                    _ => cells.push((method, MuSpec::Fixed(0.0))),
                }
            }

            let results: Vec<Result<RunSummary>> = cells
                .par_iter()
                .map(|&(method, mu_spec)| {
                    run_synthetic_cell(cfg, &inst, seed, method, mu_spec)
                })
                .collect();
            for r in results {
                summaries.push(r?);
            }
        }
        Ok(())
    })?;

    let rows: Vec<String> = summaries.iter().map(|s| s.csv_row()).collect();
    write_lines(&cfg.outdir.join("summary.csv"), SUMMARY_HEADER, &rows)?;
    Ok(summaries)
}

fn run_synthetic_cell(
    cfg: &ExperimentConfig,
    inst: &SyntheticInstance,
    seed: u64,
    method: Method,
    mu_spec: MuSpec,
) -> Result<RunSummary> {
    let mu = mu_value(mu_spec, inst.sigma1, inst.sigma_r, cfg.r, 0.1)?;
    let solver_cfg = SolverConfig {
        rank: cfg.r,
        momentum: MomentumRule::Fixed(mu),
        step: StepRule::Auto,
        delta_estimate: 0.1,
        max_iters: cfg.max_iters,
        rel_change_tol: cfg.tol,
        record_trace: true,
        seed,
    };
    let targets = TraceTargets {
        x_star: Some(&inst.x_star),
        u_star: Some(&inst.u_star),
        stop_at_rel_err: None,
    };
    let start = Instant::now();
    let result = match method {
        Method::Pf => procrustes_flow(&inst.op, &inst.y, &inst.u0, &solver_cfg, targets)?,
        Method::Apf => accelerated_pf(&inst.op, &inst.y, &inst.u0, &solver_cfg, targets)?,
        Method::Iht => iht_baseline(&inst.op, &inst.y, cfg.r, &solver_cfg, targets)?,
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let x_hat = match method {
        Method::Iht => gram(&result.factor),
        _ => gram(&result.factor),
    };
    let final_rel_err = x_hat.sub(&inst.x_star).fro_norm() / inst.x_star.fro_norm();
    let final_objective = objective(&inst.op, &inst.y, &x_hat)?;

    let mu_tag = match mu_spec {
        MuSpec::Theory => "theory".to_string(),
        MuSpec::Fixed(v) => format!("{v:.4}"),
    };
    let trace_path = cfg
        .outdir
        .join(format!("trace_{}_mu{}_seed{}.csv", method.name(), mu_tag, seed));
    result.trace.write_csv(&trace_path)?;

    Ok(RunSummary {
        method: method.name().to_string(),
        mu,
        seed,
        iters: result.iterations,
        wall_ms,
        final_rel_err: Some(final_rel_err),
        final_objective,
        converged: result.termination == Termination::Tolerance,
    })
}

/// One tomography cell's outcome.
#[derive(Debug, Clone)]
pub struct QstSummary {
    pub circuit: &'static str,
    pub q: usize,
    pub m: usize,
    pub mu_label: String,
    pub mu: f64,
    pub seed: u64,
    pub iters: usize,
    pub fidelity: f64,
    pub converged: bool,
}

pub const QST_SUMMARY_HEADER: &str = "circuit,q,m,mu,iters,fidelity";

/// Runs the tomography study over (circuit × μ × seed) cells; emits the
/// per-cell summary plus mean/σ aggregates per (circuit, μ) for
/// shaded-band plots.
pub fn run_qst(cfg: &ExperimentConfig) -> Result<Vec<QstSummary>> {
    prepare_outdir(&cfg.outdir)?;
    let m = cfg
        .m_override
        .unwrap_or_else(|| QstRun::default_m(cfg.q));

    let mut cells: Vec<(CircuitKind, MuSpec, u64)> = Vec::new();
    for &circuit in &cfg.circuits {
        for &mu in &cfg.qst_mus {
            for &seed in &cfg.seeds {
                cells.push((circuit, mu, seed));
            }
        }
    }

    let summaries: Vec<QstSummary> = with_pool(cfg.workers, || -> Result<Vec<QstSummary>> {
        let results: Vec<Result<QstSummary>> = cells
            .par_iter()
            .map(|&(circuit, mu_spec, seed)| {
                let mut run = QstRun::new(cfg.q, circuit, m, cfg.shots, seed);
                run.reltol = cfg.reltol;
                run.max_iters = cfg.qst_max_iters;
                run.mu = match mu_spec {
                    MuSpec::Fixed(v) => Some(v),
                    MuSpec::Theory => None,
                };
                let outcome = crate::qst::qst_pipeline(&run)?;
                let mu = match mu_spec {
                    MuSpec::Fixed(v) => v,
                    MuSpec::Theory => crate::qst::qst_theory_mu(0.1, 1.0)?,
                };
                let trace_path = cfg.outdir.join(format!(
                    "qst_trace_{}_mu{}_seed{}.csv",
                    circuit.name(),
                    mu_spec.label(),
                    seed
                ));
                outcome.trace.write_csv(&trace_path)?;
                Ok(QstSummary {
                    circuit: circuit.name(),
                    q: cfg.q,
                    m,
                    mu_label: mu_spec.label(),
                    mu,
                    seed,
                    iters: outcome.iterations,
                    fidelity: outcome.fidelity,
                    converged: outcome.converged,
                })
            })
            .collect();
        results.into_iter().collect()
    })?;

    let rows: Vec<String> = summaries
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{},{}",
                s.circuit, s.q, s.m, s.mu, s.iters, s.fidelity
            )
        })
        .collect();
    write_lines(&cfg.outdir.join("qst_summary.csv"), QST_SUMMARY_HEADER, &rows)?;

    // mean/σ aggregation per (circuit, μ) for shaded-band plots
    let mut agg_rows = Vec::new();
    for &circuit in &cfg.circuits {
        for mu_spec in &cfg.qst_mus {
            let group: Vec<&QstSummary> = summaries
                .iter()
                .filter(|s| s.circuit == circuit.name() && s.mu_label == mu_spec.label())
                .collect();
            if group.is_empty() {
                continue;
            }
            let stats = |vals: Vec<f64>| {
                let n = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / n;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                (mean, var.sqrt())
            };
            let (fid_mean, fid_std) = stats(group.iter().map(|s| s.fidelity).collect());
            let (it_mean, it_std) = stats(group.iter().map(|s| s.iters as f64).collect());
            agg_rows.push(format!(
                "{},{},{},{},{},{},{}",
                circuit.name(),
                mu_spec.label(),
                fid_mean,
                fid_std,
                it_mean,
                it_std,
                group.len()
            ));
        }
    }
    write_lines(
        &cfg.outdir.join("qst_aggregate.csv"),
        "circuit,mu,mean_fidelity,std_fidelity,mean_iters,std_iters,runs",
        &agg_rows,
    )?;
    Ok(summaries)
}

#[derive(Debug, Clone)]
pub struct TheorySweepResult {
    /// (τ, μ, |λ₁|) grid in row-major order.
    pub grid: Vec<(f64, f64, f64)>,
    /// τ at which |λ₁| crosses 1 at `threshold_mu`, if inside the range.
    pub threshold_tau: Option<f64>,
}

/// Sweeps |λ₁| over a (τ, μ) grid and locates the |λ₁| = 1 threshold;
/// emits matrix-form CSV plus per-μ two-column plot data.
pub fn run_theory_sweep(cfg: &ExperimentConfig) -> Result<TheorySweepResult> {
    prepare_outdir(&cfg.outdir)?;
    if cfg.tau_steps < 2 || cfg.tau_max <= cfg.tau_min || cfg.tau_min < 1.0 {
        return Err(Error::Config("bad tau grid".into()));
    }
    let taus: Vec<f64> = (0..cfg.tau_steps)
        .map(|i| cfg.tau_min + (cfg.tau_max - cfg.tau_min) * i as f64 / (cfg.tau_steps - 1) as f64)
        .collect();

    let mut grid = Vec::new();
    let mut matrix_rows = Vec::new();
    for &tau in &taus {
        let xi = theory::xi_of(cfg.kappa, tau);
        let mut row = vec![format!("{tau}")];
        for &mu in &cfg.sweep_mus {
            let (l1, _) = theory::contraction_eigs(xi, mu)?;
            grid.push((tau, mu, l1.abs()));
            row.push(format!("{}", l1.abs()));
        }
        matrix_rows.push(row.join(","));
    }
    let header = std::iter::once("tau".to_string())
        .chain(cfg.sweep_mus.iter().map(|m| format!("mu_{m}")))
        .collect::<Vec<_>>()
        .join(",");
    write_lines(&cfg.outdir.join("theory_grid.csv"), &header, &matrix_rows)?;

    for &mu in &cfg.sweep_mus {
        let rows: Vec<String> = grid
            .iter()
            .filter(|(_, m, _)| *m == mu)
            .map(|(t, _, l)| format!("{t} {l}"))
            .collect();
        let path = cfg.outdir.join(format!("lambda1_vs_tau_mu{mu}.dat"));
        write_lines(&path, &format!("# tau |lambda1|  (kappa = {})", cfg.kappa), &rows)?;
    }

    let threshold_tau = theory::tau_threshold(cfg.kappa, cfg.threshold_mu, cfg.tau_min, cfg.tau_max);
    let mut f = std::io::BufWriter::new(std::fs::File::create(cfg.outdir.join("threshold.txt"))?);
    match threshold_tau {
        Some(t) => writeln!(
            f,
            "|lambda1| = 1 crossing: tau = {t} (kappa = {}, mu = {})",
            cfg.kappa, cfg.threshold_mu
        )?,
        None => writeln!(
            f,
            "no |lambda1| = 1 crossing in tau range [{}, {}] (kappa = {}, mu = {})",
            cfg.tau_min, cfg.tau_max, cfg.kappa, cfg.threshold_mu
        )?,
    }
    Ok(TheorySweepResult {
        grid,
        threshold_tau,
    })
}

/// Runs the lemma suite and renders a text table plus a CSV.
pub fn run_lemma_verify(cfg: &ExperimentConfig) -> Result<Vec<LemmaReport>> {
    prepare_outdir(&cfg.outdir)?;
    let reports = with_pool(cfg.workers, || verify_lemmas(&cfg.lemma))?;

    let mut text = String::new();
    text.push_str(&format!(
        "{:<32} {:>10} {:>14}  {}\n",
        "lemma", "instances", "worst_slack", "pass"
    ));
    for rep in &reports {
        text.push_str(&format!(
            "{:<32} {:>10} {:>14.3e}  {}\n",
            rep.id,
            rep.instances,
            rep.worst_slack,
            if rep.pass { "pass" } else { "FAIL" }
        ));
        for (name, value) in &rep.observed {
            text.push_str(&format!("    {name} = {value}\n"));
        }
    }
    std::fs::write(cfg.outdir.join("lemma_report.txt"), &text)?;

    let rows: Vec<String> = reports
        .iter()
        .map(|r| format!("{},{},{},{}", r.id, r.instances, r.worst_slack, r.pass))
        .collect();
    write_lines(
        &cfg.outdir.join("lemma_report.csv"),
        "lemma,instances,worst_slack,pass",
        &rows,
    )?;
    Ok(reports)
}

/// Rectangular recovery study on the lowpass/attenuation operator.
pub fn run_rect(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    prepare_outdir(&cfg.outdir)?;
    let n = cfg.rect_depths;
    let tlen = cfg.rect_time_len;
    let r = cfg.rect_r;
    let depths: Vec<f64> = (0..n).map(|i| 1.0 + 20.0 * i as f64 / (n.max(2) - 1) as f64).collect();
    let params = LowpassParams {
        depths,
        f_max: cfg.rect_f_max,
        delta1: 1.0,
        delta2: 0.25,
        h: 10.0,
        time_len: tlen,
        filter_taps: cfg.rect_taps,
    };
    let op = SensingOperator::<f64>::lowpass_attenuation(params)?;

    let mut summaries = Vec::new();
    for &seed in &cfg.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x7ec7));
        let u_raw = DenseMatrix::<f64>::from_fn(n, r, |_, _| f64::standard_normal(&mut rng));
        let v_raw = DenseMatrix::<f64>::from_fn(tlen, r, |_, _| f64::standard_normal(&mut rng));
        let x_raw = crate::geometry::outer(&u_raw, &v_raw);
        let nrm = x_raw.fro_norm();
        let u_star = u_raw.scaled(1.0 / nrm.sqrt());
        let v_star = v_raw.scaled(1.0 / nrm.sqrt());
        let x_star = crate::geometry::outer(&u_star, &v_star);
        let y = op.apply(&x_star)?;

        for &mu_spec in &cfg.mus {
            let mu = match mu_spec {
                MuSpec::Fixed(v) => v,
                MuSpec::Theory => theory::mu_theory(0.1, 1.0, 1.0, r, 1.0)?,
            };
            let solver_cfg = SolverConfig {
                rank: r,
                momentum: MomentumRule::Fixed(mu),
                step: StepRule::Auto,
                delta_estimate: 0.1,
                max_iters: cfg.max_iters,
                rel_change_tol: cfg.tol,
                record_trace: true,
                seed,
            };
            let u0 = init_random::<f64>(n, r, mix_seed(seed, 0x11));
            let v0 = init_random::<f64>(tlen, r, mix_seed(seed, 0x12));
            let targets = TraceTargets {
                x_star: Some(&x_star),
                u_star: None,
                stop_at_rel_err: None,
            };
            let start = Instant::now();
            let result = accelerated_pf_rect(&op, &y, &u0, &v0, &solver_cfg, targets)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let x_hat = crate::geometry::outer(
                &result.factor,
                result.second_factor.as_ref().expect("rect factor"),
            );
            let trace_path = cfg
                .outdir
                .join(format!("trace_rect_mu{}_seed{}.csv", mu_spec.label(), seed));
            result.trace.write_csv(&trace_path)?;
            summaries.push(RunSummary {
                method: "apf_rect".to_string(),
                mu,
                seed,
                iters: result.iterations,
                wall_ms,
                final_rel_err: Some(x_hat.sub(&x_star).fro_norm() / x_star.fro_norm()),
                final_objective: objective(&op, &y, &x_hat)?,
                converged: result.termination == Termination::Tolerance,
            });
        }
    }
    let rows: Vec<String> = summaries.iter().map(|s| s.csv_row()).collect();
    write_lines(&cfg.outdir.join("summary.csv"), SUMMARY_HEADER, &rows)?;
    Ok(summaries)
}

/// Pretty key-value rendering of a theory report for the CLI.
pub fn format_theory_report(rep: &theory::TheoryReport) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| s.push_str(&format!("{k:<14} {v}\n"));
    kv("delta", format!("{}", rep.delta));
    kv("kappa", format!("{}", rep.kappa));
    kv("tau", format!("{}", rep.tau));
    kv("xi", format!("{}", rep.xi));
    kv("mu_theory", format!("{:e}", rep.mu_theory));
    kv("epsilon", format!("{}", rep.epsilon));
    kv("lambda1", format!("{}", rep.lambda1));
    kv("lambda2", format!("{}", rep.lambda2));
    kv("alpha", format!("{}", rep.alpha));
    kv("basin_radius", format!("{:e}", rep.basin_radius));
    kv("o_mu_term", format!("{:e}", rep.o_mu_term));
    kv("converges", format!("{}", rep.converges));
    s
}
