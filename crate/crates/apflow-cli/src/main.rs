//! `apflow` command line: run the synthetic/rectangular recovery studies,
//! the tomography study, the theory calculator and sweep, and the lemma
//! verification suite.
//!
//! Every subcommand accepts `--config <path>` (flat `key = value` file)
//! plus flag overrides; convergence failures are data rows, not process
//! failures, so the exit code is 0 iff all cells completed.

use apflow::harness::{
    format_theory_report, run_lemma_verify, run_qst, run_rect, run_synthetic, run_theory_sweep,
    ExperimentConfig, ExperimentKind, KvConfig,
};
use apflow::theory;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "apflow", about = "Low-rank matrix sensing via accelerated Procrustes flow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Comma-separated seed list (overrides the config).
    #[arg(long)]
    seeds: Option<String>,
    /// Worker-thread cap; 0 = default.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Synthetic (or rectangular) recovery experiment.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Problem dimension n.
        #[arg(long)]
        n: Option<usize>,
        /// Target rank r.
        #[arg(long)]
        r: Option<usize>,
        /// Measurement factor c (m = c·n·r).
        #[arg(long)]
        c: Option<usize>,
        /// Noise norm ‖w‖₂ added to the measurements.
        #[arg(long)]
        noise: Option<f64>,
        /// Operator kind: gaussian | fast_transform.
        #[arg(long)]
        operator: Option<String>,
        /// Methods: comma list of pf, apf, iht.
        #[arg(long)]
        methods: Option<String>,
        /// Momentum grid for apf: comma list of numbers or `theory`.
        #[arg(long)]
        mus: Option<String>,
        /// Initialization: spectral | random.
        #[arg(long)]
        init: Option<String>,
    },
    /// Quantum-state-tomography experiment.
    Qst {
        #[command(flatten)]
        common: CommonArgs,
        /// Qubit count.
        #[arg(long)]
        q: Option<usize>,
        /// Circuits: comma list of ghz, hadamard, random.
        #[arg(long)]
        circuits: Option<String>,
        /// Pauli measurement count (default ⌈0.6·4^q⌉).
        #[arg(long)]
        m: Option<usize>,
        /// Shots per observable (0 = exact expectations).
        #[arg(long)]
        shots: Option<u64>,
        /// Momentum grid: comma list of numbers or `theory`.
        #[arg(long)]
        mus: Option<String>,
    },
    /// Theory constants for one configuration, optionally a (τ, μ) sweep.
    Theory {
        #[command(flatten)]
        common: CommonArgs,
        /// RIP constant δ₂ᵣ (mutually exclusive with --kappa).
        #[arg(long)]
        delta: Option<f64>,
        /// Objective condition number κ.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma1: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_r: f64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Also emit the (τ, μ) → |λ₁| sweep grid into the output dir.
        #[arg(long)]
        sweep: bool,
    },
    /// Numerical verification of the supporting lemma chain.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Instances per lemma.
        #[arg(long)]
        trials: Option<usize>,
        /// Instance dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Instance rank.
        #[arg(long)]
        r: Option<usize>,
        /// Condition number of the sampled ground truth.
        #[arg(long)]
        tau: Option<f64>,
    },
}

fn load_config(common: &CommonArgs) -> apflow::Result<KvConfig> {
    let mut kv = match &common.config {
        Some(path) => KvConfig::load(path)?,
        None => KvConfig::default(),
    };
    if let Some(outdir) = &common.outdir {
        kv.set("outdir", outdir.display());
    }
    if let Some(seeds) = &common.seeds {
        kv.set("seeds", seeds);
    }
    if let Some(workers) = common.workers {
        kv.set("workers", workers);
    }
    Ok(kv)
}

fn set_opt(kv: &mut KvConfig, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        kv.set(key, v.to_string());
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> apflow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            common,
            n,
            r,
            c,
            noise,
            operator,
            methods,
            mus,
            init,
        } => {
            let mut kv = load_config(&common)?;
            set_opt(&mut kv, "n", n);
            set_opt(&mut kv, "r", r);
            set_opt(&mut kv, "c", c);
            set_opt(&mut kv, "noise", noise);
            set_opt(&mut kv, "operator", operator);
            set_opt(&mut kv, "methods", methods);
            set_opt(&mut kv, "mus", mus);
            set_opt(&mut kv, "init", init);
            let cfg = ExperimentConfig::from_kv(&kv)?;
            let summaries = match cfg.kind {
                ExperimentKind::Rect => run_rect(&cfg)?,
                _ => run_synthetic(&cfg)?,
            };
            println!("{}", apflow::harness::SUMMARY_HEADER);
            for s in &summaries {
                println!("{}", s.csv_row());
            }
            println!(
                "wrote {} cells to {}",
                summaries.len(),
                cfg.outdir.display()
            );
            Ok(())
        }
        Command::Qst {
            common,
            q,
            circuits,
            m,
            shots,
            mus,
        } => {
            let mut kv = load_config(&common)?;
            kv.set("experiment", "qst");
            set_opt(&mut kv, "q", q);
            set_opt(&mut kv, "circuits", circuits);
            set_opt(&mut kv, "m", m);
            set_opt(&mut kv, "shots", shots);
            set_opt(&mut kv, "qst_mus", mus);
            let cfg = ExperimentConfig::from_kv(&kv)?;
            let summaries = run_qst(&cfg)?;
            println!("{}", apflow::harness::QST_SUMMARY_HEADER);
            for s in &summaries {
                println!(
                    "{},{},{},{},{},{}",
                    s.circuit, s.q, s.m, s.mu, s.iters, s.fidelity
                );
            }
            println!(
                "wrote {} cells to {}",
                summaries.len(),
                cfg.outdir.display()
            );
            Ok(())
        }
        Command::Theory {
            common,
            delta,
            kappa,
            sigma1,
            sigma_r,
            rank,
            epsilon,
            sweep,
        } => {
            let delta = match (delta, kappa) {
                (Some(d), None) => d,
                (None, Some(k)) => theory::delta_of_kappa(k)?,
                (None, None) => 0.1,
                (Some(_), Some(_)) => {
                    return Err(apflow::Error::Config(
                        "pass either --delta or --kappa, not both".into(),
                    ))
                }
            };
            let rep = theory::constants(delta, sigma1, sigma_r, rank, epsilon)?;
            print!("{}", format_theory_report(&rep));
            if sweep {
                let mut kv = load_config(&common)?;
                kv.set("experiment", "theory-sweep");
                kv.set("kappa", rep.kappa);
                let cfg = ExperimentConfig::from_kv(&kv)?;
                let result = run_theory_sweep(&cfg)?;
                match result.threshold_tau {
                    Some(t) => println!("threshold    |lambda1| = 1 at tau = {t}"),
                    None => println!("threshold    no crossing in the tau range"),
                }
                println!("sweep grid written to {}", cfg.outdir.display());
            }
            Ok(())
        }
        Command::Verify {
            common,
            trials,
            n,
            r,
            tau,
        } => {
            let mut kv = load_config(&common)?;
            kv.set("experiment", "lemma-verify");
            set_opt(&mut kv, "trials", trials);
            set_opt(&mut kv, "lv_n", n);
            set_opt(&mut kv, "lv_r", r);
            set_opt(&mut kv, "lv_tau", tau);
            let cfg = ExperimentConfig::from_kv(&kv)?;
            let reports = run_lemma_verify(&cfg)?;
            let text = std::fs::read_to_string(cfg.outdir.join("lemma_report.txt"))?;
            print!("{text}");
            if reports.iter().any(|r| !r.pass) {
                return Err(apflow::Error::Invalid(
                    "lemma verification failed".into(),
                ));
            }
            Ok(())
        }
    }
}
