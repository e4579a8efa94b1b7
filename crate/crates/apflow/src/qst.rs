//! Quantum-state-tomography front end: synthetic pure states, shot-noise
//! simulation of Pauli correlation measurements, fidelity scoring, and the
//! end-to-end reconstruction pipeline over the complex field.

use crate::error::{Error, Result};
use crate::geometry::gram;
use crate::matrix::DenseMatrix;
use crate::pauli::PauliString;
use crate::scalar::Scalar;
use crate::sensing::{mix_seed, SensingOperator};
use crate::solver::{
    accelerated_pf, IterTrace, MomentumRule, SolverConfig, StepRule, Termination, TraceTargets,
};
use crate::{eig, theory};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Hermitian, PSD, unit-trace density matrix with a declared rank.
#[derive(Debug, Clone)]
pub struct DensityState {
    matrix: DenseMatrix<Complex64>,
    rank: usize,
}

impl DensityState {
    /// Validates trace 1 (1e-10), Hermitian (1e-12) and PSD (min eigenvalue
    /// ≥ −1e-10).
    pub fn new(matrix: DenseMatrix<Complex64>, rank: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invalid("density matrix must be square".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Invalid(format!(
                "density matrix trace {} is not 1",
                tr.re
            )));
        }
        if matrix.hermitian_deviation() > 1e-12 {
            return Err(Error::NotHermitian {
                deviation: matrix.hermitian_deviation(),
            });
        }
        let (values, _) = eig::eig_hermitian_dense(&matrix)?;
        if let Some(&min) = values.last() {
            if min < -1e-10 {
                return Err(Error::Invalid(format!(
                    "density matrix is not PSD (min eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(DensityState { matrix, rank })
    }

    pub fn matrix(&self) -> &DenseMatrix<Complex64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    fn from_state_vector(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let matrix = DenseMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        DensityState { matrix, rank: 1 }
    }
}

/// GHZ state `(|0…0⟩ + |1…1⟩)/√2` as a rank-1 density matrix.
pub fn ghz_state(qubits: usize) -> Result<DensityState> {
    if qubits == 0 {
        return Err(Error::Invalid("need at least one qubit".into()));
    }
    let n = 1usize << qubits;
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); n];
    psi[0] = a;
    psi[n - 1] = a;
    Ok(DensityState::from_state_vector(&psi))
}

/// Uniform superposition (Hadamard on every qubit) as a rank-1 density
/// matrix.
pub fn hadamard_state(qubits: usize) -> Result<DensityState> {
    if qubits == 0 {
        return Err(Error::Invalid("need at least one qubit".into()));
    }
    let n = 1usize << qubits;
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    Ok(DensityState::from_state_vector(&vec![a; n]))
}

/// Haar-like random pure state: normalized complex Gaussian vector.
pub fn random_pure_state(qubits: usize, seed: u64) -> Result<DensityState> {
    if qubits == 0 {
        return Err(Error::Invalid("need at least one qubit".into()));
    }
    let n = 1usize << qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi: Vec<Complex64> = (0..n).map(|_| Complex64::standard_normal(&mut rng)).collect();
    let nrm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in psi.iter_mut() {
        *z = z.scale(1.0 / nrm);
    }
    Ok(DensityState::from_state_vector(&psi))
}

/// Dense matrix of a Pauli string (re-export of the construction used by
/// the sensing ensemble).
pub fn pauli_matrix(s: &PauliString) -> DenseMatrix<Complex64> {
    s.matrix()
}

/// Simulated correlation measurements: per string, the expectation
/// `p = Tr(P·ρ) ∈ [−1, 1]` observed through `shots` two-outcome pulses,
/// returned as `2k/shots − 1` with `k ~ Binomial(shots, (1+p)/2)`.
/// `shots = 0` is the exact-expectation sentinel.
pub fn simulate_measurements(
    state: &DensityState,
    strings: &[PauliString],
    shots: u64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    strings
        .iter()
        .map(|p| {
            let exact = p.trace_with(state.matrix()).re.clamp(-1.0, 1.0);
            if shots == 0 {
                exact
            } else {
                let bin = Binomial::new(shots, (1.0 + exact) / 2.0).expect("valid probability");
                let k = bin.sample(&mut rng);
                2.0 * k as f64 / shots as f64 - 1.0
            }
        })
        .collect()
}

/// Uhlmann fidelity `Tr(√(√ρ₁ ρ₂ √ρ₁))²`.
///
/// Inputs are clamped-PSD first (eigenvalues in [−1e-8, 0) are zeroed and
/// the state renormalized; anything below −1e-8 is a validation error).
/// When `rho1` is declared pure the fast path `⟨ψ|ρ₂|ψ⟩` is used.
pub fn fidelity(rho1: &DensityState, rho2: &DensityState) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::Invalid("dimension mismatch".into()));
    }
    let m1 = clamp_psd(rho1.matrix())?;
    let m2 = clamp_psd(rho2.matrix())?;
    if rho1.rank() == 1 {
        // ψ = top eigenvector of ρ₁.
        let s = eig::top_r_eig(&m1, 1, 1e-10)?;
        let psi = s.top_vectors.col(0);
        let rho2_psi = m2.mul_vec(&psi);
        let mut f = Complex64::new(0.0, 0.0);
        for (a, b) in psi.iter().zip(&rho2_psi) {
            f += a.conj() * *b;
        }
        return Ok(f.re.clamp(0.0, 1.0 + 1e-8));
    }
    Ok(fidelity_full(&m1, &m2)?)
}

/// The full matrix-square-root formula, without the pure-state fast path.
pub fn fidelity_full(m1: &DenseMatrix<Complex64>, m2: &DenseMatrix<Complex64>) -> Result<f64> {
    let sqrt1 = matrix_sqrt_psd(m1)?;
    let inner = sqrt1.matmul(m2).matmul(&sqrt1).hermitian_part();
    let (values, _) = eig::eig_hermitian_dense(&inner)?;
    let tr: f64 = values.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0 + 1e-8))
}

fn clamp_psd(m: &DenseMatrix<Complex64>) -> Result<DenseMatrix<Complex64>> {
    let (values, vectors) = eig::eig_hermitian_dense(&m.hermitian_part())?;
    if let Some(&min) = values.last() {
        if min < -1e-8 {
            return Err(Error::Invalid(format!(
                "state is not PSD within tolerance (min eigenvalue {min:.3e})"
            )));
        }
    }
    let n = m.rows();
    let clamped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Invalid("state has zero trace after clamping".into()));
    }
    let mut out = DenseMatrix::zeros(n, n);
    for (k, &lam) in clamped.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let w = lam / total;
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + (vectors.get(i, k) * vectors.get(j, k).conj()).scale(w);
                out.set(i, j, v);
            }
        }
    }
    Ok(out.hermitian_part())
}

fn matrix_sqrt_psd(m: &DenseMatrix<Complex64>) -> Result<DenseMatrix<Complex64>> {
    let (values, vectors) = eig::eig_hermitian_dense(m)?;
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (k, &lam) in values.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + (vectors.get(i, k) * vectors.get(j, k).conj()).scale(s);
                out.set(i, j, v);
            }
        }
    }
    Ok(out.hermitian_part())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitKind {
    Ghz,
    Hadamard,
    Random,
}

impl CircuitKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(CircuitKind::Ghz),
            "hadamard" => Ok(CircuitKind::Hadamard),
            "random" => Ok(CircuitKind::Random),
            other => Err(Error::Parse(format!("unknown circuit `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Ghz => "ghz",
            CircuitKind::Hadamard => "hadamard",
            CircuitKind::Random => "random",
        }
    }

    pub fn build(self, qubits: usize, seed: u64) -> Result<DensityState> {
        match self {
            CircuitKind::Ghz => ghz_state(qubits),
            CircuitKind::Hadamard => hadamard_state(qubits),
            CircuitKind::Random => random_pure_state(qubits, seed),
        }
    }
}

/// Default stopping tolerance for tomography runs.
pub const QST_RELTOL: f64 = 5e-4;
/// Default iteration cap for tomography runs.
pub const QST_MAX_ITERS: usize = 1000;
/// Default shot count.
pub const QST_SHOTS: u64 = 8192;

#[derive(Debug, Clone)]
pub struct QstRun {
    pub qubits: usize,
    pub circuit: CircuitKind,
    pub m: usize,
    pub shots: u64,
    /// Momentum: `None` means the theory value (σ₁ = σ_r = 1, r = 1 for
    /// pure states).
    pub mu: Option<f64>,
    pub seed: u64,
    pub reltol: f64,
    pub max_iters: usize,
    pub record_trace: bool,
}

impl QstRun {
    pub fn new(qubits: usize, circuit: CircuitKind, m: usize, shots: u64, seed: u64) -> Self {
        QstRun {
            qubits,
            circuit,
            m,
            shots,
            mu: Some(0.75),
            seed,
            reltol: QST_RELTOL,
            max_iters: QST_MAX_ITERS,
            record_trace: true,
        }
    }

    /// Default measurement budget `⌈0.6·n²⌉` for n = 2^q.
    pub fn default_m(qubits: usize) -> usize {
        let n = 1usize << qubits;
        (0.6 * (n * n) as f64).ceil() as usize
    }
}

#[derive(Debug, Clone)]
pub struct QstOutcome {
    pub truth: DensityState,
    pub reconstruction: DensityState,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: IterTrace,
}

/// End-to-end tomography: build the state, sample the Pauli ensemble,
/// simulate correlations, scale into the solver's measurement convention,
/// reconstruct the rank-1 factor with the accelerated flow from a random
/// init, and score fidelity against the truth.
pub fn qst_pipeline(run: &QstRun) -> Result<QstOutcome> {
    let n = 1usize << run.qubits;
    let truth = run.circuit.build(run.qubits, mix_seed(run.seed, 1))?;
    let op = SensingOperator::<Complex64>::pauli(run.qubits, run.m, mix_seed(run.seed, 2))?;
    let strings: Vec<PauliString> = match &op {
        SensingOperator::Pauli(p) => p.strings().to_vec(),
        _ => unreachable!(),
    };
    let correlations = simulate_measurements(&truth, &strings, run.shots, mix_seed(run.seed, 3));
    // The solver consumes the scaled map (2^q/√m)·Tr(Aᵢ·X); scale the
    // simulated correlations to match.
    let scale = n as f64 / (run.m as f64).sqrt();
    let y: Vec<f64> = correlations.iter().map(|c| scale * c).collect();

    let momentum = match run.mu {
        Some(mu) => MomentumRule::Fixed(mu),
        None => MomentumRule::Theory {
            sigma1: 1.0,
            sigma_r: 1.0,
            epsilon: 1.0,
        },
    };
    let config = SolverConfig {
        rank: 1,
        momentum,
        step: StepRule::Auto,
        delta_estimate: 0.1,
        max_iters: run.max_iters,
        rel_change_tol: run.reltol,
        record_trace: run.record_trace,
        seed: run.seed,
    };
    let u0 = crate::solver::init_random::<Complex64>(n, 1, mix_seed(run.seed, 4));
    let result = accelerated_pf(&op, &y, &u0, &config, TraceTargets::default())?;

    let x = gram(&result.factor);
    let tr = x.trace().re;
    if tr <= 0.0 {
        return Err(Error::Degenerate("reconstruction has zero trace".into()));
    }
    let rho_hat = DensityState {
        matrix: x.scaled(1.0 / tr).hermitian_part(),
        rank: 1,
    };
    let fid = fidelity(&truth, &rho_hat)?;
    Ok(QstOutcome {
        truth,
        reconstruction: rho_hat,
        fidelity: fid,
        iterations: result.iterations,
        converged: result.termination == Termination::Tolerance,
        trace: result.trace,
    })
}

/// Theory momentum for the pure-state tomography setting
/// (σ₁ = σ_r = 1, τ = srank = 1, r = 1 by construction).
pub fn qst_theory_mu(delta: f64, epsilon: f64) -> Result<f64> {
    theory::mu_theory(delta, 1.0, 1.0, 1, epsilon)
}
