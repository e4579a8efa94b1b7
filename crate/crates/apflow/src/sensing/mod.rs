//! Linear sensing maps `A : matrices → R^m` with adjoints, and an empirical
//! restricted-isometry probe.
//!
//! Measurements are real: the forward map returns the real part of the
//! underlying linear functional, and `adjoint` consumes real vectors. With
//! the real inner product `⟨X, Y⟩ = Re tr(X^H Y)` the adjoint identity
//! `⟨A(X), v⟩ = ⟨X, A†(v)⟩` holds for every kind, Hermitian input or not.

mod dense;
mod gaussian;
mod lowpass;
mod pauli_op;
mod transform;

pub use dense::DenseOp;
pub use gaussian::GaussianOp;
pub use lowpass::{LowpassOp, LowpassParams};
pub use pauli_op::PauliOp;
pub use transform::FastTransformOp;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A sensing operator; immutable after construction, safe to share across
/// threads.
#[derive(Debug, Clone)]
pub enum SensingOperator<T: Scalar> {
    Gaussian(GaussianOp),
    Pauli(PauliOp),
    FastTransform(FastTransformOp),
    Dense(DenseOp<T>),
    Lowpass(LowpassOp),
}

impl<T: Scalar> SensingOperator<T> {
    /// Calibrated symmetric Gaussian ensemble on n×n matrices:
    /// `E ‖A(X)‖² = ‖X‖_F²` for symmetric X.
    pub fn gaussian(n: usize, m: usize, seed: u64) -> Result<Self> {
        Ok(SensingOperator::Gaussian(GaussianOp::new(n, m, seed)?))
    }

    /// m distinct Pauli observables on q qubits with the `2^q/√m` scaling.
    pub fn pauli(qubits: usize, m: usize, seed: u64) -> Result<Self> {
        Ok(SensingOperator::Pauli(PauliOp::new(qubits, m, seed)?))
    }

    /// Subsampled randomized orthonormal transform on vec(X) (sign flip,
    /// fast Walsh–Hadamard transform, uniform row subsampling).
    pub fn fast_transform(n: usize, m: usize, seed: u64) -> Result<Self> {
        Ok(SensingOperator::FastTransform(FastTransformOp::new(
            n, n, m, seed,
        )?))
    }

    /// Explicit matrix acting on the row-major vectorization of the domain.
    pub fn dense(matrix: DenseMatrix<T>, domain: (usize, usize)) -> Result<Self> {
        Ok(SensingOperator::Dense(DenseOp::new(matrix, domain)?))
    }

    /// Depth-dependent FIR lowpass + attenuation summation operator on
    /// n×time_len signal matrices.
    pub fn lowpass_attenuation(params: LowpassParams) -> Result<Self> {
        Ok(SensingOperator::Lowpass(LowpassOp::new(params)?))
    }

    /// Identity observation of every entry (`A(X) = vec(X)`); the δ = 0
    /// reference operator used by the verification suites.
    pub fn full_observation(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        SensingOperator::Dense(DenseOp::new(DenseMatrix::identity(n), (rows, cols)).unwrap())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SensingOperator::Gaussian(_) => "gaussian",
            SensingOperator::Pauli(_) => "pauli",
            SensingOperator::FastTransform(_) => "fast_transform",
            SensingOperator::Dense(_) => "dense",
            SensingOperator::Lowpass(_) => "lowpass_attenuation",
        }
    }

    /// Shape (rows, cols) of the matrix domain.
    pub fn domain_shape(&self) -> (usize, usize) {
        match self {
            SensingOperator::Gaussian(g) => (g.n(), g.n()),
            SensingOperator::Pauli(p) => (p.dim(), p.dim()),
            SensingOperator::FastTransform(t) => t.domain_shape(),
            SensingOperator::Dense(d) => d.domain_shape(),
            SensingOperator::Lowpass(l) => l.domain_shape(),
        }
    }

    pub fn measurements(&self) -> usize {
        match self {
            SensingOperator::Gaussian(g) => g.m(),
            SensingOperator::Pauli(p) => p.m(),
            SensingOperator::FastTransform(t) => t.m(),
            SensingOperator::Dense(d) => d.m(),
            SensingOperator::Lowpass(l) => l.m(),
        }
    }

    /// Whether `adjoint` provably returns Hermitian matrices (symmetric
    /// ensembles); when false the solver symmetrizes the gradient.
    pub fn selfadjoint_output(&self) -> bool {
        matches!(
            self,
            SensingOperator::Gaussian(_) | SensingOperator::Pauli(_)
        )
    }

    fn check_domain(&self, x: &DenseMatrix<T>) -> Result<()> {
        if x.shape() != self.domain_shape() {
            return Err(Error::Invalid(format!(
                "operator domain {:?} does not accept a {:?} matrix",
                self.domain_shape(),
                x.shape()
            )));
        }
        Ok(())
    }

    /// Forward measurement `A(X)`.
    pub fn apply(&self, x: &DenseMatrix<T>) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        Ok(match self {
            SensingOperator::Gaussian(g) => g.apply(x),
            SensingOperator::Pauli(p) => p.apply(x),
            SensingOperator::FastTransform(t) => t.apply(x),
            SensingOperator::Dense(d) => d.apply(x),
            SensingOperator::Lowpass(l) => l.apply(x),
        })
    }

    /// Adjoint `A†(v) = Σ vᵢ Aᵢ` (reshaped for the structured kinds).
    pub fn adjoint(&self, v: &[f64]) -> Result<DenseMatrix<T>> {
        if v.len() != self.measurements() {
            return Err(Error::Invalid(format!(
                "adjoint input length {} != m = {}",
                v.len(),
                self.measurements()
            )));
        }
        Ok(match self {
            SensingOperator::Gaussian(g) => g.adjoint(v),
            SensingOperator::Pauli(p) => p.adjoint(v),
            SensingOperator::FastTransform(t) => t.adjoint(v),
            SensingOperator::Dense(d) => d.adjoint(v),
            SensingOperator::Lowpass(l) => l.adjoint(v),
        })
    }

    /// `A†(A(X) − y)`, the residual gradient matrix; fused single-pass for
    /// the Gaussian ensemble, forward-then-adjoint otherwise.
    pub fn gradient(&self, x: &DenseMatrix<T>, y: &[f64]) -> Result<DenseMatrix<T>> {
        self.check_domain(x)?;
        if y.len() != self.measurements() {
            return Err(Error::Invalid(format!(
                "measurement length {} != m = {}",
                y.len(),
                self.measurements()
            )));
        }
        if let SensingOperator::Gaussian(g) = self {
            return Ok(g.gradient(x, y));
        }
        let mut w = self.apply(x)?;
        for (wi, yi) in w.iter_mut().zip(y) {
            *wi -= *yi;
        }
        self.adjoint(&w)
    }

    /// Residual `A(X) − y`.
    pub fn residual(&self, x: &DenseMatrix<T>, y: &[f64]) -> Result<Vec<f64>> {
        let mut w = self.apply(x)?;
        for (wi, yi) in w.iter_mut().zip(y) {
            *wi -= *yi;
        }
        Ok(w)
    }
}

/// Empirical restricted-isometry estimate over random rank-r probes.
#[derive(Debug, Clone)]
pub struct RipEstimate {
    pub r: usize,
    pub delta_hat: f64,
    pub trials: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

/// Probes `‖A(X)‖² / ‖X‖_F²` on random unit-Frobenius rank-r matrices:
/// Hermitian with random eigenvalue signs on square domains, plain
/// two-factor products on rectangular ones.
pub fn rip_probe<T: Scalar>(
    op: &SensingOperator<T>,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<RipEstimate> {
    if trials == 0 {
        return Err(Error::Invalid("rip_probe needs trials >= 1".into()));
    }
    let (rows, cols) = op.domain_shape();
    if r == 0 || r > rows.min(cols) {
        return Err(Error::Invalid(format!(
            "probe rank {} out of range for domain {:?}",
            r,
            (rows, cols)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for _ in 0..trials {
        let x = random_rank_r(rows, cols, r, &mut rng);
        let y = op.apply(&x)?;
        let ratio = y.iter().map(|v| v * v).sum::<f64>();
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
    }
    let delta_hat = (1.0 - ratio_min).max(ratio_max - 1.0);
    Ok(RipEstimate {
        r,
        delta_hat,
        trials,
        ratio_min,
        ratio_max,
    })
}

/// Unit-Frobenius random rank-r matrix in the given domain.
pub fn random_rank_r<T: Scalar>(
    rows: usize,
    cols: usize,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> DenseMatrix<T> {
    use rand::Rng;
    let x = if rows == cols {
        // Hermitian with random eigenvalue signs: Σ ± g gᴴ.
        let mut acc = DenseMatrix::<T>::zeros(rows, cols);
        for _ in 0..r {
            let g: Vec<T> = (0..rows).map(|_| T::standard_normal(rng)).collect();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for i in 0..rows {
                for j in 0..cols {
                    let v = acc.get(i, j) + (g[i] * g[j].conj()).scale(sign);
                    acc.set(i, j, v);
                }
            }
        }
        acc
    } else {
        let g1 = DenseMatrix::<T>::from_fn(rows, r, |_, _| T::standard_normal(rng));
        let g2 = DenseMatrix::<T>::from_fn(cols, r, |_, _| T::standard_normal(rng));
        g1.matmul(&g2.conj_transpose())
    };
    let nrm = x.fro_norm();
    x.scaled(1.0 / nrm.max(1e-300))
}

/// Sub-seed derivation (splitmix64 over a mixed key).
pub(crate) fn mix_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
