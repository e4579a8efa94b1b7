//! Pauli-observable ensemble: m distinct q-qubit Pauli strings sampled
//! uniformly without replacement (identity included), with the forward
//! scaling `(A(X))ᵢ = (2^q/√m)·Tr(Aᵢ·X)`.

use super::mix_seed;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::pauli::PauliString;
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct PauliOp {
    qubits: usize,
    m: usize,
    seed: u64,
    scale: f64,
    strings: Vec<PauliString>,
}

impl PauliOp {
    pub fn new(qubits: usize, m: usize, seed: u64) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::Invalid("pauli operator needs qubits >= 1".into()));
        }
        if qubits > 15 {
            return Err(Error::Invalid(
                "pauli sampling is limited to 15 qubits".into(),
            ));
        }
        let total = 4usize.pow(qubits as u32);
        if m == 0 || m > total {
            return Err(Error::Invalid(format!(
                "measurement count {} out of range 1..=4^{} = {}",
                m, qubits, total
            )));
        }
        // Partial Fisher-Yates: first m slots of a uniform permutation.
        let mut idx: Vec<u32> = (0..total as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x70_61_75_6c_69));
        for k in 0..m {
            let j = rng.random_range(k..total);
            idx.swap(k, j);
        }
        let strings = idx[..m]
            .iter()
            .map(|&i| PauliString::from_index(i as u64, qubits))
            .collect();
        let scale = (1u64 << qubits) as f64 / (m as f64).sqrt();
        Ok(PauliOp {
            qubits,
            m,
            seed,
            scale,
            strings,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn apply<T: Scalar>(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        self.strings
            .iter()
            .map(|p| self.scale * p.trace_with(x).re)
            .collect()
    }

    pub fn adjoint<T: Scalar>(&self, v: &[f64]) -> DenseMatrix<T> {
        let d = self.dim();
        let mut out = DenseMatrix::zeros(d, d);
        for (p, &w) in self.strings.iter().zip(v) {
            p.accumulate_scaled(self.scale * w, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn single_z_measurement() {
        // q=1, X = diag(1,0): with the only string forced to be Z the
        // measurement is (2/√1)·Tr(Z·X) = 2.
        let p = PauliString::parse("Z").unwrap();
        let mut x = DenseMatrix::<Complex64>::zeros(2, 2);
        x.set(0, 0, Complex64::new(1.0, 0.0));
        let tr = p.trace_with(&x);
        let scale = 2.0 / 1.0f64.sqrt();
        assert!((scale * tr.re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exhaustive_sampling_covers_all_strings() {
        let op = PauliOp::new(2, 16, 7).unwrap();
        let mut seen: Vec<String> = op.strings().iter().map(|s| s.to_string()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn m_exceeding_total_rejected() {
        assert!(PauliOp::new(1, 5, 0).is_err());
    }
}
