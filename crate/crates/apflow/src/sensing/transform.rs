//! Subsampled randomized orthonormal transform: random sign flip, fast
//! Walsh–Hadamard transform, uniform row subsampling without replacement,
//! scaled by `√(N/m)` so the full-sampling operator is an exact isometry
//! and `E ‖A(X)‖² = ‖X‖_F²` under subsampling.

use super::mix_seed;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct FastTransformOp {
    rows: usize,
    cols: usize,
    m: usize,
    seed: u64,
    /// Padded transform length (power of two ≥ rows·cols).
    len: usize,
    signs: Vec<f64>,
    selected: Vec<usize>,
    scale: f64,
}

impl FastTransformOp {
    pub fn new(rows: usize, cols: usize, m: usize, seed: u64) -> Result<Self> {
        let n0 = rows * cols;
        if n0 == 0 {
            return Err(Error::Invalid("empty transform domain".into()));
        }
        if m == 0 || m > n0 {
            return Err(Error::Invalid(format!(
                "measurement count {} out of range 1..={}",
                m, n0
            )));
        }
        let len = n0.next_power_of_two();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x66_77_68_74));
        let signs: Vec<f64> = (0..len)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let mut idx: Vec<usize> = (0..len).collect();
        for k in 0..m {
            let j = rng.random_range(k..len);
            idx.swap(k, j);
        }
        let selected = idx[..m].to_vec();
        let scale = (len as f64 / m as f64).sqrt();
        let op = FastTransformOp {
            rows,
            cols,
            m,
            seed,
            len,
            signs,
            selected,
            scale,
        };
        debug_assert!(op.orthonormality_spot_check());
        Ok(op)
    }

    /// The underlying full transform maps unit basis vectors to unit-norm
    /// outputs; checked on a couple of basis vectors at construction in
    /// debug builds.
    fn orthonormality_spot_check(&self) -> bool {
        for b in [0usize, self.len / 2] {
            let mut buf = vec![0.0f64; self.len];
            buf[b] = self.signs[b];
            fwht(&mut buf);
            let inv = 1.0 / (self.len as f64).sqrt();
            let nrm: f64 = buf.iter().map(|x| (x * inv) * (x * inv)).sum();
            if (nrm - 1.0).abs() > 1e-10 {
                return false;
            }
        }
        true
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn apply<T: Scalar>(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        let mut buf = vec![T::zero(); self.len];
        for (b, (v, s)) in buf.iter_mut().zip(x.data().iter().zip(&self.signs)) {
            *b = v.scale(*s);
        }
        fwht(&mut buf);
        let inv = 1.0 / (self.len as f64).sqrt();
        self.selected
            .iter()
            .map(|&k| buf[k].re() * inv * self.scale)
            .collect()
    }

    pub fn adjoint<T: Scalar>(&self, v: &[f64]) -> DenseMatrix<T> {
        let mut buf = vec![T::zero(); self.len];
        let inv = 1.0 / (self.len as f64).sqrt();
        for (&k, &vi) in self.selected.iter().zip(v) {
            buf[k] = T::from_re(vi * self.scale * inv);
        }
        fwht(&mut buf);
        let n0 = self.rows * self.cols;
        let data: Vec<T> = buf[..n0]
            .iter()
            .zip(&self.signs)
            .map(|(x, s)| x.scale(*s))
            .collect();
        DenseMatrix::new(self.rows, self.cols, data).unwrap()
    }
}

/// In-place unnormalized fast Walsh–Hadamard transform; length must be a
/// power of two.
pub fn fwht<T: Scalar>(buf: &mut [T]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = buf[j];
                let b = buf[j + h];
                buf[j] = a + b;
                buf[j + h] = a - b;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}
