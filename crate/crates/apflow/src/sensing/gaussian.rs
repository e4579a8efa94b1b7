//! Calibrated symmetric Gaussian ensemble.
//!
//! Each `A_i` is symmetric with independent upper-triangle entries: diagonal
//! variance `1/m`, off-diagonal variance `1/(2m)`, which gives
//! `E ⟨A_i, X⟩² = ‖X‖_F²/m` for symmetric `X` and hence
//! `E ‖A(X)‖² = ‖X‖_F²`.
//!
//! Rows are stored packed (upper triangle, n(n+1)/2 doubles) and the hot
//! paths stream over them in fixed blocks: per-element results never depend
//! on the parallel partition, so runs are bit-reproducible.

use super::mix_seed;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

const BLOCK_ROWS: usize = 64;

#[derive(Debug, Clone)]
pub struct GaussianOp {
    n: usize,
    m: usize,
    seed: u64,
    plen: usize,
    /// m × plen packed rows.
    rows: Vec<f64>,
}

impl GaussianOp {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Invalid("gaussian operator needs n, m >= 1".into()));
        }
        let plen = n * (n + 1) / 2;
        let diag_std = 1.0 / (m as f64).sqrt();
        let off_std = 1.0 / (2.0 * m as f64).sqrt();
        let mut rows = vec![0.0f64; m * plen];
        rows.par_chunks_mut(plen).enumerate().for_each(|(k, row)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, k as u64));
            let mut t = 0;
            for i in 0..n {
                for j in i..n {
                    let g: f64 = rng.sample(StandardNormal);
                    row[t] = g * if i == j { diag_std } else { off_std };
                    t += 1;
                }
            }
        });
        Ok(GaussianOp {
            n,
            m,
            seed,
            plen,
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Pack `Re(X + X^T)` into the upper triangle so a packed dot equals
    /// `Re ⟨A_i, X⟩` (the diagonal enters once, off-diagonals as the sum of
    /// both triangles).
    fn pack_input<T: Scalar>(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        let n = self.n;
        let mut xw = Vec::with_capacity(self.plen);
        for i in 0..n {
            xw.push(x.get(i, i).re());
            for j in (i + 1)..n {
                xw.push(x.get(i, j).re() + x.get(j, i).re());
            }
        }
        xw
    }

    fn unpack<T: Scalar>(&self, packed: &[f64]) -> DenseMatrix<T> {
        let n = self.n;
        let mut g = DenseMatrix::zeros(n, n);
        let mut t = 0;
        for i in 0..n {
            for j in i..n {
                let v = T::from_re(packed[t]);
                g.set(i, j, v);
                g.set(j, i, v);
                t += 1;
            }
        }
        g
    }

    pub fn apply<T: Scalar>(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        let xw = self.pack_input(x);
        let mut y = vec![0.0f64; self.m];
        y.par_chunks_mut(BLOCK_ROWS)
            .zip(self.rows.par_chunks(BLOCK_ROWS * self.plen))
            .for_each(|(out, rows)| {
                for (o, row) in out.iter_mut().zip(rows.chunks(self.plen)) {
                    *o = dot_unrolled(row, &xw);
                }
            });
        y
    }

    pub fn adjoint<T: Scalar>(&self, v: &[f64]) -> DenseMatrix<T> {
        let partials: Vec<Vec<f64>> = self
            .rows
            .par_chunks(BLOCK_ROWS * self.plen)
            .zip(v.par_chunks(BLOCK_ROWS))
            .map(|(rows, ws)| {
                let mut acc = vec![0.0f64; self.plen];
                for (row, &w) in rows.chunks(self.plen).zip(ws) {
                    axpy(w, row, &mut acc);
                }
                acc
            })
            .collect();
        let mut packed = vec![0.0f64; self.plen];
        for p in &partials {
            for (a, b) in packed.iter_mut().zip(p) {
                *a += *b;
            }
        }
        self.unpack(&packed)
    }

    /// Fused `A†(A(X) − y)`: one streaming pass over the ensemble, reading
    /// each packed row once for both the measurement and the accumulation.
    pub fn gradient<T: Scalar>(&self, x: &DenseMatrix<T>, y: &[f64]) -> DenseMatrix<T> {
        let xw = self.pack_input(x);
        let partials: Vec<Vec<f64>> = self
            .rows
            .par_chunks(BLOCK_ROWS * self.plen)
            .zip(y.par_chunks(BLOCK_ROWS))
            .map(|(rows, ys)| {
                let mut acc = vec![0.0f64; self.plen];
                for (row, &yk) in rows.chunks(self.plen).zip(ys) {
                    let w = dot_unrolled(row, &xw) - yk;
                    axpy(w, row, &mut acc);
                }
                acc
            })
            .collect();
        let mut packed = vec![0.0f64; self.plen];
        for p in &partials {
            for (a, b) in packed.iter_mut().zip(p) {
                *a += *b;
            }
        }
        self.unpack(&packed)
    }
}

/// Four-accumulator dot product: breaks the FMA latency chain while keeping
/// a fixed summation order.
fn dot_unrolled(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(w: f64, row: &[f64], acc: &mut [f64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a += w * r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_zero_measurements() {
        let op = GaussianOp::new(8, 20, 3).unwrap();
        let y = op.apply(&DenseMatrix::<f64>::zeros(8, 8));
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_across_constructions() {
        let a = GaussianOp::new(6, 11, 42).unwrap();
        let b = GaussianOp::new(6, 11, 42).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn fused_gradient_matches_two_pass() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let op = GaussianOp::new(10, 40, 5).unwrap();
        let x = DenseMatrix::<f64>::from_fn(10, 10, |_, _| f64::standard_normal(&mut rng));
        let x = x.hermitian_part();
        let y: Vec<f64> = (0..40).map(|_| f64::standard_normal(&mut rng)).collect();
        let fused = op.gradient(&x, &y);
        let mut w = op.apply(&x);
        for (wi, yi) in w.iter_mut().zip(&y) {
            *wi -= *yi;
        }
        let two_pass = op.adjoint::<f64>(&w);
        assert!(fused.sub(&two_pass).fro_norm() < 1e-13 * two_pass.fro_norm().max(1.0));
    }
}
