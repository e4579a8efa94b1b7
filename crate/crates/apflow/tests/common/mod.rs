//! Shared oracles and generators for the integration tests. Everything in
//! here stays independent of the iterative code paths it is used to check:
//! dense decompositions come from the Jacobi routine (self-certified by
//! reconstruction), randomness is seeded, and derivatives come from central
//! differences.

#![allow(dead_code)]

use apflow::eig::eig_hermitian_dense;
use apflow::matrix::DenseMatrix;
use apflow::scalar::Scalar;
use apflow::svd::orthonormal_columns;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn<T: Scalar>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| T::standard_normal(rng))
}

pub fn random_hermitian<T: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<T> {
    let a = randn::<T>(n, n, rng);
    a.hermitian_part()
}

/// Haar-ish random orthogonal/unitary r×r matrix (Gram-Schmidt of a
/// Gaussian square matrix; covers reflections).
pub fn random_orthogonal<T: Scalar>(r: usize, rng: &mut ChaCha8Rng) -> DenseMatrix<T> {
    loop {
        let g = randn::<T>(r, r, rng);
        let q = orthonormal_columns(&g);
        if q.cols() == r {
            return q;
        }
    }
}

/// Dense-decomposition oracle: all eigenvalues (descending) of a Hermitian
/// matrix, via the Jacobi path.
pub fn eig_oracle<T: Scalar>(m: &DenseMatrix<T>) -> (Vec<f64>, DenseMatrix<T>) {
    eig_hermitian_dense(m).expect("oracle eigensolve")
}

/// Dense SVD-value oracle: singular values of any matrix via the Jacobi
/// eigensolve of M^H M.
pub fn singular_values_oracle<T: Scalar>(m: &DenseMatrix<T>) -> Vec<f64> {
    let gram = m.conj_transpose().matmul(m);
    let (vals, _) = eig_oracle(&gram.hermitian_part());
    vals.into_iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Oracle rank-r truncation of the PSD part of a Hermitian matrix.
pub fn psd_truncation_oracle<T: Scalar>(m: &DenseMatrix<T>, r: usize) -> DenseMatrix<T> {
    let (vals, vecs) = eig_oracle(m);
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().take(r).enumerate() {
        let w = lam.max(0.0);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + (vecs.get(i, k) * vecs.get(j, k).conj()).scale(w);
                out.set(i, j, v);
            }
        }
    }
    out
}

/// Central finite difference of a scalar function along a direction.
pub fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
