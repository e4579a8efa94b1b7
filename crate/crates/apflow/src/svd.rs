//! One-sided Jacobi SVD for tall-or-square matrices with few columns.
//! Used for the r×r Procrustes cross matrices and for singular values of
//! n×r factors; not meant for wide or large matrices.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// n×r, orthonormal columns (completed arbitrarily where σ = 0).
    pub u: DenseMatrix<T>,
    /// Singular values, non-increasing.
    pub sigma: Vec<f64>,
    /// r×r unitary; `A = U diag(sigma) V^H`.
    pub v: DenseMatrix<T>,
}

/// Thin SVD of an n×r matrix with r ≤ n.
pub fn thin_svd<T: Scalar>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    let (n, r) = a.shape();
    if r > n {
        return Err(Error::Invalid(format!(
            "thin_svd expects rows >= cols, got {}x{}",
            n, r
        )));
    }
    let mut cols: Vec<Vec<T>> = (0..r).map(|j| a.col(j)).collect();
    let mut v = DenseMatrix::<T>::identity(r);
    let scale = a.fro_norm();
    if scale == 0.0 {
        let mut u = DenseMatrix::zeros(n, r);
        for k in 0..r {
            u.set(k, k, T::one());
        }
        return Ok(Svd {
            u,
            sigma: vec![0.0; r],
            v,
        });
    }
    let eps = 1e-15;

    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..r {
            for j in (i + 1)..r {
                let alpha: f64 = cols[i].iter().map(|x| x.abs_sq()).sum();
                let beta: f64 = cols[j].iter().map(|x| x.abs_sq()).sum();
                let mut gamma = T::zero();
                for (x, y) in cols[i].iter().zip(&cols[j]) {
                    gamma += x.conj() * *y;
                }
                let g = gamma.abs();
                if g <= eps * (alpha * beta).sqrt() + 1e-300 {
                    continue;
                }
                rotated = true;
                // Strip the phase of γ, then a real Jacobi rotation
                // orthogonalizes the pair.
                let phase_conj = gamma.conj().scale(1.0 / g);
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let ai = cols[i][k];
                    let aj = cols[j][k] * phase_conj;
                    cols[i][k] = ai.scale(c) - aj.scale(s);
                    cols[j][k] = ai.scale(s) + aj.scale(c);
                }
                for k in 0..r {
                    let vi = v.get(k, i);
                    let vj = v.get(k, j) * phase_conj;
                    v.set(k, i, vi.scale(c) - vj.scale(s));
                    v.set(k, j, vi.scale(s) + vj.scale(c));
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt())
        .collect();

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());
    let cols: Vec<Vec<T>> = order.iter().map(|&k| cols[k].clone()).collect();
    let v_cols: Vec<Vec<T>> = order.iter().map(|&k| v.col(k)).collect();
    sigma = order.iter().map(|&k| sigma[k]).collect();
    let mut v_sorted = DenseMatrix::zeros(r, r);
    for (k, c) in v_cols.iter().enumerate() {
        v_sorted.set_col(k, c);
    }

    let mut u = DenseMatrix::zeros(n, r);
    let sig_max = sigma[0];
    let mut placed: Vec<Vec<T>> = Vec::with_capacity(r);
    for k in 0..r {
        if sigma[k] > 1e-14 * sig_max.max(1e-300) {
            let col: Vec<T> = cols[k].iter().map(|x| x.scale(1.0 / sigma[k])).collect();
            u.set_col(k, &col);
            placed.push(col);
        } else {
            sigma[k] = 0.0;
            // Null singular value: complete with any unit vector orthogonal
            // to the columns placed so far.
            let col = complete_column(n, &placed);
            u.set_col(k, &col);
            placed.push(col);
        }
    }

    Ok(Svd {
        u,
        sigma,
        v: v_sorted,
    })
}

fn complete_column<T: Scalar>(n: usize, placed: &[Vec<T>]) -> Vec<T> {
    for b in 0..n {
        let mut cand = vec![T::zero(); n];
        cand[b] = T::one();
        for q in placed {
            let mut ov = T::zero();
            for (x, y) in q.iter().zip(&cand) {
                ov += x.conj() * *y;
            }
            for (c, qk) in cand.iter_mut().zip(q) {
                *c -= *qk * ov;
            }
        }
        let nrm: f64 = cand.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            return cand.iter().map(|x| x.scale(1.0 / nrm)).collect();
        }
    }
    unreachable!("orthonormal completion always exists for r <= n");
}

/// Singular values of an n×r factor (non-increasing).
pub fn factor_singular_values<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<f64>> {
    Ok(thin_svd(a)?.sigma)
}

/// Orthonormal basis of the column space (modified Gram-Schmidt, rank
/// deficient columns dropped).
pub fn orthonormal_columns<T: Scalar>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (n, r) = a.shape();
    let mut basis: Vec<Vec<T>> = Vec::new();
    let scale = a.fro_norm().max(1e-300);
    for j in 0..r {
        let mut c = a.col(j);
        for q in &basis {
            let mut ov = T::zero();
            for (x, y) in q.iter().zip(&c) {
                ov += x.conj() * *y;
            }
            for (x, qk) in c.iter_mut().zip(q) {
                *x -= *qk * ov;
            }
        }
        let nrm: f64 = c.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt();
        if nrm > 1e-12 * scale {
            basis.push(c.iter().map(|x| x.scale(1.0 / nrm)).collect());
        }
    }
    let mut q = DenseMatrix::zeros(n, basis.len().max(1));
    for (k, c) in basis.iter().enumerate() {
        q.set_col(k, c);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reconstruct<T: Scalar>(svd: &Svd<T>) -> DenseMatrix<T> {
        let r = svd.sigma.len();
        let mut s = DenseMatrix::<T>::zeros(r, r);
        for (i, &x) in svd.sigma.iter().enumerate() {
            s.set(i, i, T::from_re(x));
        }
        svd.u.matmul(&s).matmul(&svd.v.conj_transpose())
    }

    #[test]
    fn svd_reconstructs_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DenseMatrix::<f64>::from_fn(7, 3, |_, _| rng.random::<f64>() - 0.5);
        let svd = thin_svd(&a).unwrap();
        assert!(reconstruct(&svd).sub(&a).fro_norm() < 1e-12);
        let g = svd.u.conj_transpose().matmul(&svd.u);
        assert!(g.sub(&DenseMatrix::identity(3)).fro_norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_complex_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = DenseMatrix::<Complex64>::from_fn(5, 2, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        // duplicate a column: rank 2 out of 3
        let a = DenseMatrix::from_fn(5, 3, |i, j| b.get(i, j.min(1)));
        let svd = thin_svd(&a).unwrap();
        assert!(reconstruct(&svd).sub(&a).fro_norm() < 1e-12);
        assert!(svd.sigma[2] < 1e-12);
        let g = svd.u.conj_transpose().matmul(&svd.u);
        assert!(g.sub(&DenseMatrix::identity(3)).fro_norm() < 1e-10);
        let gv = svd.v.conj_transpose().matmul(&svd.v);
        assert!(gv.sub(&DenseMatrix::identity(3)).fro_norm() < 1e-10);
    }
}
