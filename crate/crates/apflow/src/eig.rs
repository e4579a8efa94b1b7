//! Spectral computations: top-r eigenpairs of Hermitian matrices by power
//! iteration with deflation, spectral norms by power iteration on `M^H M`,
//! rank-r PSD projection, and a dense cyclic-Jacobi eigensolver for the
//! small full decompositions (fidelity, diagnostics).
//!
//! Algebraic ordering is obtained by shifting with `‖M‖_F`, which bounds
//! every eigenvalue in magnitude, so the shifted matrix is PSD and the
//! dominant shifted eigenvalue is the algebraically largest of `M`.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Relative Hermitian-deviation tolerance used by validation.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default residual tolerance for eigensolves.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

const START_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Top-r eigenpairs of a Hermitian matrix, eigenvalues non-increasing.
#[derive(Debug, Clone)]
pub struct SpectralSummary<T> {
    pub top_values: Vec<f64>,
    /// `n x r`, orthonormal columns matching `top_values`.
    pub top_vectors: DenseMatrix<T>,
    /// Largest eigen-residual `‖M v − λ v‖₂` over the returned pairs.
    pub residual_norm: f64,
}

fn max_power_iters(dim: usize) -> usize {
    // 10*dim is too tight for small ill-conditioned matrices once the
    // stabilizing shift compresses the relative gaps; the floor keeps the
    // solver usable down to dim ~ 2 while staying cheap.
    (10 * dim).max(5000)
}

fn vec_norm_t<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
}

fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    acc
}

fn random_unit<T: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    loop {
        let v: Vec<T> = (0..n).map(|_| T::standard_normal(rng)).collect();
        let nrm = vec_norm_t(&v);
        if nrm > 1e-8 {
            return v.iter().map(|x| x.scale(1.0 / nrm)).collect();
        }
    }
}

/// Returns the `r` algebraically largest eigenpairs of Hermitian `m`.
///
/// Each returned pair satisfies `|λ̂ − λ| ≤ tol·‖m‖₂`; non-convergence
/// within the iteration cap is an error carrying the residual.
pub fn top_r_eig<T: Scalar>(m: &DenseMatrix<T>, r: usize, tol: f64) -> Result<SpectralSummary<T>> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Invalid(format!(
            "eigensolve needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if r == 0 || r > n {
        return Err(Error::Invalid(format!("rank {} out of range 1..={}", r, n)));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }

    let fro = m.fro_norm();
    if fro == 0.0 {
        // Zero matrix: every unit vector is an eigenvector with eigenvalue 0.
        let mut vecs = DenseMatrix::zeros(n, r);
        for k in 0..r {
            vecs.set(k, k, T::one());
        }
        return Ok(SpectralSummary {
            top_values: vec![0.0; r],
            top_vectors: vecs,
            residual_norm: 0.0,
        });
    }

    // fro ≥ ‖m‖₂ ≥ |λ_min|, so m + fro·I is PSD and power iteration on it
    // extracts eigenvalues of m in algebraic order.
    let shift = fro;
    // fro/√n ≤ ‖m‖₂, so this residual target is at least as strict as the
    // contract's tol·‖m‖₂.
    let res_scale = fro / (n as f64).sqrt();
    let cap = max_power_iters(n);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ (n as u64));
    let mut values = Vec::with_capacity(r);
    let mut shifted = Vec::with_capacity(r);
    let mut vectors: Vec<Vec<T>> = Vec::with_capacity(r);
    let mut worst_residual = 0.0f64;

    for _ in 0..r {
        let mut v = random_unit::<T>(n, &mut rng);
        orthogonalize(&mut v, &vectors);
        let nrm = vec_norm_t(&v);
        if nrm < 1e-8 {
            v = random_unit::<T>(n, &mut rng);
            orthogonalize(&mut v, &vectors);
        }
        normalize(&mut v);

        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..cap {
            // w = (m + shift I) v, deflated against the found pairs.
            let mut w = m.mul_vec(&v);
            for (x, y) in w.iter_mut().zip(&v) {
                *x += y.scale(shift);
            }
            for (th, q) in shifted.iter().zip(&vectors) {
                let ov: T = dot_conj(q, &v);
                let coef = ov.scale(*th);
                for (x, qk) in w.iter_mut().zip(q.iter()) {
                    *x -= *qk * coef;
                }
            }
            let theta = dot_conj(&v, &w).re();
            residual = {
                let mut s = 0.0;
                for (x, y) in w.iter().zip(&v) {
                    s += (*x - y.scale(theta)).abs_sq();
                }
                s.sqrt()
            };
            if residual <= tol * res_scale {
                shifted.push(theta);
                values.push(theta - shift);
                converged = true;
                break;
            }
            orthogonalize(&mut w, &vectors);
            let nw = vec_norm_t(&w);
            if nw < 1e-300 {
                // Deflated operator annihilates v: eigenvalue −shift.
                shifted.push(0.0);
                values.push(-shift);
                residual = 0.0;
                converged = true;
                break;
            }
            for x in w.iter_mut() {
                *x = x.scale(1.0 / nw);
            }
            v = w;
        }
        if !converged {
            return Err(Error::EigNoConverge {
                iterations: cap,
                residual,
            });
        }
        worst_residual = worst_residual.max(residual);
        vectors.push(v);
    }

    // Defensive re-sort: near-ties can come out of deflation fractionally
    // out of order.
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vecs = DenseMatrix::zeros(n, r);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_col(k, &vectors[i]);
    }

    Ok(SpectralSummary {
        top_values: sorted_values,
        top_vectors: vecs,
        residual_norm: worst_residual,
    })
}

fn orthogonalize<T: Scalar>(v: &mut [T], basis: &[Vec<T>]) {
    for q in basis {
        let ov = dot_conj(q, v);
        for (x, qk) in v.iter_mut().zip(q.iter()) {
            *x -= *qk * ov;
        }
    }
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let nrm = vec_norm_t(v);
    if nrm > 0.0 {
        for x in v.iter_mut() {
            *x = x.scale(1.0 / nrm);
        }
    }
}

/// Largest singular value of `m` within relative tolerance `tol`,
/// via power iteration on `m^H m`.
pub fn spectral_norm<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> f64 {
    assert!(m.rows() > 0 && m.cols() > 0, "empty matrix");
    if m.fro_norm() == 0.0 {
        return 0.0;
    }
    let n = m.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ 0x5bd1_e995 ^ (n as u64));
    let mut v = random_unit::<T>(n, &mut rng);
    let cap = max_power_iters(n.max(m.rows()));
    let mut theta = 0.0f64;
    for _ in 0..cap {
        let u = m.mul_vec(&v);
        let w = m.conj_transpose_mul_vec(&u);
        theta = dot_conj(&v, &w).re();
        let mut res = 0.0;
        for (x, y) in w.iter().zip(&v) {
            res += (*x - y.scale(theta)).abs_sq();
        }
        if res.sqrt() <= tol * theta.max(1e-300) {
            break;
        }
        v = w;
        normalize(&mut v);
    }
    theta.max(0.0).sqrt()
}

/// Best rank-≤r PSD approximation of Hermitian `m`, returned in factored
/// form: columns are `vᵢ·√max(λᵢ, 0)`, so non-positive eigenpairs give
/// zero columns.
pub fn psd_project_rank_r<T: Scalar>(m: &DenseMatrix<T>, r: usize) -> Result<DenseMatrix<T>> {
    let summary = top_r_eig(m, r, DEFAULT_EIG_TOL)?;
    let n = m.rows();
    let mut u = DenseMatrix::zeros(n, r);
    for k in 0..r {
        let s = summary.top_values[k].max(0.0).sqrt();
        for i in 0..n {
            u.set(i, k, summary.top_vectors.get(i, k).scale(s));
        }
    }
    Ok(u)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Returns `(values, vectors)` with values non-increasing and orthonormal
/// columns; intended for the small dense matrices of the tomography and
/// diagnostic paths. Self-certifying via `V Λ V^H = M` reconstruction.
pub fn eig_hermitian_dense<T: Scalar>(m: &DenseMatrix<T>) -> Result<(Vec<f64>, DenseMatrix<T>)> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Invalid("eigensolve needs a square matrix".into()));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }

    let mut a = m.clone();
    let mut v = DenseMatrix::<T>::identity(n);
    let fro = a.fro_norm();
    if fro == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let eps = 1e-15 * fro;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs_sq();
            }
        }
        if (2.0 * off).sqrt() <= eps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.abs();
                if mag <= eps / (n as f64) {
                    continue;
                }
                let app = a.get(p, p).re();
                let aqq = a.get(q, q).re();
                // Phase e^{iφ} of the pivot, then a real Jacobi rotation.
                let phase = apq.scale(1.0 / mag);
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s],[−s e^{−iφ}, c e^{−iφ}]] acting on cols p,q.
                let phc = phase.conj();
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip.scale(c) - (aiq * phc).scale(s));
                    a.set(i, q, aip.scale(s) + (aiq * phc).scale(c));
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj.scale(c) - (aqj * phase).scale(s));
                    a.set(q, j, apj.scale(s) + (aqj * phase).scale(c));
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip.scale(c) - (viq * phc).scale(s));
                    v.set(i, q, vip.scale(s) + (viq * phc).scale(c));
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i).re(), i)).collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (k, &(_, i)) in pairs.iter().enumerate() {
        vectors.set_col(k, &v.col(i));
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn diag(vals: &[f64]) -> DenseMatrix<f64> {
        let n = vals.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[test]
    fn identity_top_pair() {
        let m = DenseMatrix::<f64>::identity(3);
        let s = top_r_eig(&m, 1, 1e-10).unwrap();
        assert!((s.top_values[0] - 1.0).abs() < 1e-10);
        let v = s.top_vectors.col(0);
        assert!((crate::matrix::vec_norm(&v) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_top_two() {
        let m = diag(&[3.0, 2.0, 1.0]);
        let s = top_r_eig(&m, 2, 1e-10).unwrap();
        assert!((s.top_values[0] - 3.0).abs() < 1e-9);
        assert!((s.top_values[1] - 2.0).abs() < 1e-9);
        assert!(s.top_vectors.get(0, 0).abs() > 1.0 - 1e-8);
        assert!(s.top_vectors.get(1, 1).abs() > 1.0 - 1e-8);
    }

    #[test]
    fn algebraic_order_beats_magnitude() {
        // |−7| > |5| but the algebraically largest eigenvalue is 5.
        let m = diag(&[-7.0, 5.0, 1.0]);
        let s = top_r_eig(&m, 1, 1e-10).unwrap();
        assert!((s.top_values[0] - 5.0).abs() < 1e-8);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            top_r_eig(&m, 1, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn spectral_norm_zero_and_diagonal() {
        let z = DenseMatrix::<f64>::zeros(3, 3);
        assert_eq!(spectral_norm(&z, 1e-10), 0.0);
        let m = diag(&[5.0, -7.0]);
        assert!((spectral_norm(&m, 1e-12) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn psd_project_diagonal() {
        let m = diag(&[4.0, 1.0]);
        let u = psd_project_rank_r(&m, 1).unwrap();
        assert!((u.get(0, 0).abs() - 2.0).abs() < 1e-9);
        assert!(u.get(1, 0).abs() < 1e-9);
    }

    #[test]
    fn psd_project_negative_definite_is_zero() {
        let m = diag(&[-1.0, -2.0]);
        let u = psd_project_rank_r(&m, 2).unwrap();
        assert!(u.fro_norm() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_complex() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 6;
        let mut m = DenseMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = if i == j {
                    Complex64::new(rng.random::<f64>() - 0.5, 0.0)
                } else {
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                };
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        let (vals, vecs) = eig_hermitian_dense(&m).unwrap();
        // V Λ V^H == M
        let mut lam = DenseMatrix::<Complex64>::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            lam.set(i, i, Complex64::new(v, 0.0));
        }
        let rec = vecs.matmul(&lam).matmul(&vecs.conj_transpose());
        assert!(rec.sub(&m).fro_norm() < 1e-10 * m.fro_norm().max(1.0));
        // orthonormal columns
        let g = vecs.conj_transpose().matmul(&vecs);
        assert!(g.sub(&DenseMatrix::identity(n)).fro_norm() < 1e-10);
        // non-increasing
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }
}
