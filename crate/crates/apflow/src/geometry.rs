//! Rotation-invariant geometry on factors: `X = U U^H` is unchanged by
//! `U ← U·R` for unitary `R`, so distances between factors are measured
//! modulo that orbit via the orthogonal Procrustes problem.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use crate::svd::thin_svd;

/// Optimal alignment of `U` to the orbit of `V`.
#[derive(Debug, Clone)]
pub struct Alignment<T> {
    /// r×r element of O(r) (unitary for the complex field) minimizing
    /// `‖U − V·rotation‖_F`.
    pub rotation: DenseMatrix<T>,
    pub distance: f64,
}

/// Global minimizer of `‖U − V R‖_F` over unitary `R`: with
/// `V^H U = P Σ Q^H`, the minimizer is `R = P Q^H`.
pub fn optimal_rotation<T: Scalar>(
    u: &DenseMatrix<T>,
    v: &DenseMatrix<T>,
) -> Result<Alignment<T>> {
    if u.shape() != v.shape() {
        return Err(Error::Invalid(format!(
            "factors must share shape, got {:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let r = u.cols();
    let rotation = if r == 1 {
        // Sign (phase) rule: align with the cross inner product directly.
        let mut c = T::zero();
        for i in 0..u.rows() {
            c += v.get(i, 0).conj() * u.get(i, 0);
        }
        let mag = c.abs();
        let s = if mag > 0.0 {
            c.scale(1.0 / mag)
        } else {
            T::one()
        };
        DenseMatrix::new(1, 1, vec![s]).unwrap()
    } else {
        let cross = v.conj_transpose().matmul(u);
        let svd = thin_svd(&cross)?;
        svd.u.matmul(&svd.v.conj_transpose())
    };
    let distance = u.sub(&v.matmul(&rotation)).fro_norm();
    Ok(Alignment { rotation, distance })
}

/// `min_R ‖U − V R‖_F` over O(r).
pub fn procrustes_distance<T: Scalar>(u: &DenseMatrix<T>, v: &DenseMatrix<T>) -> Result<f64> {
    Ok(optimal_rotation(u, v)?.distance)
}

/// Gram matrix `U U^H`; Hermitian by construction (upper triangle mirrored
/// exactly).
pub fn gram<T: Scalar>(u: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = u.rows();
    let mut g = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let ri = u.row(i);
        for j in i..n {
            let rj = u.row(j);
            let mut acc = T::zero();
            for (a, b) in ri.iter().zip(rj) {
                acc += *a * b.conj();
            }
            g.set(i, j, acc);
            if i == j {
                g.set(i, i, T::from_re(acc.re()));
            } else {
                g.set(j, i, acc.conj());
            }
        }
    }
    g
}

/// `U V^H` for the two-factor (rectangular) parameterization.
pub fn outer<T: Scalar>(u: &DenseMatrix<T>, v: &DenseMatrix<T>) -> DenseMatrix<T> {
    u.matmul(&v.conj_transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn randn(rows: usize, cols: usize, seed: u64) -> DenseMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| f64::standard_normal(&mut rng))
    }

    #[test]
    fn identical_factors_align_at_zero() {
        let u = randn(6, 2, 1);
        let a = optimal_rotation(&u, &u).unwrap();
        assert!(a.distance < 1e-12);
        let id = DenseMatrix::identity(2);
        assert!(a.rotation.sub(&id).fro_norm() < 1e-10);
    }

    #[test]
    fn rank_one_sign_rule() {
        let u = DenseMatrix::new(2, 1, vec![2.0, 0.0]).unwrap();
        let v = DenseMatrix::new(2, 1, vec![1.0, 0.0]).unwrap();
        let a = optimal_rotation(&u, &v).unwrap();
        assert!((a.rotation.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((a.distance - 1.0).abs() < 1e-14);
        // brute force over R in {+1, −1}
        let d_plus = u.sub(&v).fro_norm();
        let d_minus = u.add(&v).fro_norm();
        assert!((a.distance - d_plus.min(d_minus)).abs() < 1e-14);
    }

    #[test]
    fn zero_factors() {
        let z = DenseMatrix::<f64>::zeros(4, 2);
        assert!(procrustes_distance(&z, &z).unwrap() < 1e-15);
    }

    #[test]
    fn gram_matches_triple_loop() {
        let u = randn(4, 2, 3);
        let g = gram(&u);
        for i in 0..4 {
            for j in 0..4 {
                let mut want = 0.0;
                for k in 0..2 {
                    want += u.get(i, k) * u.get(j, k);
                }
                assert!((g.get(i, j) - want).abs() < 1e-14);
            }
        }
    }
}
