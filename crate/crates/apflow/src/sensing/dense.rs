//! Explicit dense operator: a stored matrix acting on the row-major
//! vectorization of the domain. Ingestion path for externally built
//! operators (matrix file format), and the identity/full-observation
//! reference operator.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct DenseOp<T> {
    matrix: DenseMatrix<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> DenseOp<T> {
    pub fn new(matrix: DenseMatrix<T>, domain: (usize, usize)) -> Result<Self> {
        let (rows, cols) = domain;
        if matrix.cols() != rows * cols {
            return Err(Error::Invalid(format!(
                "operator matrix has {} columns but the domain {:?} vectorizes to {}",
                matrix.cols(),
                domain,
                rows * cols
            )));
        }
        Ok(DenseOp { matrix, rows, cols })
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        self.matrix
            .mul_vec(x.data())
            .into_iter()
            .map(|v| v.re())
            .collect()
    }

    pub fn adjoint(&self, v: &[f64]) -> DenseMatrix<T> {
        let vt: Vec<T> = v.iter().map(|&x| T::from_re(x)).collect();
        let flat = self.matrix.conj_transpose_mul_vec(&vt);
        DenseMatrix::new(self.rows, self.cols, flat).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_vectorization() {
        let op = DenseOp::new(DenseMatrix::<f64>::identity(4), (2, 2)).unwrap();
        let x = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(op.apply(&x), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn ones_row_sums() {
        // 2×4 all-ones matrix applied to I₂ sums the two diagonal ones.
        let m = DenseMatrix::new(2, 4, vec![1.0; 8]).unwrap();
        let op = DenseOp::new(m, (2, 2)).unwrap();
        let y = op.apply(&DenseMatrix::identity(2));
        assert_eq!(y, vec![2.0, 2.0]);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let m = DenseMatrix::<f64>::zeros(3, 5);
        assert!(DenseOp::new(m, (2, 2)).is_err());
    }
}
