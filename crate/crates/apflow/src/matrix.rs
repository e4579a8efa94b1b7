//! Dense row-major matrices over a scalar field, plus the plain-text matrix
//! file format used to exchange operators and iterates.
//!
//! File format: line 1 is `rows cols field` with field `R` or `C`; the
//! remaining lines hold whitespace-separated entries in row-major order,
//! complex entries as adjacent (real, imag) pairs. `f64` display output is
//! shortest-round-trip, so save/load round-trips are exact.

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// A factor `U` with `X = U U^H`; plain matrix, the alias marks intent.
pub type Factor<T> = DenseMatrix<T>;

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "entry count {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[T]) {
        for i in 0..self.rows {
            self.set(i, j, v[i]);
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `a*self + b*other`, elementwise with real coefficients.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&x, &y)| x.scale(a) + y.scale(b))
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj_transpose(&self) -> Self {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += *a * *x;
                }
                acc
            })
            .collect()
    }

    /// `self^H * v`.
    pub fn conj_transpose_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        let n = self.rows.min(self.cols);
        let mut t = T::zero();
        for i in 0..n {
            t += self.get(i, i);
        }
        t
    }

    pub fn fro_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x.abs_sq()).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    pub fn is_all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Real inner product `Re tr(self^H other)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a.conj() * b).re())
            .sum()
    }

    /// `‖M − M^H‖_F / ‖M‖_F`, zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev += (self.get(i, j) - self.get(j, i).conj()).abs_sq();
            }
        }
        let nrm = self.fro_norm();
        if nrm == 0.0 {
            0.0
        } else {
            dev.sqrt() / nrm
        }
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= rel_tol
    }

    /// `(M + M^H)/2`; exact identity on already-Hermitian input.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()).scale(0.5)
        })
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> Vec<T> {
        self.data.clone()
    }

    pub fn from_vectorized(rows: usize, cols: usize, v: Vec<T>) -> Result<Self> {
        Self::new(rows, cols, v)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "{} {} {}", self.rows, self.cols, T::FIELD.tag())?;
        for i in 0..self.rows {
            let mut line = String::new();
            for j in 0..self.cols {
                let v = self.get(i, j);
                for c in 0..T::COMPONENTS {
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&format!("{}", v.component(c)));
                }
            }
            writeln!(f, "{}", line)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
        let mut it = header.split_whitespace();
        let rows: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad row count".into()))?;
        let cols: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad col count".into()))?;
        let field = it
            .next()
            .and_then(Field::from_tag)
            .ok_or_else(|| Error::Parse("bad field tag (expected R or C)".into()))?;
        if field != T::FIELD {
            return Err(Error::Parse(format!(
                "file holds field {} but {} was requested",
                field.tag(),
                T::FIELD.tag()
            )));
        }
        let mut nums: Vec<f64> = Vec::with_capacity(rows * cols * T::COMPONENTS);
        for line in lines {
            for tok in line?.split_whitespace() {
                nums.push(
                    tok.parse()
                        .map_err(|_| Error::Parse(format!("bad entry `{tok}`")))?,
                );
            }
        }
        if nums.len() != rows * cols * T::COMPONENTS {
            return Err(Error::Parse(format!(
                "expected {} numbers, found {}",
                rows * cols * T::COMPONENTS,
                nums.len()
            )));
        }
        let data = nums
            .chunks(T::COMPONENTS)
            .map(T::from_components)
            .collect();
        Ok(DenseMatrix { rows, cols, data })
    }
}

/// Euclidean norm of a real vector.
pub fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Real dot product.
pub fn vec_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matmul_identity() {
        let a = DenseMatrix::<f64>::from_fn(3, 2, |i, j| (i * 2 + j) as f64);
        let id = DenseMatrix::<f64>::identity(3);
        assert_eq!(id.matmul(&a), a);
    }

    #[test]
    fn conj_transpose_complex() {
        let m = DenseMatrix::new(1, 2, vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)])
            .unwrap();
        let mh = m.conj_transpose();
        assert_eq!(mh.get(0, 0), Complex64::new(1.0, -2.0));
        assert_eq!(mh.get(1, 0), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn hermitian_check() {
        let mut m = DenseMatrix::<Complex64>::zeros(2, 2);
        m.set(0, 1, Complex64::new(0.0, 1.0));
        m.set(1, 0, Complex64::new(0.0, -1.0));
        assert!(m.is_hermitian(1e-12));
        m.set(1, 0, Complex64::new(0.0, 1.0));
        assert!(!m.is_hermitian(1e-12));
    }

    #[test]
    fn entry_count_validated() {
        assert!(DenseMatrix::<f64>::new(2, 2, vec![1.0; 3]).is_err());
    }
}
