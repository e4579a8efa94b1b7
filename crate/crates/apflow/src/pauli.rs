//! Pauli strings: labels over {I, X, Y, Z} per qubit, their dense matrices
//! via iterated Kronecker products, and a bit-twiddling trace action that
//! exploits the one-nonzero-per-column structure.
//!
//! Convention: the first symbol acts on the most significant bit of the
//! basis index, matching a left-fold of Kronecker products.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;
use num_complex::Complex64;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliSymbol {
    I,
    X,
    Y,
    Z,
}

impl PauliSymbol {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(PauliSymbol::I),
            'X' | 'x' => Some(PauliSymbol::X),
            'Y' | 'y' => Some(PauliSymbol::Y),
            'Z' | 'z' => Some(PauliSymbol::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Y => 'Y',
            PauliSymbol::Z => 'Z',
        }
    }

    /// 2×2 single-qubit matrix.
    pub fn matrix(self) -> DenseMatrix<Complex64> {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let data = match self {
            PauliSymbol::I => vec![o, z, z, o],
            PauliSymbol::X => vec![z, o, o, z],
            PauliSymbol::Y => vec![z, -i, i, z],
            PauliSymbol::Z => vec![o, z, z, -o],
        };
        DenseMatrix::new(2, 2, data).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    symbols: Vec<PauliSymbol>,
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl PauliString {
    pub fn new(symbols: Vec<PauliSymbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Invalid("empty Pauli string".into()));
        }
        Ok(PauliString { symbols })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let symbols: Option<Vec<_>> = s.chars().map(PauliSymbol::from_char).collect();
        match symbols {
            Some(v) if !v.is_empty() => Ok(PauliString { symbols: v }),
            _ => Err(Error::Parse(format!("bad Pauli string `{s}`"))),
        }
    }

    /// Decode from a base-4 index, most significant digit first.
    pub fn from_index(mut idx: u64, qubits: usize) -> Self {
        let mut symbols = vec![PauliSymbol::I; qubits];
        for k in (0..qubits).rev() {
            symbols[k] = match idx % 4 {
                0 => PauliSymbol::I,
                1 => PauliSymbol::X,
                2 => PauliSymbol::Y,
                _ => PauliSymbol::Z,
            };
            idx /= 4;
        }
        PauliString { symbols }
    }

    pub fn qubits(&self) -> usize {
        self.symbols.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.symbols.len()
    }

    pub fn symbols(&self) -> &[PauliSymbol] {
        &self.symbols
    }

    pub fn is_identity(&self) -> bool {
        self.symbols.iter().all(|&s| s == PauliSymbol::I)
    }

    /// Dense 2^q × 2^q matrix by iterated Kronecker product.
    pub fn matrix(&self) -> DenseMatrix<Complex64> {
        let mut m = self.symbols[0].matrix();
        for s in &self.symbols[1..] {
            m = kron(&m, &s.matrix());
        }
        m
    }

    /// Bit mask of qubits with an X or Y symbol: `P|j> = phase(j) |j ^ mask>`.
    pub fn flip_mask(&self) -> usize {
        let q = self.symbols.len();
        let mut mask = 0usize;
        for (k, &s) in self.symbols.iter().enumerate() {
            if matches!(s, PauliSymbol::X | PauliSymbol::Y) {
                mask |= 1 << (q - 1 - k);
            }
        }
        mask
    }

    /// Column phase: `P[j ^ mask, j] = phase(j)` in {±1, ±i}.
    pub fn column_phase(&self, j: usize) -> Complex64 {
        let q = self.symbols.len();
        let mut re_sign = 1.0f64;
        let mut n_i = 0u32; // powers of the imaginary unit
        for (k, &s) in self.symbols.iter().enumerate() {
            let bit = (j >> (q - 1 - k)) & 1;
            match s {
                PauliSymbol::I | PauliSymbol::X => {}
                PauliSymbol::Z => {
                    if bit == 1 {
                        re_sign = -re_sign;
                    }
                }
                PauliSymbol::Y => {
                    n_i += 1;
                    if bit == 1 {
                        re_sign = -re_sign;
                    }
                }
            }
        }
        let base = match n_i % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        base.scale(re_sign)
    }

    /// `Tr(P · X)` without materializing `P`: one entry of `X` per basis
    /// index.
    pub fn trace_with<T: Scalar>(&self, x: &DenseMatrix<T>) -> Complex64 {
        let dim = self.dim();
        debug_assert_eq!(x.rows(), dim);
        debug_assert_eq!(x.cols(), dim);
        let mask = self.flip_mask();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            acc += self.column_phase(j) * x.get(j, j ^ mask).as_complex();
        }
        acc
    }

    /// Accumulate `out += w · P` using the sparse structure.
    pub fn accumulate_scaled<T: Scalar>(&self, w: f64, out: &mut DenseMatrix<T>) {
        let dim = self.dim();
        let mask = self.flip_mask();
        for j in 0..dim {
            let ph = self.column_phase(j).scale(w);
            let cur = out.get(j ^ mask, j).as_complex() + ph;
            out.set(j ^ mask, j, scalar_from_complex::<T>(cur));
        }
    }
}

fn scalar_from_complex<T: Scalar>(z: Complex64) -> T {
    match T::FIELD {
        crate::scalar::Field::Real => T::from_re(z.re),
        crate::scalar::Field::Complex => T::from_components(&[z.re, z.im]),
    }
}

/// Kronecker product.
pub fn kron(a: &DenseMatrix<Complex64>, b: &DenseMatrix<Complex64>) -> DenseMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DenseMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zz_is_diag() {
        let p = PauliString::parse("ZZ").unwrap();
        let m = p.matrix();
        for (i, want) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            assert_eq!(m.get(i, i), Complex64::new(*want, 0.0));
        }
        assert!((m.fro_norm_sq() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_action_matches_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for s in ["XY", "YZI", "IXYZ", "YY"] {
            let p = PauliString::parse(s).unwrap();
            let dim = p.dim();
            let x = DenseMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let dense = p.matrix().matmul(&x).trace();
            let fast = p.trace_with(&x);
            assert!((dense - fast).norm() < 1e-12, "mismatch for {s}");
        }
    }

    #[test]
    fn accumulate_matches_dense() {
        let p = PauliString::parse("XY").unwrap();
        let mut acc = DenseMatrix::<Complex64>::zeros(4, 4);
        p.accumulate_scaled(0.7, &mut acc);
        let want = p.matrix().scaled(0.7);
        assert!(acc.sub(&want).fro_norm() < 1e-14);
    }

    #[test]
    fn index_roundtrip() {
        let p = PauliString::from_index(0b_01_10_11, 3); // X Y Z
        assert_eq!(p.to_string(), "XYZ");
    }
}
