//! Scalar field abstraction: everything downstream is generic over a field
//! that is either the reals (`f64`) or the complex numbers (`Complex64`).
//!
//! The conjugate is a no-op for the real field, so "Hermitian" degrades to
//! "symmetric" and the same solver code runs the synthetic (real) and
//! tomography (complex) workloads.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Tag distinguishing the two supported fields; also the `R`/`C` marker in
/// the matrix file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn tag(self) -> &'static str {
        match self {
            Field::Real => "R",
            Field::Complex => "C",
        }
    }

    pub fn from_tag(s: &str) -> Option<Field> {
        match s {
            "R" => Some(Field::Real),
            "C" => Some(Field::Complex),
            _ => None,
        }
    }
}

pub trait Scalar:
    Copy
    + Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const FIELD: Field;
    /// Number of real components per entry (1 or 2); drives file I/O.
    const COMPONENTS: usize;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_re(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn abs_sq(self) -> f64;
    /// Multiply by a real scale factor.
    fn scale(self, s: f64) -> Self;
    fn is_finite(self) -> bool;
    fn as_complex(self) -> Complex64;
    /// Standard normal draw, N(0,1) per real component.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn from_components(c: &[f64]) -> Self;
    fn component(self, i: usize) -> f64;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;
    const COMPONENTS: usize = 1;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn as_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
    fn component(self, _i: usize) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;
    const COMPONENTS: usize = 2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn as_complex(self) -> Complex64 {
        self
    }
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    }
    fn from_components(c: &[f64]) -> Self {
        Complex64::new(c[0], c[1])
    }
    fn component(self, i: usize) -> f64 {
        if i == 0 {
            self.re
        } else {
            self.im
        }
    }
}
