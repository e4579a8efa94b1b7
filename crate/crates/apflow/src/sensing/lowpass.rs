//! Depth-dependent lowpass-and-attenuation operator.
//!
//! The domain is an n×T matrix whose rows are per-depth signals. Row i is
//! FIR-lowpass-filtered at cutoff `f_c(dᵢ) = f_max/dᵢ^α`, scaled by
//! `A(dᵢ) = 1/dᵢ^α`, and the rows are summed into a single length-T
//! measurement. The exponent is `α = Δ₁` for `d < h` and `α = Δ₂` for
//! `d ≥ h`. Equivalent to a banded matrix acting on vec(X).
//!
//! Frequencies are normalized: 1.0 is the Nyquist frequency of the signal's
//! sampling rate, and cutoffs are clamped to (0, 1]. Filters are
//! windowed-sinc (Hamming) with unit DC gain; a single tap gives an exact
//! all-pass.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct LowpassParams {
    pub depths: Vec<f64>,
    /// Maximum (surface) cutoff as a fraction of Nyquist, in (0, 1].
    pub f_max: f64,
    /// Exponent Δ₁ for depths below `h`.
    pub delta1: f64,
    /// Exponent Δ₂ for depths at or beyond `h`.
    pub delta2: f64,
    /// Crossover depth.
    pub h: f64,
    pub time_len: usize,
    pub filter_taps: usize,
}

impl Default for LowpassParams {
    fn default() -> Self {
        LowpassParams {
            depths: Vec::new(),
            f_max: 0.8,
            delta1: 1.0,
            delta2: 0.25,
            h: 10.0,
            time_len: 0,
            filter_taps: 31,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LowpassOp {
    params: LowpassParams,
    kernels: Vec<Vec<f64>>,
    attenuations: Vec<f64>,
}

impl LowpassOp {
    pub fn new(params: LowpassParams) -> Result<Self> {
        if params.depths.is_empty() {
            return Err(Error::Invalid("lowpass operator needs depths".into()));
        }
        if params.depths.iter().any(|&d| d <= 0.0 || !d.is_finite()) {
            return Err(Error::Invalid("depths must be positive".into()));
        }
        if params.f_max <= 0.0 || params.f_max > 1.0 {
            return Err(Error::Invalid(
                "f_max must lie in (0, 1] (fraction of Nyquist)".into(),
            ));
        }
        if params.filter_taps == 0 || params.time_len < params.filter_taps {
            return Err(Error::Invalid(
                "need filter_taps >= 1 and time_len >= filter_taps".into(),
            ));
        }
        let mut kernels = Vec::with_capacity(params.depths.len());
        let mut attenuations = Vec::with_capacity(params.depths.len());
        for &d in &params.depths {
            let alpha = if d < params.h {
                params.delta1
            } else {
                params.delta2
            };
            let fc = (params.f_max / d.powf(alpha)).clamp(1e-6, 1.0);
            kernels.push(windowed_sinc(fc, params.filter_taps));
            attenuations.push(1.0 / d.powf(alpha));
        }
        Ok(LowpassOp {
            params,
            kernels,
            attenuations,
        })
    }

    pub fn params(&self) -> &LowpassParams {
        &self.params
    }

    pub fn attenuations(&self) -> &[f64] {
        &self.attenuations
    }

    pub fn cutoff(&self, depth_index: usize) -> f64 {
        let d = self.params.depths[depth_index];
        let alpha = if d < self.params.h {
            self.params.delta1
        } else {
            self.params.delta2
        };
        (self.params.f_max / d.powf(alpha)).clamp(1e-6, 1.0)
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        (self.params.depths.len(), self.params.time_len)
    }

    pub fn m(&self) -> usize {
        self.params.time_len
    }

    pub fn apply<T: Scalar>(&self, x: &DenseMatrix<T>) -> Vec<f64> {
        let tlen = self.params.time_len;
        let c = (self.params.filter_taps - 1) / 2;
        let mut y = vec![0.0f64; tlen];
        for (i, (kernel, &a)) in self.kernels.iter().zip(&self.attenuations).enumerate() {
            let row = x.row(i);
            for (t, yt) in y.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (s, &k) in kernel.iter().enumerate() {
                    let u = t as isize + s as isize - c as isize;
                    if u >= 0 && (u as usize) < tlen {
                        acc += k * row[u as usize].re();
                    }
                }
                *yt += a * acc;
            }
        }
        y
    }

    pub fn adjoint<T: Scalar>(&self, v: &[f64]) -> DenseMatrix<T> {
        let (n, tlen) = self.domain_shape();
        let c = (self.params.filter_taps - 1) / 2;
        let mut out = DenseMatrix::zeros(n, tlen);
        for (i, (kernel, &a)) in self.kernels.iter().zip(&self.attenuations).enumerate() {
            for u in 0..tlen {
                let mut acc = 0.0;
                for (s, &k) in kernel.iter().enumerate() {
                    // adjoint index: t = u − s + c
                    let t = u as isize - s as isize + c as isize;
                    if t >= 0 && (t as usize) < tlen {
                        acc += k * v[t as usize];
                    }
                }
                out.set(i, u, T::from_re(a * acc));
            }
        }
        out
    }
}

/// Hamming-windowed sinc lowpass with unit DC gain; `fc` is a fraction of
/// Nyquist.
fn windowed_sinc(fc: f64, taps: usize) -> Vec<f64> {
    let c = (taps - 1) as f64 / 2.0;
    let mut k: Vec<f64> = (0..taps)
        .map(|i| {
            let x = i as f64 - c;
            let s = if x == 0.0 {
                1.0
            } else {
                (std::f64::consts::PI * fc * x).sin() / (std::f64::consts::PI * fc * x)
            };
            let w = if taps == 1 {
                1.0
            } else {
                0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (taps - 1) as f64).cos()
            };
            fc * s * w
        })
        .collect();
    let sum: f64 = k.iter().sum();
    for v in k.iter_mut() {
        *v /= sum;
    }
    k
}
