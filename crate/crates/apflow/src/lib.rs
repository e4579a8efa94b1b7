//! # apflow
//!
//! Low-rank matrix sensing by momentum-accelerated factored gradient
//! descent (accelerated Procrustes flow).
//!
//! The problem: recover a PSD rank-r matrix `X* ∈ R^{n×n}` from linear
//! measurements `y = A(X*)`, by descending `f(U) = ½‖A(UUᴴ) − y‖²` on the
//! factor `U ∈ R^{n×r}` with a heavy-ball momentum term:
//!
//! ```text
//! U_{i+1} = Z_i − η·A†(A(Z_i Z_iᴴ) − y)·Z_i
//! Z_{i+1} = U_{i+1} + μ·(U_{i+1} − U_i)
//! ```
//!
//! The crate provides:
//!
//! - [`matrix`], [`eig`], [`svd`]: the dense linear-algebra substrate over
//!   real or complex scalars (power iteration, Jacobi decompositions, the
//!   matrix file format).
//! - [`sensing`]: Gaussian, Pauli, fast-transform, dense, and
//!   lowpass/attenuation operators with adjoints, plus an empirical RIP
//!   probe.
//! - [`geometry`]: the rotation-invariant Procrustes distance on factors.
//! - [`solver`]: accelerated / plain Procrustes flow, the rectangular
//!   two-factor variant, a projected-gradient baseline, spectral and
//!   random initialization, and the constant step-size rule.
//! - [`theory`]: the convergence-rate calculator (κ, τ, ξ, theory μ, the
//!   2×2 contraction spectrum, basin radius, rate envelope).
//! - [`lemmas`]: numerical verification of the supporting inequality chain
//!   on sampled instances.
//! - [`qst`]: quantum state tomography — synthetic pure states, shot-noise
//!   Pauli correlations, fidelity, and the end-to-end reconstruction
//!   pipeline.
//! - [`harness`]: config-driven experiment orchestration with CSV output.

pub mod error;
pub mod scalar;
#[macro_use]
pub mod matrix;
pub mod eig;
pub mod geometry;
pub mod harness;
pub mod lemmas;
pub mod pauli;
pub mod qst;
pub mod sensing;
pub mod solver;
pub mod svd;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Factor};
pub use scalar::{Field, Scalar};

/// Complex scalar used throughout the tomography paths.
pub type Complex = num_complex::Complex64;
