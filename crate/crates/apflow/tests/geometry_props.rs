//! Procrustes geometry: optimality, invariances, and the distance bounds
//! the convergence analysis leans on.

mod common;

use apflow::geometry::{gram, optimal_rotation, procrustes_distance};
use apflow::matrix::DenseMatrix;
use apflow::svd::factor_singular_values;
use apflow::Complex;
use common::*;
use rand::Rng;

#[test]
fn rotated_factor_has_zero_distance() {
    let mut r = rng(1);
    for _ in 0..20 {
        let u = randn::<f64>(7, 3, &mut r);
        let q = random_orthogonal::<f64>(3, &mut r);
        let v = u.matmul(&q);
        assert!(procrustes_distance(&u, &v).unwrap() <= 1e-10);
    }
}

#[test]
fn distance_is_symmetric() {
    let mut r = rng(2);
    for _ in 0..20 {
        let u = randn::<f64>(6, 2, &mut r);
        let v = randn::<f64>(6, 2, &mut r);
        let duv = procrustes_distance(&u, &v).unwrap();
        let dvu = procrustes_distance(&v, &u).unwrap();
        assert!((duv - dvu).abs() <= 1e-10 * duv.max(1.0));
    }
}

#[test]
fn rotation_is_orthogonal_and_beats_random_probes() {
    let mut r = rng(3);
    let u = randn::<f64>(8, 3, &mut r);
    let v = randn::<f64>(8, 3, &mut r);
    let a = optimal_rotation(&u, &v).unwrap();
    let gram_rot = a.rotation.conj_transpose().matmul(&a.rotation);
    assert!(gram_rot.sub(&DenseMatrix::identity(3)).fro_norm() < 1e-10);
    for _ in 0..50 {
        let q = random_orthogonal::<f64>(3, &mut r);
        let d = u.sub(&v.matmul(&q)).fro_norm();
        assert!(a.distance <= d + 1e-12);
    }
}

#[test]
fn random_search_upper_bound_oracle_r2() {
    let mut r = rng(4);
    let u = randn::<f64>(6, 2, &mut r);
    let v = randn::<f64>(6, 2, &mut r);
    let exact = procrustes_distance(&u, &v).unwrap();
    let mut best = f64::INFINITY;
    for _ in 0..10_000 {
        let q = random_orthogonal::<f64>(2, &mut r);
        best = best.min(u.sub(&v.matmul(&q)).fro_norm());
    }
    assert!(best >= exact - 1e-6, "probe min {best} below exact {exact}");
    assert!(best - exact < 1e-2, "random search should approach the optimum");
}

#[test]
fn bi_invariance_under_unitary_factors() {
    let mut r = rng(5);
    for _ in 0..20 {
        let u = randn::<Complex>(6, 2, &mut r);
        let v = randn::<Complex>(6, 2, &mut r);
        let q1 = random_orthogonal::<Complex>(2, &mut r);
        let q2 = random_orthogonal::<Complex>(2, &mut r);
        let d0 = procrustes_distance(&u, &v).unwrap();
        let d1 = procrustes_distance(&u.matmul(&q1), &v.matmul(&q2)).unwrap();
        assert!((d0 - d1).abs() <= 1e-10 * d0.max(1.0));
    }
}

#[test]
fn gram_is_rotation_invariant() {
    let mut r = rng(6);
    let u = randn::<f64>(5, 3, &mut r);
    let q = random_orthogonal::<f64>(3, &mut r);
    let g1 = gram(&u);
    let g2 = gram(&u.matmul(&q));
    assert!(g1.sub(&g2).fro_norm() <= 1e-12 * g1.fro_norm());
}

#[test]
fn gram_distance_lower_bound_on_random_pairs() {
    // ‖UUᵀ − VVᵀ‖_F² ≥ 2(√2−1)·σ_r(VVᵀ)·d(U,V)²
    let mut r = rng(7);
    for _ in 0..100 {
        let u = randn::<f64>(8, 2, &mut r);
        let v = randn::<f64>(8, 2, &mut r);
        let lhs = gram(&u).sub(&gram(&v)).fro_norm_sq();
        let sv = factor_singular_values(&v).unwrap();
        let sigma_r = sv[sv.len() - 1] * sv[sv.len() - 1];
        let d = procrustes_distance(&u, &v).unwrap();
        let rhs = 2.0 * (2f64.sqrt() - 1.0) * sigma_r * d * d;
        assert!(lhs >= rhs - 1e-9 * lhs.max(1.0), "lhs {lhs} rhs {rhs}");
    }
}

#[test]
fn momentum_point_triangle_bound() {
    // d(Z, U*) ≤ |1+μ|·d(U, U*) + |μ|·d(U₋, U*) + 2|μ|·σ₁(X*)^{1/2}·r
    let mut r = rng(8);
    for _ in 0..100 {
        let n = 8;
        let rk = 2;
        let u = randn::<f64>(n, rk, &mut r);
        let u_minus = randn::<f64>(n, rk, &mut r);
        let u_star = randn::<f64>(n, rk, &mut r);
        let mu: f64 = r.random_range(0.0..0.8);
        let z = u.lin_comb(1.0 + mu, &u_minus, -mu);
        let sv = factor_singular_values(&u_star).unwrap();
        let sigma1_sqrt = sv[0];
        let dz = procrustes_distance(&z, &u_star).unwrap();
        let du = procrustes_distance(&u, &u_star).unwrap();
        let dum = procrustes_distance(&u_minus, &u_star).unwrap();
        let rhs = (1.0 + mu) * du + mu * dum + 2.0 * mu * sigma1_sqrt * rk as f64;
        assert!(dz <= rhs + 1e-9, "dz {dz} rhs {rhs}");
    }
}
