//! Reference computations that avoid the library's eigensolver and
//! bisection, used as oracles by the integration and acceptance tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qht::operator::{CMatrix, CVector, DensityOperator, HermitianOperator};
use qht::random::{ginibre, random_unitary, QhtRng};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ket(entries: &[(f64, f64)]) -> DensityOperator {
    let v = CVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| c(r, i)));
    DensityOperator::pure(&v).unwrap()
}

pub fn zero() -> DensityOperator {
    ket(&[(1.0, 0.0), (0.0, 0.0)])
}

pub fn plus() -> DensityOperator {
    ket(&[(1.0, 0.0), (1.0, 0.0)])
}

/// Real symmetric trine states at angles 0, 2π/3, 4π/3 on the Bloch circle.
pub fn trine() -> Vec<DensityOperator> {
    (0..3)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / 3.0;
            ket(&[(a.cos(), 0.0), (a.sin(), 0.0)])
        })
        .collect()
}

/// `(G + G^†)/2` for a Ginibre `G`.
pub fn random_hermitian(rng: &mut QhtRng, d: usize) -> HermitianOperator {
    let g = ginibre(rng, d, d);
    HermitianOperator::symmetrized((&g + g.adjoint()) * c(0.5, 0.0))
}

/// A random probability vector; about a third of the entries are zero.
pub fn random_diagonal_weights(rng: &mut QhtRng, d: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..d)
            .map(|_| {
                if rng.random::<f64>() < 0.33 {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.into_iter().map(|x| x / total).collect();
        }
    }
}

/// `U diag(w) U^†`.
pub fn rotated_diagonal(w: &[f64], u: &CMatrix) -> DensityOperator {
    let d = HermitianOperator::from_real_diagonal(w);
    DensityOperator::new(d.congruence(u)).unwrap()
}

pub fn random_basis(rng: &mut QhtRng, d: usize) -> CMatrix {
    random_unitary(rng, d)
}

/// `α_β` for commuting states with spectra `p` and `q` in a common basis:
/// the linear program `min Σ p_i (1 − x_i)` subject to `Σ q_i x_i ≤ β`,
/// `0 ≤ x ≤ 1`, solved by filling entries greedily in decreasing order of
/// `p_i / q_i`.
pub fn commuting_alpha(p: &[f64], q: &[f64], beta: f64) -> f64 {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let ratio = |i: usize| if q[i] == 0.0 { f64::INFINITY } else { p[i] / q[i] };
    idx.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
    let mut budget = beta;
    let mut accepted = 0.0;
    for i in idx {
        if p[i] == 0.0 {
            continue;
        }
        let x = if q[i] == 0.0 { 1.0 } else { (budget / q[i]).min(1.0) };
        if x <= 0.0 {
            break;
        }
        accepted += p[i] * x;
        budget -= q[i] * x;
    }
    (1.0 - accepted).max(0.0)
}

/// Classical Bayes error `1 − Σ_y max_i p_i τ_i(y)` of diagonal states.
pub fn bayes_error(priors: &[f64], diagonals: &[Vec<f64>]) -> f64 {
    let d = diagonals[0].len();
    let success: f64 = (0..d)
        .map(|y| {
            priors
                .iter()
                .zip(diagonals)
                .map(|(p, t)| p * t[y])
                .fold(0.0, f64::max)
        })
        .sum();
    1.0 - success
}

/// Bloch vector `(x, y, z)` of a qubit operator with `tr = 1`.
pub fn bloch(rho: &HermitianOperator) -> [f64; 3] {
    let m = rho.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]
}

/// Minimum of `p0 (1 − tr ρ0 T) + (1 − p0) tr ρ1 T` over qubit tests
/// `T = a I + b n·σ`, with `n` on a `k x k` grid of the sphere. For fixed
/// `n` the objective is linear in `(a, b)` over the square with vertices
/// `(0,0), (1,0), (1/2, ±1/2)`, so checking the vertices is exact.
pub fn qubit_grid_bayes_error(rho0: &HermitianOperator, rho1: &HermitianOperator, p0: f64, k: usize) -> f64 {
    let r0 = bloch(rho0);
    let r1 = bloch(rho1);
    let mut best = f64::INFINITY;
    for i in 0..k {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
        for j in 0..k {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let dot = |r: [f64; 3]| r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
            let (d0, d1) = (dot(r0), dot(r1));
            for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (0.5, -0.5)] {
                let err = p0 * (1.0 - (a + b * d0)) + (1.0 - p0) * (a + b * d1);
                best = best.min(err);
            }
        }
    }
    best
}

/// `(1 − ‖p0 ρ0 − (1 − p0) ρ1‖_1) / 2` from the closed-form eigenvalues
/// `tr/2 ± sqrt(((a − d)/2)^2 + |b|^2)` of a 2x2 Hermitian matrix.
pub fn qubit_helstrom_closed_form(rho0: &HermitianOperator, rho1: &HermitianOperator, p0: f64) -> f64 {
    let m: DMatrix<Complex64> = rho0.matrix() * c(p0, 0.0) - rho1.matrix() * c(1.0 - p0, 0.0);
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let trace_norm = (mid + rad).abs() + (mid - rad).abs();
    0.5 * (1.0 - trace_norm)
}

/// A random test `0 ≤ T ≤ I`: `U diag(x) U^†` with `x` uniform in `[0,1]^d`.
pub fn random_test(rng: &mut QhtRng, d: usize) -> HermitianOperator {
    let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let u = random_unitary(rng, d);
    HermitianOperator::from_real_diagonal(&x).congruence(&u)
}

/// Random state of dimension `d` with a rank drawn from `1..=d`.
pub fn random_state(rng: &mut QhtRng, d: usize) -> DensityOperator {
    let rank = rng.random_range(1..=d);
    qht::random::random_density_with(rng, d, rank).unwrap()
}
