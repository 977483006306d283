//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry with a diagonal
//! unitary and then applies a real Givens rotation, so the iterate stays
//! Hermitian with a real diagonal. Dimensions here are small (tens), where
//! Jacobi is accurate to working precision and simple to verify.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QhtError, Result};

pub(crate) const MAX_SWEEPS: usize = 100;

/// Raw eigenpairs: eigenvalues in descending order, eigenvectors as the
/// matching columns of a unitary matrix.
#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

fn off_diagonal_norm(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub(crate) fn jacobi_eigen(input: &DMatrix<Complex64>) -> Result<Eigenpairs> {
    let n = input.nrows();
    let mut a = input.clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 1 && scale > 0.0 {
        let target = f64::EPSILON * scale;
        // Once below this level, a sweep that fails to halve the residual has
        // hit the rounding floor.
        let floor = 1e-12 * scale;
        let mut previous = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            if off <= target || (off <= floor && off > 0.5 * previous) {
                converged = true;
                break;
            }
            previous = off;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged {
            let residual = off_diagonal_norm(&a);
            if residual > floor {
                return Err(QhtError::EigenNoConvergence {
                    sweeps: MAX_SWEEPS,
                    residual,
                });
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigenpairs { values, vectors })
}

/// Annihilates the (p, q) entry of `a` and accumulates the rotation in `v`.
fn rotate(a: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    // theta^2 overflows for tiny pivots; the rotation is then t ~ 1/(2 theta).
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();
    let n = a.nrows();

    // Columns: A <- A J, J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    for k in 0..n {
        let xp = a[(k, p)];
        let xq = a[(k, q)];
        a[(k, p)] = xp * c - xq * ph_conj * s;
        a[(k, q)] = xp * s + xq * ph_conj * c;
    }
    // Rows: A <- J^H A.
    for k in 0..n {
        let xp = a[(p, k)];
        let xq = a[(q, k)];
        a[(p, k)] = xp * c - xq * phase * s;
        a[(q, k)] = xp * s + xq * phase * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let xp = v[(k, p)];
        let xq = v[(k, q)];
        v[(k, p)] = xp * c - xq * ph_conj * s;
        v[(k, q)] = xp * s + xq * ph_conj * c;
    }
}
