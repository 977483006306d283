//! Seeded random instances: Ginibre density operators, Haar unitaries and
//! random priors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{QhtError, Result};
use crate::operator::{CMatrix, DensityOperator, HermitianOperator};
use num_complex::Complex64;

/// The generator used everywhere a seed is accepted.
pub type QhtRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> QhtRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `dim x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(dim, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// `G G^† / tr(G G^†)` with `G` of shape `dim x rank`.
pub fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> Result<DensityOperator> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(QhtError::InvalidArgument(format!(
            "rank must satisfy 1 <= rank <= dim, got rank {rank} for dim {dim}"
        )));
    }
    let g = ginibre(rng, dim, rank);
    let w = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| w[(i, i)].re).sum();
    let op = HermitianOperator::symmetrized(w / Complex64::new(tr, 0.0));
    DensityOperator::new(op)
}

/// Deterministic Ginibre state for a seed.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(&mut rng_from_seed(seed), dim, rank)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Priors drawn uniformly from the probability simplex.
pub fn random_priors<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..count)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}
