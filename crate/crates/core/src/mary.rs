//! Minimum-error discrimination among `M` quantum states.
//!
//! The average error of a POVM `{Π_m}` on the ensemble `{p_m, τ_m}` is
//! `1 − Σ p_m tr(τ_m Π_m)`. The solver returns a POVM together with a dual
//! certificate: with `Λ = Σ p_m τ_m Π_m` and `Λ_h` its Hermitian part, the
//! operator `Y = Λ_h + δ I`, `δ = max(0, max_m λ_max(p_m τ_m − Λ_h))`, is
//! dual feasible (`Y ⪰ p_m τ_m`), so `1 − tr(Y)` is a lower bound on the
//! minimum error. Their difference is the reported gap.
//!
//! The module also evaluates the two exact reformulations of the minimum
//! error: the type-I error `α_{1/M}` of a binary test between the block
//! operators `diag(p_1 τ_1, …, p_M τ_M)` and `diag(μ0/M, …, μ0/M)`, and the
//! information-spectrum objective `Σ p_i tr(τ_i {p_i τ_i − t μ0 ≤ 0}) − t`.
//! Both are at most the minimum error for every state `μ0` and attain it at
//! `μ0★ = Λ_h / tr(Λ_h)` (with `t = tr(Λ_h)` for the second).

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::binary::{alpha_beta_operators, AlphaCurvePoint};
use crate::error::{QhtError, Result};
use crate::operator::{
    block_diag, c64, CMatrix, DensityOperator, HermitianOperator, SpectralRegion,
};
use crate::random::{ginibre, random_density_with, random_priors, rng_from_seed, QhtRng};
#[cfg(test)]
use crate::random::random_density;

/// Priors must sum to one within this tolerance.
pub const TOL_PRIORS: f64 = 1e-12;
/// POVM effects may dip this far below zero.
pub const TOL_POVM_PSD: f64 = 1e-10;
/// `‖Σ Π_m − I‖_F` allowed for a POVM.
pub const TOL_POVM_SUM: f64 = 1e-9;

/// Prior probabilities and states of an `M`-ary hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if states.is_empty() {
            return Err(QhtError::InvalidEnsemble("at least one state is required".into()));
        }
        if priors.len() != states.len() {
            return Err(QhtError::InvalidEnsemble(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        if let Some((i, p)) = priors.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(QhtError::InvalidEnsemble(format!("prior {i} is {p}")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > TOL_PRIORS {
            return Err(QhtError::InvalidEnsemble(format!("priors sum to {total}")));
        }
        let d = states[0].dim();
        for (i, s) in states.iter().enumerate() {
            s.check_dim(d).map_err(|e| e.at(format!("states[{i}]")))?;
        }
        Ok(Ensemble { priors, states })
    }

    /// Equal priors `1/M`.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let m = states.len().max(1);
        Self::new(vec![1.0 / m as f64; states.len()], states)
    }

    /// Random priors from the simplex and Ginibre states. With `rank = None`
    /// each state gets a rank drawn uniformly from `1..=dim`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize, rank: Option<usize>) -> Result<Self> {
        if count == 0 {
            return Err(QhtError::InvalidArgument("ensemble needs at least one state".into()));
        }
        let priors = random_priors(rng, count);
        let states = (0..count)
            .map(|_| {
                let r = rank.unwrap_or_else(|| rng.random_range(1..=dim));
                random_density_with(rng, dim, r)
            })
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = priors.iter().sum();
        Self::new(priors.iter().map(|p| p / total).collect(), states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// `p_m τ_m`.
    pub fn weighted(&self, m: usize) -> HermitianOperator {
        self.states[m].as_operator() * self.priors[m]
    }

    /// Reorders hypotheses: entry `k` of the result is hypothesis `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            perm.iter().map(|&i| self.priors[i]).collect(),
            perm.iter().map(|&i| self.states[i].clone()).collect(),
        )
    }

    /// Applies `τ ↦ V τ V^†` for an isometry `V` (`D x d`, `V^† V = I`).
    pub fn embedded(&self, isometry: &CMatrix) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| DensityOperator::new(s.congruence(isometry)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.priors.clone(), states)
    }
}

/// A measurement `{Π_1, …, Π_M}` with `Π_m ⪰ 0` and `Σ Π_m = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        if effects.is_empty() {
            return Err(QhtError::NotPovm { reason: "no effects".into() });
        }
        let d = effects[0].dim();
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in effects.iter().enumerate() {
            e.check_dim(d).map_err(|err| err.at(format!("effects[{i}]")))?;
            let min = e.min_eigenvalue()?;
            if min < -TOL_POVM_PSD {
                return Err(QhtError::NotPovm {
                    reason: format!("effect {i} has eigenvalue {min:e}"),
                });
            }
            sum += e.matrix();
        }
        let dev = (sum - CMatrix::identity(d, d)).norm();
        if dev > TOL_POVM_SUM {
            return Err(QhtError::NotPovm {
                reason: format!("effects sum to identity only within {dev:e}"),
            });
        }
        Ok(Povm { effects })
    }

    pub(crate) fn assume_valid(effects: Vec<HermitianOperator>) -> Self {
        Povm { effects }
    }

    /// Every effect `I/M`.
    pub fn uniform(m: usize, dim: usize) -> Self {
        Povm {
            effects: vec![&HermitianOperator::identity(dim) * (1.0 / m as f64); m],
        }
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Effect `k` of the result is effect `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Povm {
            effects: perm.iter().map(|&i| self.effects[i].clone()).collect(),
        }
    }
}

fn check_povm(ensemble: &Ensemble, povm: &Povm) -> Result<()> {
    if povm.len() != ensemble.len() {
        return Err(QhtError::DimensionMismatch {
            expected: ensemble.len(),
            found: povm.len(),
        });
    }
    povm.effects[0].check_dim(ensemble.dim())
}

/// `1 − Σ p_i tr(τ_i Π_i)`, clamped to `[0, 1]`.
pub fn average_error(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    check_povm(ensemble, povm)?;
    Ok(raw_error(ensemble, povm).clamp(0.0, 1.0))
}

fn raw_error(ensemble: &Ensemble, povm: &Povm) -> f64 {
    let success: f64 = (0..ensemble.len())
        .map(|i| ensemble.priors[i] * ensemble.states[i].inner(&povm.effects[i]))
        .sum();
    1.0 - success
}

/// `Λ(𝒫) = Σ p_i τ_i Π_i`, which is Hermitian only at optimal POVMs.
pub fn lagrange_operator(ensemble: &Ensemble, povm: &Povm) -> Result<CMatrix> {
    check_povm(ensemble, povm)?;
    Ok(lagrange_raw(ensemble, povm))
}

fn lagrange_raw(ensemble: &Ensemble, povm: &Povm) -> CMatrix {
    let d = ensemble.dim();
    let mut lambda = CMatrix::zeros(d, d);
    for i in 0..ensemble.len() {
        if ensemble.priors[i] != 0.0 {
            lambda += ensemble.states[i].matrix() * povm.effects[i].matrix() * c64(ensemble.priors[i]);
        }
    }
    lambda
}

/// Feasible dual point built from a POVM.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    /// `Λ_h = (Λ + Λ^†)/2`.
    pub lambda: HermitianOperator,
    /// `‖Λ − Λ^†‖_F`.
    pub skew: f64,
    /// `δ = max(0, max_m λ_max(p_m τ_m − Λ_h))`.
    pub shift: f64,
    /// `Y = Λ_h + δ I`.
    pub y: HermitianOperator,
    /// `1 − tr(Y)`.
    pub bound: f64,
    /// Average error of the POVM.
    pub epsilon: f64,
    /// `max(0, ε − bound)`.
    pub gap: f64,
    /// `max_m max(‖(Λ_h − p_m τ_m) Π_m‖_F, max(0, −λ_min(Λ_h − p_m τ_m))) + ‖Λ − Λ^†‖_F`.
    pub holevo_residual: f64,
}

pub fn dual_certificate(ensemble: &Ensemble, povm: &Povm) -> Result<DualCertificate> {
    check_povm(ensemble, povm)?;
    certificate_raw(ensemble, povm)
}

fn certificate_raw(ensemble: &Ensemble, povm: &Povm) -> Result<DualCertificate> {
    let d = ensemble.dim();
    let raw = lagrange_raw(ensemble, povm);
    let skew = (&raw - raw.adjoint()).norm();
    let lambda = HermitianOperator::symmetrized(raw);
    let mut shift: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for m in 0..ensemble.len() {
        let diff = &lambda - &ensemble.weighted(m);
        let violation = (-diff.min_eigenvalue()?).max(0.0);
        shift = shift.max(violation);
        let slack = (diff.matrix() * povm.effects[m].matrix()).norm();
        residual = residual.max(slack.max(violation));
    }
    let y = &lambda + &(&HermitianOperator::identity(d) * shift);
    let bound = 1.0 - y.trace();
    let epsilon = raw_error(ensemble, povm).clamp(0.0, 1.0);
    Ok(DualCertificate {
        lambda,
        skew,
        shift,
        y,
        bound,
        epsilon,
        gap: (epsilon - bound).max(0.0),
        holevo_residual: residual + skew,
    })
}

/// Distance of a POVM from the Holevo–Yuen–Kennedy–Lax optimality
/// conditions; zero exactly at optimal POVMs.
pub fn check_holevo_conditions(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    Ok(dual_certificate(ensemble, povm)?.holevo_residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Certification threshold on `ε − dual_bound`.
    pub tol_gap: f64,
    /// Iteration also continues until the optimality residual is below
    /// this. The residual shrinks only like the square root of the gap, so
    /// a small gap alone does not make it small.
    pub tol_residual: f64,
    /// Fixed-point iterations per start.
    pub max_iters: usize,
    /// Random restarts of the fixed-point iteration after the first start.
    pub restarts: usize,
    /// Seed for restart initializations.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_gap: 1e-8,
            tol_residual: 1e-7,
            max_iters: 5000,
            restarts: 5,
            seed: 0,
        }
    }
}

/// How the returned POVM was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStage {
    FixedPoint { start: usize },
    Barrier,
}

#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    pub epsilon: f64,
    pub povm: Povm,
    /// Hermitian part of `Λ(𝒫)`.
    pub lambda: HermitianOperator,
    /// `Λ_h / c0★`.
    pub mu0_star: DensityOperator,
    /// `tr(Λ_h) = 1 − ε`.
    pub c0_star: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub holevo_residual: f64,
    pub certified: bool,
    pub iterations: usize,
    pub stage: SolverStage,
}

impl DiscriminationResult {
    fn from_certificate(
        povm: Povm,
        cert: DualCertificate,
        tol_gap: f64,
        iterations: usize,
        stage: SolverStage,
    ) -> Result<Self> {
        let c0_star = cert.lambda.trace();
        let scaled = &cert.lambda * (1.0 / c0_star);
        let mu0_star = match DensityOperator::new(scaled.clone()) {
            Ok(mu) => mu,
            // Only far from optimality can Λ_h fail to be positive.
            Err(_) => DensityOperator::nearest(&scaled)?,
        };
        Ok(DiscriminationResult {
            epsilon: cert.epsilon,
            povm,
            lambda: cert.lambda,
            mu0_star,
            c0_star,
            dual_bound: cert.bound,
            gap: cert.gap,
            holevo_residual: cert.holevo_residual,
            certified: cert.gap <= tol_gap,
            iterations,
            stage,
        })
    }
}

/// Minimum-error POVM with a duality-gap certificate.
///
/// The fixed-point iteration `Π_m ← S^{-1/2} (p_m τ_m Π_m p_m τ_m) S^{-1/2}`,
/// `S = Σ_j p_j τ_j Π_j p_j τ_j`, starts from `Π_m = I/M`. If it has not
/// certified within `max_iters`, a log-barrier Newton method on the dual
/// `min tr(Y)` s.t. `Y ⪰ p_m τ_m` produces a central-path POVM, and after
/// that the fixed-point iteration is restarted from random POVMs. Among
/// certified candidates the lowest error wins (earlier stage on ties); if
/// none certifies, the smallest gap is returned with `certified = false`.
pub fn solve_min_error(ensemble: &Ensemble, options: &SolverOptions) -> Result<DiscriminationResult> {
    if !(options.tol_gap > 0.0 && options.tol_residual > 0.0) {
        return Err(QhtError::InvalidArgument("tol_gap and tol_residual must be positive".into()));
    }
    if ensemble.len() == 1 {
        let povm = Povm::assume_valid(vec![HermitianOperator::identity(ensemble.dim())]);
        let cert = certificate_raw(ensemble, &povm)?;
        return DiscriminationResult::from_certificate(povm, cert, options.tol_gap, 0, SolverStage::FixedPoint { start: 0 });
    }

    // Keep iterating somewhat past the certification threshold so that
    // downstream spectral checks see a cleanly feasible Λ.
    let target = Target {
        gap: options.tol_gap * 1e-3,
        residual: options.tol_residual,
    };
    let mut candidates: Vec<DiscriminationResult> = Vec::new();

    let start = Povm::uniform(ensemble.len(), ensemble.dim());
    let first = fixed_point(ensemble, start, options, target, SolverStage::FixedPoint { start: 0 })?;
    let done = target.reached(first.gap, first.holevo_residual);
    candidates.push(first);

    if !done {
        let barrier = barrier_solve(ensemble, options, target)?;
        let done = target.reached(barrier.gap, barrier.holevo_residual);
        candidates.push(barrier);
        if !done && !candidates.iter().any(|c| c.certified) {
            let mut rng = rng_from_seed(options.seed);
            for k in 1..=options.restarts {
                let init = random_povm(&mut rng, ensemble.len(), ensemble.dim())?;
                let r = fixed_point(ensemble, init, options, target, SolverStage::FixedPoint { start: k })?;
                let certified = r.certified;
                candidates.push(r);
                if certified {
                    break;
                }
            }
        }
    }
    Ok(select_best(candidates))
}

fn select_best(candidates: Vec<DiscriminationResult>) -> DiscriminationResult {
    let any_certified = candidates.iter().any(|c| c.certified);
    let mut best: Option<DiscriminationResult> = None;
    for c in candidates {
        if any_certified && !c.certified {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) if any_certified => c.epsilon < b.epsilon,
            Some(b) => c.gap < b.gap,
        };
        if better {
            best = Some(c);
        }
    }
    best.expect("at least one candidate")
}

fn random_povm(rng: &mut QhtRng, m: usize, d: usize) -> Result<Povm> {
    let raw: Vec<CMatrix> = (0..m)
        .map(|_| {
            let g = ginibre(rng, d, d);
            &g * g.adjoint()
        })
        .collect();
    normalize_effects(raw)
}

/// `Π_m ← S^{-1/2} A_m S^{-1/2}` with `S = Σ A_m`; directions outside the
/// support of `S` are shared equally so that the effects sum to `I`.
fn normalize_effects(raw: Vec<CMatrix>) -> Result<Povm> {
    let m = raw.len();
    let d = raw[0].nrows();
    let mut sum = CMatrix::zeros(d, d);
    for a in &raw {
        sum += a;
    }
    let s = HermitianOperator::symmetrized(sum).spectral()?;
    let cutoff = 1e-14 * s.eigenvalues()[0].max(f64::MIN_POSITIVE);
    let inv_sqrt = s.map(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 });
    let dropped: Vec<usize> = (0..d).filter(|&i| s.eigenvalues()[i] <= cutoff).collect();
    let completion = &s.span_projector(&dropped) * (1.0 / m as f64);
    let effects = raw
        .into_iter()
        .map(|a| {
            let e = HermitianOperator::symmetrized(a).congruence(inv_sqrt.matrix());
            let e = if dropped.is_empty() { e } else { &e + &completion };
            // S^{-1/2} magnifies rounding along small eigenvalues of S.
            e.map_spectrum(|x| x.max(0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = CMatrix::zeros(d, d);
    for e in &effects {
        total += e.matrix();
    }
    let correction = HermitianOperator::symmetrized(total).map_spectrum(|x| 1.0 / x.sqrt())?;
    Ok(Povm::assume_valid(
        effects.iter().map(|e| e.congruence(correction.matrix())).collect(),
    ))
}

const CHECK_EVERY: usize = 10;

/// Internal stopping levels for the gap and the optimality residual.
#[derive(Debug, Clone, Copy)]
struct Target {
    gap: f64,
    residual: f64,
}

impl Target {
    /// At most 1 once both levels are met; smaller is better.
    fn score(&self, gap: f64, residual: f64) -> f64 {
        (gap / self.gap).max(residual / self.residual)
    }

    fn reached(&self, gap: f64, residual: f64) -> bool {
        self.score(gap, residual) <= 1.0
    }
}

fn fixed_point(
    ensemble: &Ensemble,
    init: Povm,
    options: &SolverOptions,
    target: Target,
    stage: SolverStage,
) -> Result<DiscriminationResult> {
    let weighted: Vec<HermitianOperator> = (0..ensemble.len()).map(|m| ensemble.weighted(m)).collect();
    let mut povm = init;
    let mut best_score = f64::INFINITY;
    let mut best: Option<(Povm, DualCertificate, usize)> = None;
    for iter in 0..=options.max_iters {
        if iter % CHECK_EVERY == 0 || iter == options.max_iters {
            let cert = certificate_raw(ensemble, &povm)?;
            let score = target.score(cert.gap, cert.holevo_residual);
            if score < best_score {
                best_score = score;
                best = Some((povm.clone(), cert, iter));
            }
            if best_score <= 1.0 || iter == options.max_iters {
                break;
            }
        }
        let raw: Vec<CMatrix> = weighted
            .iter()
            .zip(&povm.effects)
            .map(|(r, p)| r.matrix() * p.matrix() * r.matrix())
            .collect();
        povm = normalize_effects(raw)?;
    }
    let (povm, cert, iterations) = best.expect("certificate evaluated at iteration 0");
    DiscriminationResult::from_certificate(povm, cert, options.tol_gap, iterations, stage)
}

// ---------------------------------------------------------------------------
// Dual log-barrier method.
//
// Minimizes tr(Y) − μ Σ_m log det(Y − R_m) over Hermitian Y for a decreasing
// sequence of μ. On the central path Π_m = μ (Y − R_m)^{-1} sums to I, and
// Σ_m tr(Π_m (Y − R_m)) = M d μ bounds the duality gap.

/// Real coordinates of a Hermitian matrix in an orthonormal basis.
fn herm_coords(a: &CMatrix) -> DVector<f64> {
    let d = a.nrows();
    let mut v = DVector::zeros(d * d);
    let mut k = 0;
    for i in 0..d {
        v[k] = a[(i, i)].re;
        k += 1;
    }
    let r2 = std::f64::consts::SQRT_2;
    for j in 0..d {
        for i in 0..j {
            v[k] = r2 * a[(i, j)].re;
            v[k + 1] = r2 * a[(i, j)].im;
            k += 2;
        }
    }
    v
}

fn herm_from_coords(v: &DVector<f64>, d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        a[(i, i)] = c64(v[k]);
        k += 1;
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for i in 0..j {
            let z = num_complex::Complex64::new(h * v[k], h * v[k + 1]);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            k += 2;
        }
    }
    a
}

/// `(Z^{-1}, log det Z)` if `Z` is positive definite.
/// Inverse and log-determinant of a Hermitian positive definite matrix, or
/// `None` if a Cholesky pivot is not strictly positive. (nalgebra's complex
/// Cholesky takes complex square roots and so accepts indefinite input.)
fn inverse_logdet(z: &CMatrix) -> Option<(CMatrix, f64)> {
    let n = z.nrows();
    let mut l = CMatrix::zeros(n, n);
    let mut logdet = 0.0;
    for j in 0..n {
        let mut pivot = z[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) {
            return None;
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = c64(ljj);
        logdet += 2.0 * ljj.ln();
        for i in j + 1..n {
            let mut x = z[(i, j)];
            for k in 0..j {
                x -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = x / ljj;
        }
    }
    // L^{-1} by forward substitution, then Z^{-1} = L^{-†} L^{-1}.
    let mut linv = CMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut x = if i == c { c64(1.0) } else { c64(0.0) };
            for k in c..i {
                x -= l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = x / l[(i, i)].re;
        }
    }
    let inv = linv.adjoint() * &linv;
    Some((HermitianOperator::symmetrized(inv).into_matrix(), logdet))
}

struct BarrierPoint {
    inverses: Vec<CMatrix>,
    value: f64,
}

fn barrier_eval(y: &CMatrix, weighted: &[CMatrix], mu: f64) -> Option<BarrierPoint> {
    let mut inverses = Vec::with_capacity(weighted.len());
    let mut logdet = 0.0;
    for r in weighted {
        let (inv, ld) = inverse_logdet(&(y - r))?;
        inverses.push(inv);
        logdet += ld;
    }
    let trace: f64 = (0..y.nrows()).map(|i| y[(i, i)].re).sum();
    Some(BarrierPoint {
        inverses,
        value: trace - mu * logdet,
    })
}

const BARRIER_MU_START: f64 = 1.0;
const BARRIER_MU_FACTOR: f64 = 0.1;
const BARRIER_MU_FLOOR: f64 = 1e-14;
const NEWTON_MAX_STEPS: usize = 80;

fn barrier_solve(ensemble: &Ensemble, options: &SolverOptions, target: Target) -> Result<DiscriminationResult> {
    let d = ensemble.dim();
    let m = ensemble.len();
    let n = d * d;
    let weighted: Vec<CMatrix> = (0..m).map(|i| ensemble.weighted(i).into_matrix()).collect();
    let top = (0..m)
        .map(|i| ensemble.weighted(i).max_eigenvalue())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    let mut y = CMatrix::identity(d, d) * c64(top + 1.0);
    let basis: Vec<CMatrix> = (0..n)
        .map(|a| {
            let mut e = DVector::zeros(n);
            e[a] = 1.0;
            herm_from_coords(&e, d)
        })
        .collect();

    let mut mu = BARRIER_MU_START;
    let mut steps = 0;
    let mut best: Option<DiscriminationResult> = None;
    loop {
        let mut point = barrier_eval(&y, &weighted, mu).ok_or_else(|| {
            QhtError::InvalidArgument("barrier iterate left the feasible region".into())
        })?;
        for _ in 0..NEWTON_MAX_STEPS {
            let mut grad_op = CMatrix::identity(d, d);
            for inv in &point.inverses {
                grad_op -= inv * c64(mu);
            }
            let g = herm_coords(&grad_op);
            let mut h = DMatrix::<f64>::zeros(n, n);
            for (a, ba) in basis.iter().enumerate() {
                let mut col = CMatrix::zeros(d, d);
                for inv in &point.inverses {
                    col += inv * ba * inv;
                }
                let hc = herm_coords(&col) * mu;
                h.set_column(a, &hc);
            }
            let h = (&h + h.transpose()) * 0.5;
            let step = match Cholesky::new(h.clone()) {
                Some(ch) => ch.solve(&(-&g)),
                None => match h.clone().lu().solve(&(-&g)) {
                    Some(s) => s,
                    None => break,
                },
            };
            let decrement = -g.dot(&step);
            steps += 1;
            if !(decrement > 1e-14 * mu) {
                break;
            }
            let dy = herm_from_coords(&step, d);
            let mut s = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial = &y + &dy * c64(s);
                if let Some(p) = barrier_eval(&trial, &weighted, mu) {
                    if p.value <= point.value - 0.25 * s * decrement {
                        accepted = Some((trial, p));
                        break;
                    }
                }
                s *= 0.5;
            }
            match accepted {
                Some((trial, p)) => {
                    y = trial;
                    point = p;
                }
                None => break,
            }
        }

        let raw: Vec<CMatrix> = point.inverses.iter().map(|inv| inv * c64(mu)).collect();
        let povm = normalize_effects(raw)?;
        let cert = certificate_raw(ensemble, &povm)?;
        let candidate = DiscriminationResult::from_certificate(povm, cert, options.tol_gap, steps, SolverStage::Barrier)?;
        let score = target.score(candidate.gap, candidate.holevo_residual);
        let improved = best
            .as_ref()
            .is_none_or(|b| score < target.score(b.gap, b.holevo_residual));
        let reached = score <= 1.0;
        if improved {
            best = Some(candidate);
        }
        if reached || mu <= BARRIER_MU_FLOOR || (!improved && mu < 1e-9) {
            break;
        }
        mu *= BARRIER_MU_FACTOR;
    }
    Ok(best.expect("barrier produced at least one candidate"))
}

// ---------------------------------------------------------------------------
// Exact reformulations.

/// `diag(p_1 τ_1, …, p_M τ_M)`.
pub fn weighted_block_state(ensemble: &Ensemble) -> Result<DensityOperator> {
    let blocks: Vec<HermitianOperator> = (0..ensemble.len()).map(|m| ensemble.weighted(m)).collect();
    Ok(DensityOperator::assume_valid(block_diag(&blocks)?))
}

/// `diag(μ0/M, …, μ0/M)` with `M` blocks.
pub fn reference_block_state(mu0: &DensityOperator, m: usize) -> Result<DensityOperator> {
    let block = mu0.as_operator() * (1.0 / m as f64);
    Ok(DensityOperator::assume_valid(block_diag(&vec![block; m])?))
}

/// `α_{1/M}(diag(p_m τ_m) ‖ diag(μ0/M))`, a lower bound on the minimum
/// error for every `μ0`, equal to it at `μ0★`.
pub fn block_test_value(ensemble: &Ensemble, mu0: &DensityOperator) -> Result<AlphaCurvePoint> {
    mu0.check_dim(ensemble.dim())?;
    let m = ensemble.len();
    let tested = weighted_block_state(ensemble)?;
    let reference = reference_block_state(mu0, m)?;
    alpha_beta_operators(&tested, &reference, 1.0 / m as f64)
}

/// Information-spectrum objective at `(μ0, t)`.
#[derive(Debug, Clone)]
pub struct SpectrumObjective {
    pub mu0: DensityOperator,
    pub t: f64,
    pub value: f64,
    /// `tr {p_i τ_i − t μ0 ≤ 0}` for each hypothesis.
    pub projector_ranks: Vec<f64>,
}

/// `Σ_i p_i tr(τ_i {p_i τ_i − t μ0 ≤ 0}) − t`.
///
/// This `t` corresponds to `t'/M` in the channel-coding form of the same
/// objective.
pub fn spectrum_objective(ensemble: &Ensemble, mu0: &DensityOperator, t: f64) -> Result<SpectrumObjective> {
    mu0.check_dim(ensemble.dim())?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QhtError::InvalidArgument(format!("t must be finite and >= 0, got {t}")));
    }
    let reference = mu0.as_operator() * t;
    let mut value = -t;
    let mut projector_ranks = Vec::with_capacity(ensemble.len());
    for i in 0..ensemble.len() {
        let s = (&ensemble.weighted(i) - &reference).spectral()?;
        let idx = s.region_indices(SpectralRegion::NonPositive);
        projector_ranks.push(idx.len() as f64);
        let captured: f64 = idx.iter().map(|&k| s.expectation(k, &ensemble.states[i])).sum();
        value += ensemble.priors[i] * captured;
    }
    Ok(SpectrumObjective {
        mu0: mu0.clone(),
        t,
        value,
        projector_ranks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub solver: SolverOptions,
    /// Random `μ0` sampled to probe the lower-bound direction.
    pub samples: usize,
    /// Points of the `t`-grid for the information-spectrum objective.
    pub t_grid: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            solver: SolverOptions::default(),
            samples: 20,
            t_grid: 25,
            seed: 0,
        }
    }
}

/// Tolerances used to judge a verification report.
pub const TOL_REFORMULATION_DELTA: f64 = 1e-6;
pub const TOL_SAMPLED_EXCESS: f64 = 1e-8;
pub const TOL_DEGENERACY: f64 = 1e-8;
pub const TOL_HOLEVO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: Option<u64>,
    pub dim: usize,
    pub hypotheses: usize,
    pub epsilon: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub holevo_residual: f64,
    pub c0_star: f64,
    /// `|α_{1/M}(𝒯 ‖ 𝒟(μ0★)) − ε|`.
    pub block_test_delta: f64,
    /// `|objective(μ0★, c0★) − ε|`.
    pub spectrum_delta: f64,
    /// `max_i |tr {p_i τ_i − c0★ μ0★ ≤ 0} − d|`.
    pub degeneracy_deviation: f64,
    /// Largest `value − ε` over sampled `μ0` (both expressions) and the
    /// `t`-grid; nonpositive up to rounding.
    pub sampled_max_excess: f64,
    pub certified: bool,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl VerificationReport {
    /// Certified and every check within tolerance.
    pub fn passed(&self) -> bool {
        self.certified
            && self.holevo_residual <= TOL_HOLEVO
            && self.block_test_delta <= TOL_REFORMULATION_DELTA
            && self.spectrum_delta <= TOL_REFORMULATION_DELTA
            && self.degeneracy_deviation <= TOL_DEGENERACY
            && self.sampled_max_excess <= TOL_SAMPLED_EXCESS
    }
}

/// Solves the ensemble, then checks both reformulations at `μ0★` and their
/// lower-bound direction at random `μ0` and a `t`-grid.
pub fn verify_reformulations(ensemble: &Ensemble, options: &VerifyOptions) -> Result<VerificationReport> {
    let started = Instant::now();
    let result = solve_min_error(ensemble, &options.solver)?;
    let eps = result.epsilon;
    let d = ensemble.dim();

    let t1 = block_test_value(ensemble, &result.mu0_star)?;
    let t2 = spectrum_objective(ensemble, &result.mu0_star, result.c0_star)?;
    let degeneracy = t2
        .projector_ranks
        .iter()
        .map(|r| (r - d as f64).abs())
        .fold(0.0f64, f64::max);

    // A separate stream, so that an instance generated from the same seed
    // does not share its draws with the sampled references.
    let mut rng = rng_from_seed(options.seed);
    rng.set_stream(1);
    let mut excess = f64::NEG_INFINITY;
    let grid: Vec<f64> = (1..=options.t_grid)
        .map(|k| 2.0 * result.c0_star * k as f64 / options.t_grid as f64)
        .collect();
    for &t in &grid {
        excess = excess.max(spectrum_objective(ensemble, &result.mu0_star, t)?.value - eps);
    }
    for _ in 0..options.samples {
        let rank = rng.random_range(1..=d);
        let mu0 = random_density_with(&mut rng, d, rank)?;
        excess = excess.max(block_test_value(ensemble, &mu0)?.alpha - eps);
        for &t in &grid {
            excess = excess.max(spectrum_objective(ensemble, &mu0, t)?.value - eps);
        }
    }

    Ok(VerificationReport {
        seed: None,
        dim: d,
        hypotheses: ensemble.len(),
        epsilon: eps,
        dual_bound: result.dual_bound,
        gap: result.gap,
        holevo_residual: result.holevo_residual,
        c0_star: result.c0_star,
        block_test_delta: (t1.alpha - eps).abs(),
        spectrum_delta: (t2.value - eps).abs(),
        degeneracy_deviation: degeneracy,
        sampled_max_excess: excess,
        certified: result.certified,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
