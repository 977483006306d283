//! Binary quantum hypothesis testing.
//!
//! A test is an effect `0 <= T <= I` that accepts `ρ0`. Its type-I error is
//! `ε_{1|0} = 1 − tr(ρ0 T)` and its type-II error is `ε_{0|1} = tr(ρ1 T)`.
//! Optimal tests are Neyman–Pearson tests built from the spectral projectors
//! of `ρ0 − t ρ1`, and the tradeoff `α_β(ρ0‖ρ1)` is the smallest type-I error
//! reachable with type-II error at most `β`.

use serde::Serialize;

use crate::error::{QhtError, Result};
use crate::operator::{
    DensityOperator, HermitianOperator, Projector, SpectralDecomposition, SpectralRegion,
};

/// Tolerance on `0 <= T <= I`.
pub const TOL_TEST: f64 = 1e-10;
/// Null-space traces below this count as an absent jump.
pub const TOL_NULL_TRACE: f64 = 1e-12;
pub const BISECTION_MAX_ITERS: usize = 200;
/// Bisection stops once the bracket is this narrow relative to its right end.
pub const BISECTION_REL_WIDTH: f64 = 1e-13;
const BRACKET_EXPANSIONS: usize = 64;

/// The accept-`ρ0` effect of a two-outcome measurement `{T, I − T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTest {
    effect: HermitianOperator,
}

impl BinaryTest {
    pub fn new(effect: HermitianOperator) -> Result<Self> {
        let s = effect.spectral()?;
        let max_eigenvalue = s.eigenvalues()[0];
        let min_eigenvalue = *s.eigenvalues().last().unwrap();
        if min_eigenvalue < -TOL_TEST || max_eigenvalue > 1.0 + TOL_TEST {
            return Err(QhtError::NotTest {
                min_eigenvalue,
                max_eigenvalue,
            });
        }
        Ok(BinaryTest { effect })
    }

    pub(crate) fn assume_valid(effect: HermitianOperator) -> Self {
        BinaryTest { effect }
    }

    pub fn effect(&self) -> &HermitianOperator {
        &self.effect
    }

    /// `I − T`.
    pub fn complement(&self) -> HermitianOperator {
        &HermitianOperator::identity(self.effect.dim()) - &self.effect
    }

    pub fn dim(&self) -> usize {
        self.effect.dim()
    }
}

/// Type-I and type-II errors of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPair {
    pub eps_1_given_0: f64,
    pub eps_0_given_1: f64,
}

/// `T = P^+_t + γ P^0_t` for the spectral projectors of `ρ0 − t ρ1`.
///
/// When `limiting` is set the test is the `t → ∞` limit: the projector onto
/// the kernel of `ρ1`, and `threshold` is infinite.
#[derive(Debug, Clone)]
pub struct NpTest {
    pub threshold: f64,
    pub null_mix: f64,
    pub test: BinaryTest,
    pub positive: Projector,
    pub negative: Projector,
    pub null: Projector,
    pub limiting: bool,
}

/// One point `(β, α_β)` of the tradeoff curve with its achieving test.
#[derive(Debug, Clone)]
pub struct AlphaCurvePoint {
    pub beta: f64,
    pub alpha: f64,
    pub witness: NpTest,
}

fn check_pair(rho0: &HermitianOperator, rho1: &HermitianOperator) -> Result<()> {
    rho1.check_dim(rho0.dim())
}

fn clamp_probability(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `ε_{1|0} = 1 − tr(ρ0 T)`, `ε_{0|1} = tr(ρ1 T)`.
pub fn error_pair(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    test: &BinaryTest,
) -> Result<ErrorPair> {
    check_pair(rho0, rho1)?;
    test.effect.check_dim(rho0.dim())?;
    Ok(ErrorPair {
        eps_1_given_0: clamp_probability(1.0 - rho0.inner(&test.effect)),
        eps_0_given_1: clamp_probability(rho1.inner(&test.effect)),
    })
}

fn likelihood_operator(rho0: &HermitianOperator, rho1: &HermitianOperator, t: f64) -> HermitianOperator {
    rho0 - &(rho1 * t)
}

fn np_from_spectral(s: &SpectralDecomposition, t: f64, gamma: f64) -> NpTest {
    let positive = s.projector(SpectralRegion::Positive);
    let negative = s.projector(SpectralRegion::Negative);
    let null = s.projector(SpectralRegion::Null);
    let gamma = if null.rank() == 0 { 0.0 } else { gamma };
    let effect = positive.as_operator() + &(null.as_operator() * gamma);
    NpTest {
        threshold: t,
        null_mix: gamma,
        test: BinaryTest::assume_valid(effect),
        positive,
        negative,
        null,
        limiting: false,
    }
}

/// Neyman–Pearson test `P^+_t + γ P^0_t` of `ρ0 − t ρ1`.
pub fn np_test(rho0: &DensityOperator, rho1: &DensityOperator, t: f64, gamma: f64) -> Result<NpTest> {
    check_pair(rho0, rho1)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(QhtError::InvalidArgument(format!("threshold must be finite and >= 0, got {t}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(QhtError::InvalidArgument(format!("null mixture must lie in [0, 1], got {gamma}")));
    }
    let s = likelihood_operator(rho0, rho1, t).spectral()?;
    Ok(np_from_spectral(&s, t, gamma))
}

/// `α_β(ρ0‖ρ1)`: the minimum type-I error over tests with type-II error at
/// most `β`, together with a Neyman–Pearson test attaining it.
///
/// The map `t ↦ tr(ρ1 P^+_t)` is a nonincreasing step function. Bisection
/// locates the step that crosses `β`; a Newton step then moves the threshold
/// onto the exact zero crossing of the switching eigenvalue, and the null
/// mixture `γ` spends the remaining budget. At `β = 0` the witness is the
/// limiting test onto the kernel of `ρ1`.
pub fn alpha_beta(rho0: &DensityOperator, rho1: &DensityOperator, beta: f64) -> Result<AlphaCurvePoint> {
    alpha_beta_operators(rho0, rho1, beta)
}

pub(crate) fn alpha_beta_operators(
    rho0: &HermitianOperator,
    rho1: &HermitianOperator,
    beta: f64,
) -> Result<AlphaCurvePoint> {
    check_pair(rho0, rho1)?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(QhtError::InvalidArgument(format!("beta must lie in [0, 1], got {beta}")));
    }
    let eval = |t: f64| -> Result<(SpectralDecomposition, f64)> {
        let s = likelihood_operator(rho0, rho1, t).spectral()?;
        let f = s.trace_in_region(SpectralRegion::Positive, rho1);
        Ok((s, f))
    };

    let s1 = rho1.spectral()?;
    // A test with tr(ρ1 T) = 0 lives on the kernel of ρ1. Rounding keeps
    // tr(ρ1 P^+_t) slightly positive, so the search below would not end.
    if beta == 0.0 {
        return Ok(finish(rho0, beta, limiting_test(&s1)));
    }

    let (s0, f0) = eval(0.0)?;
    if f0 <= beta {
        let gamma = mixture(&s0, rho1, f0, beta);
        return Ok(finish(rho0, beta, np_from_spectral(&s0, 0.0, gamma)));
    }

    let tol1 = s1.tol_zero();
    let min_nonzero = s1
        .eigenvalues()
        .iter()
        .copied()
        .filter(|&x| x > tol1)
        .fold(f64::INFINITY, f64::min);
    let max0 = rho0.max_eigenvalue()?.max(0.0);
    let t_max = if min_nonzero.is_finite() {
        max0 / min_nonzero * rho0.dim() as f64 + 1.0
    } else {
        1.0
    };

    let mut hi = t_max;
    let mut f_hi = eval(hi)?.1;
    let mut expansions = 0;
    while f_hi > beta {
        if expansions == BRACKET_EXPANSIONS {
            return Ok(finish(rho0, beta, limiting_test(&s1)));
        }
        hi *= 2.0;
        f_hi = eval(hi)?.1;
        expansions += 1;
    }

    let mut lo = 0.0;
    let mut f_lo = f0;
    let mut iterations = 0;
    while hi - lo > BISECTION_REL_WIDTH * hi {
        if iterations == BISECTION_MAX_ITERS {
            return Err(QhtError::BisectionFailure {
                iterations,
                lower: lo,
                upper: hi,
                lower_trace: f_lo,
                upper_trace: f_hi,
                target: beta,
            });
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?.1;
        if f_mid > beta {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
    }

    let (s_hi, f_hi) = eval(hi)?;
    let (t, s, f) = refine_breakpoint(&eval, hi, s_hi, f_hi, rho1, beta)?;
    let gamma = mixture(&s, rho1, f, beta);
    let point = finish(rho0, beta, np_from_spectral(&s, t, gamma));
    // For large t the zero band of ρ0 − tρ1 widens with t and can swallow
    // the kernel of ρ1; accepting that kernel outright is always feasible.
    let limit = finish(rho0, beta, limiting_test(&s1));
    Ok(if limit.alpha < point.alpha { limit } else { point })
}

/// `γ = (β − tr(ρ1 P^+)) / tr(ρ1 P^0)`, clamped to `[0, 1]`; zero when the
/// null trace is negligible.
fn mixture(s: &SpectralDecomposition, rho1: &HermitianOperator, f_pos: f64, beta: f64) -> f64 {
    let null_trace = s.trace_in_region(SpectralRegion::Null, rho1);
    if null_trace > TOL_NULL_TRACE {
        ((beta - f_pos) / null_trace).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// At the right end of the final bracket the switching eigenvalue sits just
/// inside the zero band. One Newton step along `dλ/dt = −<v|ρ1|v>` moves the
/// threshold to where it vanishes; the step is kept only if the refined
/// projectors still bracket `β`.
fn refine_breakpoint(
    eval: &impl Fn(f64) -> Result<(SpectralDecomposition, f64)>,
    t_hi: f64,
    s_hi: SpectralDecomposition,
    f_hi: f64,
    rho1: &HermitianOperator,
    beta: f64,
) -> Result<(f64, SpectralDecomposition, f64)> {
    let null = s_hi.region_indices(SpectralRegion::Null);
    let switching = null
        .iter()
        .copied()
        .map(|i| (s_hi.eigenvalues()[i], s_hi.expectation(i, rho1)))
        .filter(|&(_, slope)| slope > TOL_NULL_TRACE)
        .max_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((lambda, slope)) = switching {
        if lambda != 0.0 {
            let t_ref = t_hi + lambda / slope;
            if t_ref >= 0.0 {
                let (s_ref, f_ref) = eval(t_ref)?;
                let null_ref = s_ref.trace_in_region(SpectralRegion::Null, rho1);
                if f_ref <= beta && beta <= f_ref + null_ref + TOL_NULL_TRACE {
                    return Ok((t_ref, s_ref, f_ref));
                }
            }
        }
    }
    Ok((t_hi, s_hi, f_hi))
}

/// `t → ∞`: accept exactly on the kernel of `ρ1`.
fn limiting_test(s1: &SpectralDecomposition) -> NpTest {
    let kernel = s1.projector(SpectralRegion::Null);
    let support = s1.projector(SpectralRegion::Positive);
    NpTest {
        threshold: f64::INFINITY,
        null_mix: 0.0,
        test: BinaryTest::assume_valid(kernel.as_operator().clone()),
        positive: kernel,
        negative: support,
        null: s1.projector_of(&[]),
        limiting: true,
    }
}

fn finish(rho0: &HermitianOperator, beta: f64, witness: NpTest) -> AlphaCurvePoint {
    let alpha = clamp_probability(1.0 - rho0.inner(witness.test.effect()));
    AlphaCurvePoint { beta, alpha, witness }
}

/// Lower bound `tr(ρ0 (P^-_{t'} + P^0_{t'})) − t' β` on `α_β(ρ0‖ρ1)`, valid
/// for every `t' >= 0`. It may be negative.
pub fn threshold_lower_bound(rho0: &DensityOperator, rho1: &DensityOperator, beta: f64, t_prime: f64) -> Result<f64> {
    check_pair(rho0, rho1)?;
    if !(t_prime >= 0.0 && t_prime.is_finite()) {
        return Err(QhtError::InvalidArgument(format!("t' must be finite and >= 0, got {t_prime}")));
    }
    let s = likelihood_operator(rho0, rho1, t_prime).spectral()?;
    Ok(s.trace_in_region(SpectralRegion::NonPositive, rho0) - t_prime * beta)
}

/// Bayes error of the best two-outcome test with prior `p0` on `ρ0`:
/// `p0 − tr(A {A > 0})` for `A = p0 ρ0 − (1 − p0) ρ1`.
pub fn helstrom(rho0: &DensityOperator, rho1: &DensityOperator, p0: f64) -> Result<f64> {
    check_pair(rho0, rho1)?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(QhtError::InvalidArgument(format!("prior must lie in [0, 1], got {p0}")));
    }
    let a = &(rho0.as_operator() * p0) - &(rho1.as_operator() * (1.0 - p0));
    let s = a.spectral()?;
    let positive_part: f64 = s.eigenvalues().iter().filter(|&&x| x > 0.0).sum();
    Ok(clamp_probability(p0 - positive_part))
}
