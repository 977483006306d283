//! One-shot classical-quantum channel coding.
//!
//! A codebook sends message `m` (uniformly distributed) as the output state
//! `W_m`. Decoding is `M`-ary discrimination of `{1/M, W_m}`, so the
//! smallest decoding error `Pe` is the minimum error of that ensemble. The
//! meta-converse bounds `Pe` from below by a binary test between the joint
//! state `ρ^{AB} = Σ_m |m⟩⟨m| ⊗ W_m / M` and `ρ^A ⊗ μ0`; the bound is exact
//! when `μ0` is the normalized Lagrange operator of an optimal decoder.
//!
//! Only classical message registers are modeled; with a quantum `A` system
//! the block structure used here does not exist.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{alpha_beta_operators, AlphaCurvePoint};
use crate::error::{QhtError, Result};
use crate::io::format_f64;
use crate::mary::{
    solve_min_error, block_test_value, spectrum_objective, DiscriminationResult, Ensemble,
    SolverOptions,
};
use crate::operator::{DensityOperator, HermitianOperator, SpectralRegion};
use crate::random::{random_density_with, rng_from_seed};

/// Allowed difference between the channel-coding and discrimination forms
/// of the binary-test bound.
pub const TOL_META_IDENTITY: f64 = 1e-10;
/// Same for the information-spectrum objective.
pub const TOL_SPECTRUM_IDENTITY: f64 = 1e-12;

/// A codebook given by its output states `W_{x_1}, …, W_{x_M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqCodebookInstance {
    outputs: Vec<DensityOperator>,
    labels: Option<Vec<String>>,
}

impl CqCodebookInstance {
    pub fn new(outputs: Vec<DensityOperator>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(QhtError::InvalidArgument("a code needs at least one codeword".into()));
        }
        let d = outputs[0].dim();
        for (i, w) in outputs.iter().enumerate() {
            w.check_dim(d).map_err(|e| e.at(format!("outputs[{i}]")))?;
        }
        Ok(CqCodebookInstance { outputs, labels: None })
    }

    /// Attaches channel-input labels `x_m`, one per codeword.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.outputs.len() {
            return Err(QhtError::DimensionMismatch {
                expected: self.outputs.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// `codewords` random outputs; `rank = None` draws each rank from `1..=dim`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, codewords: usize, rank: Option<usize>) -> Result<Self> {
        let outputs = (0..codewords)
            .map(|_| {
                let r = rank.unwrap_or_else(|| rng.random_range(1..=dim));
                random_density_with(rng, dim, r)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(outputs)
    }

    /// Number of messages `M`.
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Output dimension.
    pub fn dim(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn outputs(&self) -> &[DensityOperator] {
        &self.outputs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The decoding problem: equal priors on the outputs.
    pub fn ensemble(&self) -> Result<Ensemble> {
        Ensemble::uniform(self.outputs.clone())
    }

    /// Codeword `k` of the result is codeword `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let code = Self::new(perm.iter().map(|&i| self.outputs[i].clone()).collect())?;
        match &self.labels {
            Some(l) => code.with_labels(perm.iter().map(|&i| l[i].clone()).collect()),
            None => Ok(code),
        }
    }

    /// `(1/M) Σ_m W_m`, the output state induced by the codebook.
    pub fn average_output(&self) -> Result<DensityOperator> {
        let mut sum = HermitianOperator::zeros(self.dim());
        for w in &self.outputs {
            sum = &sum + w.as_operator();
        }
        DensityOperator::new(&sum * (1.0 / self.len() as f64))
    }
}

/// Joint message/output state of a codebook and its message marginal.
#[derive(Debug, Clone)]
pub struct JointState {
    /// `Σ_m |m⟩⟨m| ⊗ W_m / M`, annotated with `M` blocks of size `d`.
    pub rho_ab: DensityOperator,
    /// `I_M / M`.
    pub rho_a: DensityOperator,
}

pub fn joint_state(code: &CqCodebookInstance) -> Result<JointState> {
    let m = code.len();
    let d = code.dim();
    let weight = 1.0 / m as f64;
    let mut sum = HermitianOperator::zeros(m * d);
    for (k, w) in code.outputs.iter().enumerate() {
        let basis = DensityOperator::basis_state(m, k);
        sum = &sum + &basis.kron(&(w.as_operator() * weight));
    }
    let rho_ab = DensityOperator::new(sum.with_blocks(vec![d; m])?)?;
    Ok(JointState {
        rho_ab,
        rho_a: DensityOperator::maximally_mixed(m),
    })
}

/// `ρ^A ⊗ μ0`, annotated with the same block layout as `ρ^{AB}`.
pub fn product_reference(code: &CqCodebookInstance, mu0: &DensityOperator) -> Result<DensityOperator> {
    mu0.check_dim(code.dim())?;
    let m = code.len();
    let op = DensityOperator::maximally_mixed(m)
        .kron(mu0.as_operator())
        .with_blocks(vec![code.dim(); m])?;
    Ok(DensityOperator::assume_valid(op))
}

/// Smallest decoding error of the code, with the decoder that attains it.
pub fn pe_of_code(code: &CqCodebookInstance, options: &SolverOptions) -> Result<DiscriminationResult> {
    solve_min_error(&code.ensemble()?, options)
}

/// `α_{1/M}(ρ^{AB} ‖ ρ^A ⊗ μ0)`, a lower bound on `Pe` for every `μ0`.
///
/// Fails with [`QhtError::IdentityViolation`] if the value differs from the
/// discrimination form [`block_test_value`] on the uniform ensemble.
pub fn meta_converse(code: &CqCodebookInstance, mu0: &DensityOperator) -> Result<AlphaCurvePoint> {
    let joint = joint_state(code)?;
    let reference = product_reference(code, mu0)?;
    let point = alpha_beta_operators(&joint.rho_ab, &reference, 1.0 / code.len() as f64)?;
    let other = block_test_value(&code.ensemble()?, mu0)?;
    let difference = (point.alpha - other.alpha).abs();
    if !(difference <= TOL_META_IDENTITY) {
        return Err(QhtError::IdentityViolation {
            what: "meta-converse vs block binary test",
            difference,
        });
    }
    Ok(point)
}

/// The meta-converse with `μ0` fixed to the induced output state.
pub fn wang_renner_bound(code: &CqCodebookInstance) -> Result<AlphaCurvePoint> {
    meta_converse(code, &code.average_output()?)
}

/// `(1/M) Σ_m tr(W_m {W_m − t' μ0 ≤ 0}) − t'/M`.
///
/// Fails with [`QhtError::IdentityViolation`] if the value differs from
/// [`spectrum_objective`] at `t = t'/M`.
pub fn hayashi_nagaoka(code: &CqCodebookInstance, mu0: &DensityOperator, t_prime: f64) -> Result<f64> {
    mu0.check_dim(code.dim())?;
    if !(t_prime >= 0.0 && t_prime.is_finite()) {
        return Err(QhtError::InvalidArgument(format!(
            "t' must be finite and >= 0, got {t_prime}"
        )));
    }
    let m = code.len() as f64;
    let reference = mu0.as_operator() * t_prime;
    let mut captured = 0.0;
    for w in &code.outputs {
        let s = (w.as_operator() - &reference).spectral()?;
        captured += s.trace_in_region(SpectralRegion::NonPositive, w);
    }
    let value = captured / m - t_prime / m;
    let other = spectrum_objective(&code.ensemble()?, mu0, t_prime / m)?.value;
    let difference = (value - other).abs();
    if !(difference <= TOL_SPECTRUM_IDENTITY) {
        return Err(QhtError::IdentityViolation {
            what: "information-spectrum objective vs discrimination form",
            difference,
        });
    }
    Ok(value)
}

/// Decoding error of one code next to its converse bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseReport {
    pub seed: Option<u64>,
    pub pe: f64,
    /// Meta-converse at the optimal `μ0★`.
    pub meta_mu0star: f64,
    /// Information-spectrum objective at `(μ0★, t' = M c0★)`.
    pub hn_opt: f64,
    pub wang_renner: f64,
    /// `pe − wang_renner`.
    pub slack_wr: f64,
    pub gap: f64,
    pub certified: bool,
}

impl ConverseReport {
    pub const CSV_HEADER: &'static str = "seed,pe,meta_mu0star,hn_opt,wang_renner,slack_wr,gap,certified";

    /// One CSV row; floats use the shortest representation that parses back
    /// to the same value.
    pub fn csv_row(&self) -> String {
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        let nums = [self.pe, self.meta_mu0star, self.hn_opt, self.wang_renner, self.slack_wr, self.gap]
            .map(format_f64)
            .join(",");
        format!("{seed},{nums},{}", self.certified)
    }
}

/// Solves the decoding problem and evaluates every bound.
pub fn converse_report(code: &CqCodebookInstance, options: &SolverOptions) -> Result<ConverseReport> {
    let result = pe_of_code(code, options)?;
    let meta = meta_converse(code, &result.mu0_star)?;
    let hn = hayashi_nagaoka(code, &result.mu0_star, code.len() as f64 * result.c0_star)?;
    let wr = wang_renner_bound(code)?;
    Ok(ConverseReport {
        seed: None,
        pe: result.epsilon,
        meta_mu0star: meta.alpha,
        hn_opt: hn,
        wang_renner: wr.alpha,
        slack_wr: result.epsilon - wr.alpha,
        gap: result.gap,
        certified: result.certified,
    })
}

/// Random-code campaign parameters. Instance `i` uses seed `seed + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub codewords: usize,
    /// Fixed output rank, or `None` for ranks drawn per codeword.
    pub rank: Option<usize>,
    pub seed: u64,
    pub count: usize,
    pub solver: SolverOptions,
}

/// The code generated for one campaign seed.
pub fn random_code(config: &ExperimentConfig, seed: u64) -> Result<CqCodebookInstance> {
    CqCodebookInstance::random(&mut rng_from_seed(seed), config.dim, config.codewords, config.rank)
}

/// Reports for `count` random codes, in seed order.
pub fn tightness_experiment(config: &ExperimentConfig) -> Result<Vec<ConverseReport>> {
    (0..config.count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i);
            let code = random_code(config, seed)?;
            let mut report = converse_report(&code, &config.solver)?;
            report.seed = Some(seed);
            Ok(report)
        })
        .collect()
}

/// Writes reports as a CSV table with a header row.
pub fn write_csv<W: Write>(out: &mut W, reports: &[ConverseReport]) -> Result<()> {
    writeln!(out, "{}", ConverseReport::CSV_HEADER)?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
