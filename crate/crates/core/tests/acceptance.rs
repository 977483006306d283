//! Acceptance suite. Every criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use qht::binary::{alpha_beta, helstrom, threshold_lower_bound};
use qht::channel::{
    converse_report, hayashi_nagaoka, meta_converse, pe_of_code, write_csv, ConverseReport, CqCodebookInstance,
};
use qht::io::{save_json, EnsembleFile};
use qht::mary::{
    block_test_value, solve_min_error, spectrum_objective, DiscriminationResult, Ensemble, SolverOptions, TOL_POVM_PSD,
    TOL_POVM_SUM,
};
use qht::operator::{CMatrix, DensityOperator};
use qht::random::{random_unitary, rng_from_seed, QhtRng};
use rand::Rng;
use rayon::prelude::*;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: qht::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Oracles built from plain matrices and nalgebra's own eigensolver.

fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().copied().collect()
}

fn max_eigenvalue(m: &CMatrix) -> f64 {
    eigenvalues(m).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b).trace().re
}

/// Block-diagonal matrix assembled entry by entry.
fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), b.shape()).copy_from(b);
        at += b.nrows();
    }
    out
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * Complex64::new(s, 0.0)
}

/// `α_{1/M}` between `diag(p_m τ_m)` and `diag(μ0/M)`, built without the
/// library's block annotations.
fn block_alpha_oracle(ensemble: &Ensemble, mu0: &DensityOperator) -> std::result::Result<f64, String> {
    let m = ensemble.len();
    let tested: Vec<CMatrix> = (0..m).map(|i| ensemble.weighted(i).matrix().clone()).collect();
    let reference = vec![scaled(mu0.matrix(), 1.0 / m as f64); m];
    let rho0 = lib(DensityOperator::from_matrix(block_diagonal(&tested)))?;
    let rho1 = lib(DensityOperator::from_matrix(block_diagonal(&reference)))?;
    Ok(lib(alpha_beta(&rho0, &rho1, 1.0 / m as f64))?.alpha)
}

/// `Σ_i p_i tr(τ_i {p_i τ_i − t μ0 ≤ 0}) − t`, classifying eigenvalues with
/// the same zero tolerance as the library.
fn spectrum_oracle(ensemble: &Ensemble, mu0: &DensityOperator, t: f64) -> f64 {
    let mut value = -t;
    for i in 0..ensemble.len() {
        let a = ensemble.weighted(i).matrix() - scaled(mu0.matrix(), t);
        let tol = 1e-9 * a.norm().max(1.0);
        let eig = a.symmetric_eigen();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= tol {
                let v = eig.eigenvectors.column(k);
                let w = (v.adjoint() * ensemble.weighted(i).matrix() * v)[(0, 0)].re;
                value += w;
            }
        }
    }
    value
}

/// Error, dual bound and gap of a POVM recomputed from its effects.
struct IndependentCertificate {
    epsilon: f64,
    gap: f64,
    negativity: f64,
    completeness: f64,
}

fn independent_certificate(ensemble: &Ensemble, result: &DiscriminationResult) -> IndependentCertificate {
    let d = ensemble.dim();
    let effects: Vec<&CMatrix> = result.povm.effects().iter().map(|e| e.matrix()).collect();
    let weighted: Vec<CMatrix> = (0..ensemble.len()).map(|i| ensemble.weighted(i).matrix().clone()).collect();
    let success: f64 = weighted.iter().zip(&effects).map(|(w, e)| trace_product(w, e)).sum();
    let epsilon = (1.0 - success).clamp(0.0, 1.0);
    let mut lambda = CMatrix::zeros(d, d);
    for (w, e) in weighted.iter().zip(&effects) {
        lambda += w * *e;
    }
    let lambda_h = (&lambda + lambda.adjoint()) * Complex64::new(0.5, 0.0);
    let shift = weighted.iter().map(|w| max_eigenvalue(&(w - &lambda_h))).fold(0.0, f64::max);
    let bound = 1.0 - lambda_h.trace().re - d as f64 * shift;

    let mut sum = CMatrix::zeros(d, d);
    let mut negativity: f64 = 0.0;
    for e in &effects {
        sum += *e;
        negativity = negativity.max(-eigenvalues(e).into_iter().fold(f64::INFINITY, f64::min));
    }
    let completeness = (sum - CMatrix::identity(d, d)).norm();
    IndependentCertificate {
        epsilon,
        gap: (epsilon - bound).max(0.0),
        negativity,
        completeness,
    }
}

fn random_priors_oracle(rng: &mut QhtRng, m: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

// ---------------------------------------------------------------------------
// Shared discrimination campaign.

const DIMS: [usize; 3] = [2, 3, 4];
const HYPOTHESES: [usize; 4] = [2, 3, 4, 5];
const PER_SHAPE: usize = 50;
const SAMPLES: usize = 20;

struct Instance {
    seed: u64,
    ensemble: Ensemble,
    result: DiscriminationResult,
    block_value: f64,
    block_oracle: f64,
    sampled_excess: f64,
    spectrum_value: f64,
    spectrum_oracle: f64,
    degeneracy: f64,
    independent: IndependentCertificate,
}

fn campaign_instance(seed: u64, d: usize, m: usize) -> std::result::Result<Instance, String> {
    let mut rng = rng_from_seed(seed);
    let priors = random_priors_oracle(&mut rng, m);
    let states = (0..m).map(|_| random_state(&mut rng, d)).collect();
    let ensemble = lib(Ensemble::new(priors, states))?;
    let result = lib(solve_min_error(&ensemble, &SolverOptions::default()))?;

    let block_value = lib(block_test_value(&ensemble, &result.mu0_star))?.alpha;
    let block_oracle = block_alpha_oracle(&ensemble, &result.mu0_star)?;
    let mut sampled_excess = f64::NEG_INFINITY;
    for _ in 0..SAMPLES {
        let mu0 = random_state(&mut rng, d);
        sampled_excess = sampled_excess.max(lib(block_test_value(&ensemble, &mu0))?.alpha - result.epsilon);
    }
    let objective = lib(spectrum_objective(&ensemble, &result.mu0_star, result.c0_star))?;
    let degeneracy = objective
        .projector_ranks
        .iter()
        .map(|r| (r - d as f64).abs())
        .fold(0.0, f64::max);
    let spectrum_oracle = spectrum_oracle(&ensemble, &result.mu0_star, result.c0_star);
    let independent = independent_certificate(&ensemble, &result);
    Ok(Instance {
        seed,
        ensemble,
        result,
        block_value,
        block_oracle,
        sampled_excess,
        spectrum_value: objective.value,
        spectrum_oracle,
        degeneracy,
        independent,
    })
}

fn run_campaign() -> std::result::Result<Vec<Instance>, String> {
    let shapes: Vec<(u64, usize, usize)> = DIMS
        .iter()
        .flat_map(|&d| HYPOTHESES.iter().map(move |&m| (d, m)))
        .flat_map(|(d, m)| (0..PER_SHAPE).map(move |k| (d, m, k)))
        .enumerate()
        .map(|(i, (d, m, _))| (10_000 + i as u64, d, m))
        .collect();
    shapes.into_par_iter().map(|(seed, d, m)| campaign_instance(seed, d, m)).collect()
}

fn certified(campaign: &[Instance]) -> Vec<&Instance> {
    campaign.iter().filter(|i| i.result.certified).collect()
}

fn worst<'a>(items: impl Iterator<Item = (&'a Instance, f64)>) -> (f64, u64) {
    items.fold((f64::NEG_INFINITY, 0), |acc, (i, v)| if v > acc.0 { (v, i.seed) } else { acc })
}

fn criterion_block_tightness(campaign: &[Instance]) -> Check {
    let cert = certified(campaign);
    let (delta, at) = worst(cert.iter().map(|i| (*i, (i.block_value - i.result.epsilon).abs())));
    let (route, _) = worst(cert.iter().map(|i| (*i, (i.block_value - i.block_oracle).abs())));
    let (excess, _) = worst(cert.iter().map(|i| (*i, i.sampled_excess)));
    ensure(
        cert.len() >= 500 && delta <= 1e-6 && route <= 1e-9 && excess <= 1e-8,
        format!(
            "{} certified ensembles; max |value(mu0*) - eps| = {delta:.2e} (seed {at}); \
             block oracle agreement {route:.2e}; max sampled excess = {excess:.2e}",
            cert.len()
        ),
    )
}

fn criterion_spectrum_tightness(campaign: &[Instance]) -> Check {
    let cert = certified(campaign);
    let (delta, at) = worst(cert.iter().map(|i| (*i, (i.spectrum_value - i.result.epsilon).abs())));
    let (route, _) = worst(cert.iter().map(|i| (*i, (i.spectrum_value - i.spectrum_oracle).abs())));
    let (degeneracy, _) = worst(cert.iter().map(|i| (*i, i.degeneracy)));
    ensure(
        cert.len() >= 500 && delta <= 1e-6 && route <= 1e-9 && degeneracy <= 1e-8,
        format!(
            "{} certified ensembles; max |objective(mu0*, c0*) - eps| = {delta:.2e} (seed {at}); \
             eigensolver oracle agreement {route:.2e}; max projector trace deviation = {degeneracy:.2e}",
            cert.len()
        ),
    )
}

fn criterion_certification(campaign: &[Instance]) -> Check {
    let tol = SolverOptions::default().tol_gap;
    let good = campaign
        .iter()
        .filter(|i| i.result.holevo_residual <= 1e-6 && i.result.gap <= 1e-8)
        .count();
    let fraction = good as f64 / campaign.len() as f64;
    let misflagged = campaign
        .iter()
        .filter(|i| i.result.certified != (i.result.gap <= tol) || (i.independent.gap > tol + 1e-12 && i.result.certified))
        .count();
    let (gap_route, _) = worst(campaign.iter().map(|i| (i, (i.independent.gap - i.result.gap).abs())));
    let (eps_route, _) = worst(campaign.iter().map(|i| (i, (i.independent.epsilon - i.result.epsilon).abs())));
    let (negativity, _) = worst(campaign.iter().map(|i| (i, i.independent.negativity)));
    let (completeness, _) = worst(campaign.iter().map(|i| (i, i.independent.completeness)));
    let povm = negativity <= TOL_POVM_PSD && completeness <= TOL_POVM_SUM;
    let sizes = campaign.iter().all(|i| i.result.povm.len() == i.ensemble.len());
    ensure(
        fraction >= 0.99 && misflagged == 0 && gap_route <= 1e-12 && eps_route <= 1e-12 && povm && sizes,
        format!(
            "{good}/{} within residual 1e-6 and gap 1e-8; {misflagged} misflagged; \
             recomputed gap/error agreement {gap_route:.1e}/{eps_route:.1e}; \
             POVM negativity {negativity:.1e}, completeness {completeness:.1e}",
            campaign.len()
        ),
    )
}

// ---------------------------------------------------------------------------

fn criterion_binary_oracles() -> Check {
    let (rho0, rho1) = (zero(), plus());
    let exact = (2.0 - 2f64.sqrt()) / 4.0;
    let value = lib(helstrom(&rho0, &rho1, 0.5))?;
    let closed = qubit_helstrom_closed_form(&rho0, &rho1, 0.5);
    let grid = qubit_grid_bayes_error(&rho0, &rho1, 0.5, 1000);
    let helstrom_ok = (value - exact).abs() <= 1e-9 && (value - closed).abs() <= 1e-9 && (value - grid).abs() <= 1e-4;

    let mut rng = rng_from_seed(404);
    let mut lp_worst: f64 = 0.0;
    for pair in 0..100 {
        let d = 2 + pair % 5;
        let u = random_unitary(&mut rng, d);
        let p = random_diagonal_weights(&mut rng, d);
        let q = random_diagonal_weights(&mut rng, d);
        let r0 = rotated_diagonal(&p, &u);
        let r1 = rotated_diagonal(&q, &u);
        let mut betas = vec![0.0, 1.0, rng.random::<f64>(), rng.random::<f64>()];
        // Breakpoints of the classical curve.
        let mut partial = 0.0;
        for &x in q.iter().take(d - 1) {
            partial += x;
            betas.push(partial.min(1.0));
        }
        for beta in betas {
            let got = lib(alpha_beta(&r0, &r1, beta))?.alpha;
            lp_worst = lp_worst.max((got - commuting_alpha(&p, &q, beta)).abs());
        }
    }
    ensure(
        helstrom_ok && lp_worst <= 1e-9,
        format!(
            "helstrom = {value:.15} vs exact {exact:.15}, closed form {closed:.15}, 10^6-point grid {grid:.15}; \
             commuting LP max deviation {lp_worst:.2e} over 100 pairs"
        ),
    )
}

fn criterion_threshold_bound() -> Check {
    let mut rng = rng_from_seed(505);
    let grid: Vec<f64> = (0..50).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 49.0)).collect();
    let mut excess = f64::NEG_INFINITY;
    for pair in 0..200 {
        let d = 2 + pair % 4;
        let r0 = random_state(&mut rng, d);
        let r1 = random_state(&mut rng, d);
        let beta = rng.random::<f64>();
        let alpha = lib(alpha_beta(&r0, &r1, beta))?.alpha;
        for &t in &grid {
            excess = excess.max(lib(threshold_lower_bound(&r0, &r1, beta, t))? - alpha);
        }
    }
    ensure(
        excess <= 1e-9,
        format!("max (bound - alpha) = {excess:.2e} over 200 pairs x 50 thresholds"),
    )
}

// ---------------------------------------------------------------------------

/// `ρ^{AB} = Σ_m |m⟩⟨m| ⊗ W_m / M` and `ρ^A ⊗ μ0`, built with Kronecker
/// products of plain matrices.
fn channel_alpha_oracle(code: &CqCodebookInstance, mu0: &DensityOperator) -> std::result::Result<f64, String> {
    let m = code.len();
    let mut joint = CMatrix::zeros(m * code.dim(), m * code.dim());
    for (k, w) in code.outputs().iter().enumerate() {
        let mut e = CMatrix::zeros(m, m);
        e[(k, k)] = Complex64::new(1.0 / m as f64, 0.0);
        joint += e.kronecker(w.matrix());
    }
    let reference = scaled(&CMatrix::identity(m, m), 1.0 / m as f64).kronecker(mu0.matrix());
    let rho0 = lib(DensityOperator::from_matrix(joint))?;
    let rho1 = lib(DensityOperator::from_matrix(reference))?;
    Ok(lib(alpha_beta(&rho0, &rho1, 1.0 / m as f64))?.alpha)
}

struct CodeOutcome {
    report: ConverseReport,
    meta_identity: f64,
    spectrum_identity: f64,
    oracle_agreement: f64,
}

fn code_outcome(seed: u64) -> std::result::Result<CodeOutcome, String> {
    let mut rng = rng_from_seed(seed);
    let d = DIMS[seed as usize % 3];
    let m = HYPOTHESES[(seed as usize / 3) % 4];
    let code = lib(CqCodebookInstance::random(&mut rng, d, m, None))?;
    let ensemble = lib(code.ensemble())?;
    let options = SolverOptions::default();
    let result = lib(pe_of_code(&code, &options))?;
    let mut report = lib(converse_report(&code, &options))?;
    report.seed = Some(seed);

    let references = vec![result.mu0_star.clone(), lib(code.average_output())?, random_state(&mut rng, d)];
    let mut meta_identity: f64 = 0.0;
    let mut spectrum_identity: f64 = 0.0;
    let mut oracle_agreement: f64 = 0.0;
    for mu0 in &references {
        let meta = lib(meta_converse(&code, mu0))?.alpha;
        meta_identity = meta_identity.max((meta - lib(block_test_value(&ensemble, mu0))?.alpha).abs());
        oracle_agreement = oracle_agreement.max((meta - channel_alpha_oracle(&code, mu0)?).abs());
        let mut thresholds = vec![rng.random::<f64>() * 2.0 * m as f64, rng.random::<f64>() * 0.5];
        if std::ptr::eq(mu0, &references[0]) {
            thresholds.push(m as f64 * result.c0_star);
        }
        for t in thresholds {
            let hn = lib(hayashi_nagaoka(&code, mu0, t))?;
            let objective = lib(spectrum_objective(&ensemble, mu0, t / m as f64))?.value;
            spectrum_identity = spectrum_identity.max((hn - objective).abs());
            oracle_agreement = oracle_agreement.max((hn - spectrum_oracle(&ensemble, mu0, t / m as f64)).abs());
        }
    }
    Ok(CodeOutcome {
        report,
        meta_identity,
        spectrum_identity,
        oracle_agreement,
    })
}

fn criterion_channel() -> Check {
    let outcomes: Vec<CodeOutcome> = (0..100u64)
        .into_par_iter()
        .map(|i| code_outcome(20_000 + i))
        .collect::<std::result::Result<_, _>>()?;
    let max = |f: &dyn Fn(&CodeOutcome) -> f64| outcomes.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let meta = max(&|o| o.meta_identity);
    let spectrum = max(&|o| o.spectrum_identity);
    let oracle = max(&|o| o.oracle_agreement);
    let meta_opt = max(&|o| (o.report.meta_mu0star - o.report.pe).abs());
    let hn_opt = max(&|o| (o.report.hn_opt - o.report.pe).abs());
    let wr_excess = max(&|o| o.report.wang_renner - o.report.pe);

    let reports: Vec<ConverseReport> = outcomes.into_iter().map(|o| o.report).collect();
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("wang_renner_slack.csv");
    let mut file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    lib(write_csv(&mut file, &reports))?;
    let mut slack: Vec<f64> = reports.iter().map(|r| r.slack_wr).collect();
    slack.sort_by(f64::total_cmp);

    ensure(
        meta <= 1e-10 && spectrum <= 1e-10 && oracle <= 1e-10 && meta_opt <= 1e-6 && hn_opt <= 1e-6 && wr_excess <= 1e-9,
        format!(
            "100 codes; identities {meta:.1e} / {spectrum:.1e}, matrix oracles {oracle:.1e}; \
             optimized bounds within {meta_opt:.1e} / {hn_opt:.1e} of Pe; max (WR - Pe) = {wr_excess:.1e}; \
             slack min/median/max = {:.3e}/{:.3e}/{:.3e} written to {}",
            slack[0],
            slack[slack.len() / 2],
            slack[slack.len() - 1],
            path.display()
        ),
    )
}

// ---------------------------------------------------------------------------

fn criterion_closed_cases() -> Check {
    let options = SolverOptions::default();
    let mut rng = rng_from_seed(707);
    let mut identical: f64 = 0.0;
    for k in 0..60 {
        let d = 1 + k % 4;
        let m = 2 + k % 4;
        let rho = random_state(&mut rng, d);
        let priors = if k % 5 == 0 {
            vec![1.0 / m as f64; m]
        } else {
            random_priors_oracle(&mut rng, m)
        };
        let best = priors.iter().copied().fold(0.0, f64::max);
        let e = lib(Ensemble::new(priors, vec![rho; m]))?;
        let r = lib(solve_min_error(&e, &options))?;
        identical = identical.max((r.epsilon - (1.0 - best)).abs());
    }

    let mut orthogonal: f64 = 0.0;
    for k in 0..60 {
        let d = 2 + k % 5;
        let m = 2 + rng.random_range(0..d - 1);
        let u = random_unitary(&mut rng, d);
        // Basis vector j goes to hypothesis j mod m.
        let states = (0..m)
            .map(|h| {
                let w: Vec<f64> = (0..d)
                    .map(|j| if j % m == h { 0.1 + rng.random::<f64>() } else { 0.0 })
                    .collect();
                let total: f64 = w.iter().sum();
                let w: Vec<f64> = w.into_iter().map(|x| x / total).collect();
                rotated_diagonal(&w, &u)
            })
            .collect();
        let e = lib(Ensemble::new(random_priors_oracle(&mut rng, m), states))?;
        orthogonal = orthogonal.max(lib(solve_min_error(&e, &options))?.epsilon);
    }

    let r = lib(solve_min_error(&lib(Ensemble::uniform(trine()))?, &options))?;
    let trine_delta = (r.epsilon - 1.0 / 3.0).abs();
    ensure(
        identical <= 1e-10 && orthogonal <= 1e-9 && trine_delta <= 1e-7 && r.certified,
        format!(
            "identical states max deviation {identical:.1e}; orthogonal max eps {orthogonal:.1e}; \
             trine eps = {:.12} (gap {:.1e}, certified {})",
            r.epsilon, r.gap, r.certified
        ),
    )
}

// ---------------------------------------------------------------------------

fn qht(args: &[&str]) -> std::result::Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qht"))
        .args(args)
        .env_remove("QHT_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code(), out.stdout))
}

fn criterion_determinism() -> Check {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let ensemble = dir.join("determinism_trine.json");
    lib(save_json(&ensemble, &EnsembleFile::from_ensemble(&lib(Ensemble::uniform(trine()))?)))?;
    let rho0 = dir.join("determinism_rho0.json");
    let rho1 = dir.join("determinism_rho1.json");
    let mut rng = rng_from_seed(808);
    for p in [&rho0, &rho1] {
        lib(save_json(p, &qht::io::MatrixFile::from_operator(&random_state(&mut rng, 3))))?;
    }
    let campaigns: Vec<Vec<String>> = vec![
        "verify --dim 3 --num-states 4 --seed 42 --count 30",
        "verify --dim 2 --num-states 5 --rank 1 --seed 43 --count 30 --format csv",
        "channel --random --dim 3 --codewords 4 --seed 44 --count 30",
        "channel --random --dim 2 --codewords 3 --seed 45 --count 30 --emit jsonl",
    ]
    .into_iter()
    .map(|c| c.split(' ').map(String::from).collect())
    .chain([
        vec!["discriminate".into(), "--ensemble".into(), ensemble.display().to_string()],
        vec![
            "binary-test".into(),
            "--rho0".into(),
            rho0.display().to_string(),
            "--rho1".into(),
            rho1.display().to_string(),
            "--beta-grid".into(),
            "40".into(),
        ],
    ])
    .collect();

    let mut lines = 0;
    for campaign in &campaigns {
        let mut args: Vec<&str> = campaign.iter().map(String::as_str).collect();
        args.push("--no-meta");
        let first = qht(&args)?;
        let second = qht(&args)?;
        if first.0 != Some(0) || first != second || first.1.is_empty() {
            return Err(format!("`qht {}` differs between runs or failed ({:?})", args.join(" "), first.0));
        }
        lines += first.1.iter().filter(|&&b| b == b'\n').count();
    }
    Ok(format!("{} campaigns repeated, {lines} output lines byte-identical", campaigns.len()))
}

// ---------------------------------------------------------------------------

fn main() {
    let started = Instant::now();
    let campaign = run_campaign();
    let campaign_time = started.elapsed().as_secs_f64();

    let from_campaign = |f: fn(&[Instance]) -> Check| match &campaign {
        Ok(c) => f(c),
        Err(e) => Err(format!("campaign failed: {e}")),
    };
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Check + '_>)> = vec![
        (1, "block binary test is tight at mu0* and a lower bound elsewhere", Box::new(|| from_campaign(criterion_block_tightness))),
        (2, "information-spectrum objective is tight at (mu0*, c0*)", Box::new(|| from_campaign(criterion_spectrum_tightness))),
        (3, "optimality certification", Box::new(|| from_campaign(criterion_certification))),
        (4, "binary oracles", Box::new(criterion_binary_oracles)),
        (5, "threshold lower bound never exceeds alpha", Box::new(criterion_threshold_bound)),
        (6, "channel-layer identities and converse bounds", Box::new(criterion_channel)),
        (7, "closed-form M-ary cases", Box::new(criterion_closed_cases)),
        (8, "CLI determinism", Box::new(criterion_determinism)),
    ];

    println!("discrimination campaign: {:.1}s", campaign_time);
    let mut failures = 0;
    for (n, name, check) in criteria {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {n}: {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed, {:.1}s total",
        8 - failures,
        started.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
