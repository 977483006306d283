//! The `qht` command-line front end.
//!
//! Every subcommand prints one record per line (JSON lines or CSV) followed
//! by a single metadata line carrying the record count and wall time, so the
//! record lines of two runs with the same arguments are byte-identical.
//! Exit status: 0 on success, 2 when some instance was computed but is not
//! certified (or a check exceeded its tolerance), 1 on input or I/O errors.
//! The environment variable `QHT_SEED`, when set, replaces `--seed`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::binary::alpha_beta;
use crate::channel::{converse_report, tightness_experiment, ConverseReport, ExperimentConfig};
use crate::error::{QhtError, Result};
use crate::io::{format_f64, load_code, load_density, load_ensemble, MatrixFile};
use crate::mary::{
    solve_min_error, verify_reformulations, Ensemble, SolverOptions, SolverStage, VerificationReport,
    VerifyOptions,
};
use crate::random::rng_from_seed;

/// Largest allowed `|bound − Pe|` for the two exact converse bounds.
pub const TOL_CONVERSE: f64 = 1e-6;
/// The induced-output bound may exceed `Pe` by at most this much.
pub const TOL_WANG_RENNER: f64 = 1e-9;

#[derive(Debug, Clone, Parser)]
#[command(name = "qht", version, about = "Quantum hypothesis testing: optimal tests, certified discrimination, converse bounds")]
pub struct RunConfig {
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Leave out the trailing metadata line.
    #[arg(long, global = true)]
    pub no_meta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal type-I error α_β(ρ0‖ρ1) with its Neyman–Pearson test.
    BinaryTest(BinaryTestArgs),
    /// Minimum-error POVM for an ensemble, with its dual certificate.
    Discriminate(DiscriminateArgs),
    /// Checks both exact reformulations of the minimum error.
    Verify(VerifyArgs),
    /// Decoding error of classical-quantum codes against converse bounds.
    Channel(ChannelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Certification threshold on the duality gap.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_gap: f64,
    /// Keep iterating until the optimality residual is below this.
    #[arg(long, default_value_t = 1e-7)]
    pub tol_residual: f64,
    /// Fixed-point iterations per start.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Random restarts after the first start.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> Result<SolverOptions> {
        for (name, v) in [("tol-gap", self.tol_gap), ("tol-residual", self.tol_residual)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QhtError::InvalidArgument(format!("--{name} must be positive, got {v}")));
            }
        }
        Ok(SolverOptions {
            tol_gap: self.tol_gap,
            tol_residual: self.tol_residual,
            max_iters: self.max_iters,
            restarts: self.restarts,
            seed,
        })
    }
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("betas").required(true).args(["beta", "beta_grid"]))]
pub struct BinaryTestArgs {
    /// Matrix file of the null hypothesis.
    #[arg(long)]
    pub rho0: PathBuf,
    /// Matrix file of the alternative.
    #[arg(long)]
    pub rho1: PathBuf,
    /// Type-II error budgets, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Evenly spaced budgets 0, 1/(n−1), …, 1.
    #[arg(long)]
    pub beta_grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct DiscriminateArgs {
    /// Ensemble file.
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Seed for the random restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["ensemble", "dim"]))]
pub struct VerifyArgs {
    /// Ensemble file to check instead of random ensembles.
    #[arg(long, conflicts_with_all = ["num_states", "rank", "count"])]
    pub ensemble: Option<PathBuf>,
    /// Dimension of random ensembles.
    #[arg(long, requires = "num_states")]
    pub dim: Option<usize>,
    /// Number of states in random ensembles.
    #[arg(long)]
    pub num_states: Option<usize>,
    /// Rank of every state; drawn per state when omitted.
    #[arg(long)]
    pub rank: Option<usize>,
    /// First instance seed; instance `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random ensembles.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Random reference states checked per instance.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Thresholds checked per reference state.
    #[arg(long, default_value_t = 25)]
    pub t_grid: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["code", "random"]))]
pub struct ChannelArgs {
    /// Code file.
    #[arg(long, conflicts_with = "random")]
    pub code: Option<PathBuf>,
    /// Generate random codes instead of reading one.
    #[arg(long, requires_all = ["dim", "codewords"])]
    pub random: bool,
    /// Output dimension of random codes.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Codewords per random code.
    #[arg(long)]
    pub codewords: Option<usize>,
    /// Rank of every output; drawn per codeword when omitted.
    #[arg(long)]
    pub rank: Option<usize>,
    /// First code seed; code `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random codes.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub emit: Format,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// Overall outcome of a run that produced records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    NotCertified,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::NotCertified => 2,
        }
    }
}

/// Emitted lines of a run, without the metadata line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub lines: Vec<String>,
    pub records: usize,
    pub status: Status,
}

impl RunConfig {
    /// Applies `QHT_SEED` if it is set.
    pub fn with_env_seed(mut self) -> Result<Self> {
        if let Ok(text) = std::env::var("QHT_SEED") {
            let seed: u64 = text
                .trim()
                .parse()
                .map_err(|_| QhtError::InvalidArgument(format!("QHT_SEED is not an integer: {text:?}")))?;
            match &mut self.command {
                Command::BinaryTest(_) => {}
                Command::Discriminate(a) => a.seed = seed,
                Command::Verify(a) => a.seed = seed,
                Command::Channel(a) => a.seed = seed,
            }
        }
        Ok(self)
    }
}

/// A record that can be written either as a JSON line or a CSV row.
trait Record: Serialize {
    const HEADER: &'static str;
    fn csv_row(&self) -> String;
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn emit<R: Record>(records: &[R], format: Format) -> Result<Vec<String>> {
    match format {
        Format::Jsonl => records.iter().map(|r| Ok(serde_json::to_string(r)?)).collect(),
        Format::Csv => Ok(std::iter::once(R::HEADER.to_string())
            .chain(records.iter().map(Record::csv_row))
            .collect()),
    }
}

/// One point of the tradeoff curve. `t` is `null` (JSON) or `inf` (CSV)
/// for the limiting test onto the kernel of `ρ1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryRecord {
    pub beta: f64,
    pub alpha: f64,
    pub t: Option<f64>,
    pub gamma: f64,
}

impl Record for BinaryRecord {
    const HEADER: &'static str = "beta,alpha,t,gamma";
    fn csv_row(&self) -> String {
        let t = self.t.map_or_else(|| "inf".to_string(), format_f64);
        format!("{},{},{t},{}", format_f64(self.beta), format_f64(self.alpha), format_f64(self.gamma))
    }
}

impl Record for VerificationReport {
    const HEADER: &'static str = "seed,dim,hypotheses,epsilon,dual_bound,gap,holevo_residual,c0_star,\
block_test_delta,spectrum_delta,degeneracy_deviation,sampled_max_excess,certified";
    fn csv_row(&self) -> String {
        let nums = [
            self.epsilon,
            self.dual_bound,
            self.gap,
            self.holevo_residual,
            self.c0_star,
            self.block_test_delta,
            self.spectrum_delta,
            self.degeneracy_deviation,
            self.sampled_max_excess,
        ]
        .map(format_f64)
        .join(",");
        format!("{},{},{},{nums},{}", opt(self.seed), self.dim, self.hypotheses, self.certified)
    }
}

impl Record for ConverseReport {
    const HEADER: &'static str = ConverseReport::CSV_HEADER;
    fn csv_row(&self) -> String {
        ConverseReport::csv_row(self)
    }
}

/// JSON form of a discrimination result.
#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationRecord {
    pub epsilon: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub holevo_residual: f64,
    pub c0_star: f64,
    pub certified: bool,
    pub iterations: usize,
    pub stage: SolverStage,
    pub mu0_star: MatrixFile,
    pub povm: Vec<MatrixFile>,
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| QhtError::InvalidArgument(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

fn positive(name: &str, v: Option<usize>) -> Result<usize> {
    match v {
        Some(x) if x > 0 => Ok(x),
        _ => Err(QhtError::InvalidArgument(format!("--{name} must be a positive integer"))),
    }
}

fn run_binary(a: &BinaryTestArgs) -> Result<RunOutput> {
    let rho0 = load_density(&a.rho0)?;
    let rho1 = load_density(&a.rho1)?;
    let mut betas = a.beta.clone();
    if let Some(n) = a.beta_grid {
        match n {
            0 => return Err(QhtError::InvalidArgument("--beta-grid must be positive".into())),
            1 => betas.push(0.0),
            _ => betas.extend((0..n).map(|k| k as f64 / (n - 1) as f64)),
        }
    }
    let records = betas
        .iter()
        .map(|&beta| {
            let p = alpha_beta(&rho0, &rho1, beta)?;
            Ok(BinaryRecord {
                beta,
                alpha: p.alpha,
                t: (!p.witness.limiting).then_some(p.witness.threshold),
                gamma: p.witness.null_mix,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput {
        lines: emit(&records, a.format)?,
        records: records.len(),
        status: Status::Success,
    })
}

fn run_discriminate(a: &DiscriminateArgs) -> Result<RunOutput> {
    let ensemble = load_ensemble(&a.ensemble)?;
    let r = solve_min_error(&ensemble, &a.solver.options(a.seed)?)?;
    let record = DiscriminationRecord {
        epsilon: r.epsilon,
        dual_bound: r.dual_bound,
        gap: r.gap,
        holevo_residual: r.holevo_residual,
        c0_star: r.c0_star,
        certified: r.certified,
        iterations: r.iterations,
        stage: r.stage,
        mu0_star: MatrixFile::from_operator(&r.mu0_star),
        povm: r.povm.effects().iter().map(MatrixFile::from_operator).collect(),
    };
    Ok(RunOutput {
        lines: vec![serde_json::to_string(&record)?],
        records: 1,
        status: if r.certified { Status::Success } else { Status::NotCertified },
    })
}

fn run_verify(a: &VerifyArgs) -> Result<RunOutput> {
    let solver = a.solver.options(a.seed)?;
    let options = |seed| VerifyOptions {
        solver: SolverOptions { seed, ..solver },
        samples: a.samples,
        t_grid: a.t_grid,
        seed,
    };
    let reports = match &a.ensemble {
        Some(path) => {
            let ensemble = load_ensemble(path)?;
            vec![verify_reformulations(&ensemble, &options(a.seed))?]
        }
        None => {
            let dim = positive("dim", a.dim)?;
            let m = positive("num-states", a.num_states)?;
            if let Some(r) = a.rank {
                if r == 0 || r > dim {
                    return Err(QhtError::InvalidArgument(format!("--rank must lie in 1..={dim}, got {r}")));
                }
            }
            with_pool(a.jobs, || {
                (0..a.count as u64)
                    .into_par_iter()
                    .map(|i| {
                        let seed = a.seed.wrapping_add(i);
                        let ensemble = Ensemble::random(&mut rng_from_seed(seed), dim, m, a.rank)?;
                        let mut report = verify_reformulations(&ensemble, &options(seed))?;
                        report.seed = Some(seed);
                        Ok(report)
                    })
                    .collect::<Result<Vec<_>>>()
            })??
        }
    };
    let status = if reports.iter().all(VerificationReport::passed) {
        Status::Success
    } else {
        Status::NotCertified
    };
    Ok(RunOutput {
        lines: emit(&reports, a.format)?,
        records: reports.len(),
        status,
    })
}

/// A converse report counts as passing when the solve is certified, both
/// exact bounds meet `Pe` and the induced-output bound does not exceed it.
pub fn converse_ok(r: &ConverseReport) -> bool {
    r.certified
        && (r.meta_mu0star - r.pe).abs() <= TOL_CONVERSE
        && (r.hn_opt - r.pe).abs() <= TOL_CONVERSE
        && r.wang_renner <= r.pe + TOL_WANG_RENNER
}

fn run_channel(a: &ChannelArgs) -> Result<RunOutput> {
    let solver = a.solver.options(a.seed)?;
    let reports = match &a.code {
        Some(path) => vec![converse_report(&load_code(path)?, &solver)?],
        None => {
            let config = ExperimentConfig {
                dim: positive("dim", a.dim)?,
                codewords: positive("codewords", a.codewords)?,
                rank: a.rank,
                seed: a.seed,
                count: a.count,
                solver,
            };
            if let Some(r) = a.rank {
                if r == 0 || r > config.dim {
                    return Err(QhtError::InvalidArgument(format!("--rank must lie in 1..={}, got {r}", config.dim)));
                }
            }
            with_pool(a.jobs, || tightness_experiment(&config))??
        }
    };
    let status = if reports.iter().all(converse_ok) {
        Status::Success
    } else {
        Status::NotCertified
    };
    Ok(RunOutput {
        lines: emit(&reports, a.emit)?,
        records: reports.len(),
        status,
    })
}

/// Computes the records of one invocation.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    match &config.command {
        Command::BinaryTest(a) => run_binary(a),
        Command::Discriminate(a) => run_discriminate(a),
        Command::Verify(a) => run_verify(a),
        Command::Channel(a) => run_channel(a),
    }
}

#[derive(Serialize)]
struct Meta {
    records: usize,
    exit_code: i32,
    wall_time_s: f64,
}

fn metadata_line(output: &RunOutput, wall_time_s: f64, csv: bool) -> Result<String> {
    let meta = Meta {
        records: output.records,
        exit_code: output.status.code(),
        wall_time_s,
    };
    let json = serde_json::to_string(&serde_json::json!({ "meta": meta }))?;
    Ok(if csv { format!("# {json}") } else { json })
}

fn is_csv(config: &RunConfig) -> bool {
    match &config.command {
        Command::BinaryTest(a) => a.format == Format::Csv,
        Command::Verify(a) => a.format == Format::Csv,
        Command::Channel(a) => a.emit == Format::Csv,
        Command::Discriminate(_) => false,
    }
}

/// Runs a parsed configuration, writes its output and returns the exit code.
pub fn execute(config: &RunConfig) -> i32 {
    let started = Instant::now();
    let result = run(config).and_then(|out| {
        let mut lines = out.lines.clone();
        if !config.no_meta {
            lines.push(metadata_line(&out, started.elapsed().as_secs_f64(), is_csv(config))?);
        }
        let mut sink: Box<dyn Write> = match &config.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        for line in &lines {
            writeln!(sink, "{line}")?;
        }
        sink.flush()?;
        Ok(out.status)
    });
    match result {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Entry point of the `qht` binary. Usage errors exit with 1, so that 2
/// keeps meaning "computed but not certified".
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match config.with_env_seed() {
        Ok(config) => execute(&config),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
