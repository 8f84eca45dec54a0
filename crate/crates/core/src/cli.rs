//! Command-line surface. `run` parses arguments, executes one subcommand on
//! a dedicated worker pool and returns the process exit code:
//! 0 when every check passes, 1 when a bound or lemma violation is found,
//! 2 on usage, input or resource errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremizer::{maximize, ExtremizerConfig};
use crate::lattice::{enumerate_shell, SphereShell};
use crate::lemma::{translate_budget, verify_lemma, SweepConfig, SweepMode};
use crate::spectra::io::{parse_coeffs, SpectrumReport};
use crate::spectra::{
    autocorrelation, known_ceiling, lp_norm, random_coeffs, BoundReport, CoeffMode,
    BOUND_SLACK,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 8] = [
    "dim",
    "lambda",
    "shell_count",
    "lp_value",
    "bound",
    "passed",
    "max_nonedge_translates",
    "budget",
];

#[derive(Parser, Debug)]
#[command(name = "torus-spectra", version, about = "Spectral l^p checks for eigenfunctions on flat tori")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "TORUS_SPECTRA_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the lattice points of squared norm LAMBDA.
    Shell(ShellArgs),
    /// Autocorrelation spectrum of |phi|^2 and its l^p norm.
    Spectrum(SpectrumArgs),
    /// Count translate vectors over simplices of a shell.
    Lemma(LemmaArgs),
    /// Maximize the spectral l^p norm over unit coefficient vectors.
    Extremize(ExtremizeArgs),
    /// Bound and lemma checks over a range of LAMBDA, as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct ShellArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: u64,
    #[arg(long)]
    pub count_only: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lambda: Option<u64>,
    /// Coefficient file (JSON).
    #[arg(long, conflicts_with = "random")]
    pub coeffs: Option<PathBuf>,
    /// uniform, gaussian or sparse:K
    #[arg(long)]
    pub random: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exponent (default: dim).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub force_normalize: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Valid simplices to sample.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub extra_points: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct ExtremizeArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: u64,
    /// Exponent (default: dim).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 5000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda_min: u64,
    #[arg(long)]
    pub lambda_max: u64,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub random_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simplices per shell for the lemma column; 0 disables it.
    #[arg(long, default_value_t = 1000)]
    pub lemma_sample: usize,
}

struct Outcome {
    stdout: String,
    code: i32,
}

impl Outcome {
    fn new(stdout: String, passed: bool) -> Self {
        Outcome {
            stdout,
            code: if passed { EXIT_PASS } else { EXIT_VIOLATION },
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if code == EXIT_PASS {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };

    match pool.install(|| dispatch(&cli.command)) {
        Ok(outcome) => {
            if out.write_all(outcome.stdout.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Resource(_) = e {
                let _ = writeln!(err, "hint: use --mode sampled --count K for large shells");
            }
            EXIT_USAGE
        }
    }
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Shell(a) => cmd_shell(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Lemma(a) => cmd_lemma(a),
        Command::Extremize(a) => cmd_extremize(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn to_json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn nonempty_shell(dim: usize, lambda: u64) -> Result<Arc<SphereShell>> {
    let shell = enumerate_shell(dim, lambda)?;
    if shell.is_empty() {
        return Err(Error::Contract(format!(
            "no lattice points with |x|^2 = {lambda} in dimension {dim}"
        )));
    }
    Ok(Arc::new(shell))
}

fn cmd_shell(args: &ShellArgs) -> Result<Outcome> {
    let shell = enumerate_shell(args.dim, args.lambda)?;
    let stdout = if args.count_only {
        format!("{}\n", shell.len())
    } else {
        to_json_line(&shell.to_json())?
    };
    Ok(Outcome::new(stdout, true))
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<Outcome> {
    let coeffs = match (&args.coeffs, &args.random) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let c = parse_coeffs(&text, args.force_normalize)?;
            let shell = c.shell();
            if args.dim.is_some_and(|d| d != shell.dim())
                || args.lambda.is_some_and(|l| l != shell.lambda())
            {
                return Err(Error::Malformed(format!(
                    "file describes dim {} lambda {}, which disagrees with the command line",
                    shell.dim(),
                    shell.lambda()
                )));
            }
            c
        }
        (None, Some(mode)) => {
            let (Some(dim), Some(lambda)) = (args.dim, args.lambda) else {
                return Err(Error::Contract("--random needs --dim and --lambda".into()));
            };
            let mode: CoeffMode = mode.parse()?;
            random_coeffs(nonempty_shell(dim, lambda)?, args.seed, mode)?
        }
        (None, None) => {
            return Err(Error::Contract("give either --coeffs FILE or --random MODE".into()))
        }
    };

    let dim = coeffs.shell().dim();
    let p = args.p.unwrap_or(dim as f64);
    let spectrum = autocorrelation(&coeffs);
    let check = BoundReport::new(p, lp_norm(&spectrum, p)?, known_ceiling(dim, p));
    let stdout = if args.json {
        to_json_line(&SpectrumReport::new(&spectrum, &check))?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "dim {dim} lambda {}", coeffs.shell().lambda());
        let _ = writeln!(s, "support {} entries {}", coeffs.support().count(), spectrum.len());
        let _ = writeln!(s, "l^{p} norm {}", check.norm_value);
        match check.bound_value {
            Some(c) => {
                let _ = writeln!(s, "bound {c}");
            }
            None => {
                let _ = writeln!(s, "bound none");
            }
        }
        let _ = writeln!(s, "passed {}", check.passed);
        s
    };
    Ok(Outcome::new(stdout, check.passed))
}

fn cmd_lemma(args: &LemmaArgs) -> Result<Outcome> {
    let shell = Arc::new(enumerate_shell(args.dim, args.lambda)?);
    let mode = match args.mode {
        ModeArg::Exhaustive => SweepMode::Exhaustive,
        ModeArg::Sampled => SweepMode::Sampled {
            count: args.count,
            seed: args.seed,
        },
    };
    let report = verify_lemma(
        &shell,
        &SweepConfig {
            mode,
            extra_points: args.extra_points,
        },
    )?;
    let passed = report.violations.is_empty();
    let stdout = if args.json {
        to_json_line(&report)?
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "dim {} lambda {} shell {} mode {}",
            report.dim,
            report.lambda,
            shell.len(),
            report.mode
        );
        let _ = writeln!(
            s,
            "checked {} skipped degenerate {} antipodal {}",
            report.checked, report.skipped.degenerate, report.skipped.antipodal
        );
        let _ = writeln!(
            s,
            "max non-edge translates {} (budget {}), max with edges {}",
            report.max_nonedge_count, report.budget, report.max_raw_count
        );
        let _ = writeln!(s, "violations {}", report.violations.len());
        s
    };
    Ok(Outcome::new(stdout, passed))
}

fn cmd_extremize(args: &ExtremizeArgs) -> Result<Outcome> {
    let shell = nonempty_shell(args.dim, args.lambda)?;
    let p = args.p.unwrap_or(args.dim as f64);
    let config = ExtremizerConfig {
        restarts: args.restarts,
        max_iters: args.iters,
        step_init: args.step,
        tol: args.tol,
        seed: args.seed,
    };
    let report = maximize(&shell, p, &config)?;
    let passed = report
        .bound_value
        .is_none_or(|c| report.best_value <= c + BOUND_SLACK);
    let stdout = if args.json {
        to_json_line(&report.to_json())?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "dim {} lambda {} p {p}", args.dim, args.lambda);
        let _ = writeln!(
            s,
            "best {} (restart {}, {} iterations, converged {})",
            report.best_value, report.best_restart, report.iterations_used, report.converged
        );
        match report.bound_value {
            Some(c) => {
                let _ = writeln!(s, "bound {c} gap {}", c - report.best_value);
            }
            None => {
                let _ = writeln!(s, "bound none");
            }
        }
        s
    };
    Ok(Outcome::new(stdout, passed))
}

/// One CSV row of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub dim: usize,
    pub lambda: u64,
    pub shell_count: usize,
    pub lp_value: f64,
    pub bound: Option<f64>,
    pub passed: bool,
    pub max_nonedge_translates: Option<usize>,
    pub budget: u64,
}

impl SweepRow {
    fn record(&self) -> [String; 8] {
        [
            self.dim.to_string(),
            self.lambda.to_string(),
            self.shell_count.to_string(),
            format_float(self.lp_value),
            self.bound.map(format_float).unwrap_or_default(),
            self.passed.to_string(),
            self.max_nonedge_translates
                .map(|m| m.to_string())
                .unwrap_or_default(),
            self.budget.to_string(),
        ]
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn trial_seed(seed: u64, lambda: u64, trial: usize) -> u64 {
    seed.wrapping_add(lambda.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(trial as u64)
}

pub fn sweep_row(
    shell: &Arc<SphereShell>,
    random_trials: usize,
    seed: u64,
    lemma_sample: usize,
) -> Result<SweepRow> {
    let dim = shell.dim();
    let lambda = shell.lambda();
    let p = dim as f64;
    let mut lp_value: f64 = 0.0;
    for t in 0..random_trials {
        let c = random_coeffs(shell.clone(), trial_seed(seed, lambda, t), CoeffMode::Gaussian)?;
        lp_value = lp_value.max(lp_norm(&autocorrelation(&c), p)?);
    }
    let bound = known_ceiling(dim, p);
    let mut passed = bound.is_none_or(|c| lp_value <= c + BOUND_SLACK);

    let max_nonedge_translates = if lemma_sample == 0 {
        None
    } else {
        let subsets = crate::lemma::subset_count(shell.len(), dim);
        let mode = if subsets <= lemma_sample as u128 {
            SweepMode::Exhaustive
        } else {
            SweepMode::Sampled {
                count: lemma_sample,
                seed: trial_seed(seed, lambda, random_trials),
            }
        };
        let report = verify_lemma(
            shell,
            &SweepConfig {
                mode,
                extra_points: 0,
            },
        )?;
        passed &= report.violations.is_empty();
        Some(report.max_nonedge_count)
    };

    Ok(SweepRow {
        dim,
        lambda,
        shell_count: shell.len(),
        lp_value,
        bound,
        passed,
        max_nonedge_translates,
        budget: translate_budget(dim),
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    if args.lambda_min > args.lambda_max {
        return Err(Error::Contract(format!(
            "lambda-min {} exceeds lambda-max {}",
            args.lambda_min, args.lambda_max
        )));
    }
    // Validate the range before opening the output.
    enumerate_shell(args.dim, args.lambda_max)?;

    let file = match &args.out {
        Some(path) => Some(std::fs::File::create(path)?),
        None => None,
    };

    let lambdas: Vec<u64> = (args.lambda_min..=args.lambda_max).collect();
    let rows: Vec<Option<SweepRow>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let shell = Arc::new(enumerate_shell(args.dim, lambda)?);
            if shell.is_empty() {
                return Ok(None);
            }
            sweep_row(&shell, args.random_trials, args.seed, args.lemma_sample).map(Some)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = rows.into_iter().flatten().collect();

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for row in &rows {
        writer.write_record(row.record())?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;

    let passed = rows.iter().all(|r| r.passed);
    let stdout = match file {
        Some(mut f) => {
            f.write_all(&bytes)?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            format!("{} rows, {failed} failed\n", rows.len())
        }
        None => String::from_utf8(bytes).expect("csv output is utf-8"),
    };
    Ok(Outcome::new(stdout, passed))
}
