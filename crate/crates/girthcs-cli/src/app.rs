//! Argument parsing, command dispatch, and exit-code policy.
//!
//! Exit codes: 0 success; 1 when the command line itself is malformed
//! (unknown flags, missing or conflicting arguments, unknown builtin name);
//! 2 when the inputs parse but cannot be processed (missing or corrupt
//! files, matrices outside a command's domain, parameters out of range, LP
//! failures); 3 when a run detects a theorem violation — a guarantee the
//! math promises was observed to fail, which signals an implementation bug
//! rather than bad input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use girthcs::binmat::{self, BinaryMatrix, BuiltinMatrix, GenerateConfig};
use girthcs::bounds;
use girthcs::certify;
use girthcs::lpsolve;
use girthcs::tanner;

use crate::experiment::{self, ExperimentConfig, ExperimentOutcome, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// A failed command, tagged with the exit code it deserves.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Violation(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Violation(_) => EXIT_VIOLATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Violation(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "girthcs",
    version,
    about = "Girth-based analysis of binary 0-1 measurement matrices: \
             recovery guarantees, nullspace certificates, and basis-pursuit \
             experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the matrix profile: size, column weights, overlap, girth.
    Analyze {
        #[command(flatten)]
        source: Source,
    },
    /// Print the girth-based guarantee bundle; with --k, also the
    /// sparse-approximation constants at that sparsity.
    Bounds {
        #[command(flatten)]
        source: Source,
        /// Sparsity level for the approximation constants (needs k < c0/2).
        #[arg(long)]
        k: Option<u64>,
    },
    /// Verify a nullspace certificate in exact rational arithmetic.
    Certify {
        #[command(flatten)]
        source: Source,
        /// Certificate file: one entry per line (integer, p/q, or decimal),
        /// '#' comments. Defaults to the builtin's own certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Run basis pursuit once on y = Hx and report the estimate.
    Recover {
        #[command(flatten)]
        source: Source,
        /// The signal x, comma-separated, one entry per column.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        signal: Vec<f64>,
    },
    /// Measure the matrix's actual coordinate-spread constant by LP.
    EmpiricalC0 {
        #[command(flatten)]
        source: Source,
    },
    /// Brute-force the order-k nullspace-property constant.
    Nsp {
        #[command(flatten)]
        source: Source,
        /// Support size to test every k-subset at.
        #[arg(long)]
        k: usize,
    },
    /// Exact-recovery sweep: k-sparse signals, basis pursuit, CSV per trial.
    Experiment {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sparse-approximation sweep: k dominant entries plus a noise tail,
    /// checked against the C1, C2, C3 guarantees, CSV per trial.
    Approx {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Tail entries are uniform in [-tail-eps, tail-eps].
        #[arg(long, default_value_t = experiment::DEFAULT_TAIL_EPS)]
        tail_eps: f64,
    },
    /// Generate a column-regular matrix by progressive edge growth.
    Generate {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Uniform column weight.
        #[arg(long)]
        gamma: usize,
        /// Keep restarting until the girth reaches this value.
        #[arg(long)]
        girth: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output format.
        #[arg(long, value_enum, default_value_t = MatrixFormat::Alist)]
        format: MatrixFormat,
        /// Write the matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Where the matrix comes from: exactly one of --builtin or --file.
#[derive(Args)]
struct Source {
    /// One of the built-in example matrices: eg32_pointplane, euclid_plane,
    /// cube, gp52, girth12.
    #[arg(long)]
    builtin: Option<String>,
    /// Load the matrix from a file instead.
    #[arg(long, conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// File format; default: alist for a .alist extension, dense otherwise.
    #[arg(long, value_enum, requires = "file")]
    format: Option<MatrixFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    /// The LDPC community's sparse index format.
    Alist,
    /// Whitespace-separated 0/1 rows.
    Dense,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Single sparsity level (shorthand for --k-min K --k-max K).
    #[arg(long, conflicts_with_all = ["k_min", "k_max"])]
    k: Option<usize>,
    #[arg(long, requires = "k_max")]
    k_min: Option<usize>,
    #[arg(long, requires = "k_min")]
    k_max: Option<usize>,
    /// Sampled mode: trials per k. Exhaustive mode: magnitude draws per
    /// support/sign pattern.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate every support and sign pattern (C(n,k) * 2^k <= 10^6)
    /// instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for `main`; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { source } => cmd_analyze(&source),
        Command::Bounds { source, k } => cmd_bounds(&source, k),
        Command::Certify { source, certificate } => cmd_certify(&source, certificate.as_deref()),
        Command::Recover { source, signal } => cmd_recover(&source, &signal),
        Command::EmpiricalC0 { source } => cmd_empirical_c0(&source),
        Command::Nsp { source, k } => cmd_nsp(&source, k),
        Command::Experiment { sweep } => cmd_sweep(&sweep, Mode::ExactRecovery),
        Command::Approx { sweep, tail_eps } => {
            cmd_sweep(&sweep, Mode::Approximation { tail_eps })
        }
        Command::Generate { rows, cols, gamma, girth, seed, format, out } => {
            cmd_generate(rows, cols, gamma, girth, seed, format, out.as_deref())
        }
    }
}

fn sniff_format(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("alist") => MatrixFormat::Alist,
        _ => MatrixFormat::Dense,
    }
}

/// Resolves a matrix source to (label, matrix, builtin when applicable).
fn load_matrix(src: &Source) -> Result<(String, BinaryMatrix, Option<BuiltinMatrix>), Failure> {
    match (&src.builtin, &src.file) {
        (Some(name), None) => {
            let b: BuiltinMatrix =
                name.parse().map_err(|e: binmat::UnknownBuiltin| Failure::Usage(e.to_string()))?;
            Ok((b.name().to_string(), b.matrix(), Some(b)))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Failure::Data(format!("{}: file not found", path.display()))
                } else {
                    Failure::Data(format!("{}: {e}", path.display()))
                }
            })?;
            let h = match src.format.unwrap_or_else(|| sniff_format(path)) {
                MatrixFormat::Alist => binmat::load_alist(&text),
                MatrixFormat::Dense => binmat::load_dense(&text),
            }
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), h, None))
        }
        _ => Err(Failure::Usage("exactly one of --builtin or --file is required".into())),
    }
}

/// The dense-tableau simplex is not worth running past this width.
fn check_width(h: &BinaryMatrix) -> Result<(), Failure> {
    if h.num_cols() > experiment::MAX_COLUMNS {
        return Err(Failure::Data(format!(
            "{} columns exceed the {}-column simplex guard",
            h.num_cols(),
            experiment::MAX_COLUMNS
        )));
    }
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(source: &Source) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(source)?;
    let p = tanner::profile(&h);
    println!("matrix = {id}");
    println!("rows = {}", p.rows);
    println!("cols = {}", p.cols);
    match p.gamma {
        Some(g) => println!("gamma = {g}"),
        None => {
            let lo = p.col_weights.iter().min().expect("nonempty");
            let hi = p.col_weights.iter().max().expect("nonempty");
            println!("gamma = irregular (column weights {lo}..={hi})");
        }
    }
    println!("lambda = {}", p.lambda);
    println!("girth = {}", p.girth);
    Ok(())
}

fn cmd_bounds(source: &Source, k: Option<u64>) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(source)?;
    let bundle = bounds::guarantee(&tanner::profile(&h)).map_err(data)?;
    println!("matrix = {id}");
    println!("gamma = {}", bundle.gamma);
    println!("lambda = {}", bundle.lambda);
    println!("girth = {}", bundle.girth);
    println!("c0 = {} ({})", bundle.c0, bundle.source);
    if let Some(t) = bundle.t {
        println!("t = {t}");
    }
    println!("k_max = {}", bundle.k_max);
    println!("rip_k_sup = {}", bundle.rip_k_sup);
    if let Some(nsp) = bundle.nsp_k_sup {
        println!("nsp_k_sup = {nsp}");
    }
    if let Some(k) = k {
        let c = bounds::approximation_constants(bundle.c0, k).map_err(data)?;
        println!("k = {k}");
        println!("c1 = {}", c.c1);
        println!("c2 = {}", c.c2);
        println!("c3 = {}", c.c3);
    }
    Ok(())
}

fn cmd_certify(source: &Source, certificate: Option<&Path>) -> Result<(), Failure> {
    let (id, h, builtin) = load_matrix(source)?;
    let w = match certificate {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Failure::Data(format!("{}: file not found", path.display()))
                } else {
                    Failure::Data(format!("{}: {e}", path.display()))
                }
            })?;
            certify::parse_certificate(&text)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
        }
        None => match builtin {
            Some(b) => b
                .certificate()
                .into_iter()
                .map(|v| certify::BigRational::from_integer(v.into()))
                .collect(),
            None => {
                return Err(Failure::Usage(
                    "--certificate is required when the matrix comes from --file".into(),
                ))
            }
        },
    };
    let report = certify::verify_certificate(&h, &w).map_err(data)?;
    println!("matrix = {id}");
    println!("entries = {}", w.len());
    println!("in_nullspace = {}", report.in_nullspace);
    match &report.balance {
        certify::BalanceCheck::Holds => println!("balance = holds"),
        certify::BalanceCheck::Fails { positive, negative } => {
            println!("balance = fails (positive part {positive}, negative part {negative})")
        }
        certify::BalanceCheck::NotApplicable => {
            println!("balance = not applicable (irregular columns)")
        }
    }
    println!("l1 = {}", report.l1);
    println!("l2_squared = {}", report.l2_squared);
    println!("linf = {}", report.linf);
    println!("awgn_pseudoweight = {}", report.awgn_pseudoweight);
    println!("maxfrac_pseudoweight = {}", report.maxfrac_pseudoweight);
    match (&report.c0_used, &report.tightness) {
        (Some(c0), Some(t)) => {
            println!("c0 = {c0}");
            println!("tightness = {t}");
            let holds = certify::condition5_holds(&w, c0).map_err(data)?;
            println!("coordinate_bound = {}", if holds { "holds" } else { "fails" });
            // A certificate inside the nullspace that beats the coordinate
            // bound would disprove the theory.
            if report.in_nullspace && !holds {
                return Err(Failure::Violation(
                    "nullspace certificate violates the coordinate bound".into(),
                ));
            }
        }
        _ => println!("c0 = unavailable (no girth guarantee for this matrix)"),
    }
    if !report.in_nullspace {
        return Err(Failure::Data("certificate is not in the nullspace".into()));
    }
    if matches!(report.balance, certify::BalanceCheck::Fails { .. }) {
        return Err(Failure::Data("certificate fails the balance identity".into()));
    }
    Ok(())
}

fn cmd_recover(source: &Source, signal: &[f64]) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(source)?;
    check_width(&h)?;
    if signal.len() != h.num_cols() {
        return Err(Failure::Data(format!(
            "signal has {} entries, matrix has {} columns",
            signal.len(),
            h.num_cols()
        )));
    }
    let y = h.mul_vec(signal);
    let rec = lpsolve::basis_pursuit(&h, &y).map_err(data)?;
    let cmp = lpsolve::compare_with_reference(signal, &rec.estimate);
    println!("matrix = {id}");
    let fields: Vec<String> = rec.estimate.iter().map(|v| v.to_string()).collect();
    println!("estimate = {}", fields.join(","));
    println!("l1 = {}", rec.l1_value);
    println!("residual = {}", rec.residual);
    println!("alternate_optimum = {}", rec.alternate_optimum);
    println!("linf_err = {}", cmp.linf);
    println!("success = {}", cmp.success);
    // A failure inside the guaranteed sparsity range is a theorem violation.
    let k = signal.iter().filter(|v| **v != 0.0).count() as u64;
    if !cmp.success {
        if let Ok(bundle) = bounds::guarantee(&tanner::profile(&h)) {
            if k <= bundle.k_max {
                return Err(Failure::Violation(format!(
                    "recovery of a {k}-sparse signal failed despite k_max = {}",
                    bundle.k_max
                )));
            }
        }
    }
    Ok(())
}

fn cmd_empirical_c0(source: &Source) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(source)?;
    check_width(&h)?;
    let empirical = lpsolve::empirical_c0(&h).map_err(data)?;
    println!("matrix = {id}");
    println!("empirical_c0 = {empirical}");
    if let Ok(bundle) = bounds::guarantee(&tanner::profile(&h)) {
        let c0 = *bundle.c0.numer() as f64 / *bundle.c0.denom() as f64;
        println!("theoretical_c0 = {}", bundle.c0);
        println!("difference = {}", empirical - c0);
        // The theoretical constant is a floor for the empirical one; dipping
        // below it means the coordinate bound failed on a real vector.
        if empirical < c0 - 1e-7 {
            return Err(Failure::Violation(format!(
                "empirical constant {empirical} fell below the proven floor {c0}"
            )));
        }
    } else {
        println!("theoretical_c0 = unavailable (no girth guarantee)");
    }
    Ok(())
}

fn cmd_nsp(source: &Source, k: usize) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(source)?;
    check_width(&h)?;
    let value = lpsolve::nsp_constant(&h, k).map_err(data)?;
    println!("matrix = {id}");
    println!("k = {k}");
    println!("nsp_constant = {value}");
    if let Ok(bundle) = bounds::guarantee(&tanner::profile(&h)) {
        let c0 = *bundle.c0.numer() as f64 / *bundle.c0.denom() as f64;
        let floor = c0 / k as f64 - 1.0;
        println!("theory_floor = {floor} (c0/k - 1)");
        if value < floor - 1e-7 {
            return Err(Failure::Violation(format!(
                "nsp constant {value} fell below the proven floor {floor}"
            )));
        }
    }
    Ok(())
}

fn cmd_sweep(sweep: &SweepArgs, mode: Mode) -> Result<(), Failure> {
    let (id, h, _) = load_matrix(&sweep.source)?;
    let (k_min, k_max) = match (sweep.k, sweep.k_min, sweep.k_max) {
        (Some(k), None, None) => (k, k),
        (None, Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(Failure::Usage(
                "provide either --k or both --k-min and --k-max".into(),
            ))
        }
    };
    let cfg = ExperimentConfig {
        matrix_id: id,
        matrix: h,
        k_min,
        k_max,
        trials: sweep.trials,
        seed: sweep.seed,
        exhaustive: sweep.exhaustive,
        mode,
    };
    let outcome = experiment::run_experiment(&cfg).map_err(data)?;
    report_sweep(&outcome, sweep.out.as_deref())
}

fn report_sweep(outcome: &ExperimentOutcome, out: Option<&Path>) -> Result<(), Failure> {
    write_or_print(out, &outcome.csv())?;
    for s in &outcome.summaries {
        let rate = s.successes as f64 / s.trials as f64;
        eprintln!(
            "k = {}: {}/{} successes (rate {rate}), {} violations",
            s.k, s.successes, s.trials, s.violations
        );
    }
    let violations = outcome.violations();
    if violations > 0 {
        return Err(Failure::Violation(format!(
            "{violations} trial(s) broke a proven guarantee"
        )));
    }
    Ok(())
}

fn cmd_generate(
    rows: usize,
    cols: usize,
    gamma: usize,
    girth: Option<usize>,
    seed: u64,
    format: MatrixFormat,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = GenerateConfig { rows, cols, gamma, target_girth: girth, seed };
    let generated = binmat::generate_regular(&cfg).map_err(data)?;
    let text = match format {
        MatrixFormat::Alist => binmat::save_alist(&generated.matrix),
        MatrixFormat::Dense => binmat::save_dense(&generated.matrix),
    };
    write_or_print(out, &text)?;
    eprintln!("girth = {}", generated.girth);
    Ok(())
}
