//! Recovery and approximation experiments: deterministic trial generation,
//! basis-pursuit runs, per-trial records, and CSV rendering.
//!
//! Determinism contract: every trial owns an RNG stream keyed by
//! `(seed, k, trial)`, so records do not depend on execution order and two
//! runs with the same configuration produce byte-identical CSV output. The
//! stream is a ChaCha12 generator whose 32-byte key holds the three values
//! little-endian in words 0..3 (word 3 is zero); uniform doubles come from
//! the top 53 bits of each 64-bit output.

use std::fmt;

use girthcs::binmat::BinaryMatrix;
use girthcs::bounds::{self, BoundsError};
use girthcs::lpsolve::{self, LpError};
use girthcs::tanner;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Dominant entries get magnitudes uniform in [MAG_LOW, MAG_HIGH]: bounded
/// away from zero so success is never a judgement call.
pub const MAG_LOW: f64 = 0.5;
pub const MAG_HIGH: f64 = 2.0;
/// Exhaustive mode refuses to enumerate more than this many support x sign
/// patterns.
pub const ENUM_LIMIT: u128 = 1_000_000;
/// Wider matrices than this are not worth feeding to a dense-tableau simplex.
pub const MAX_COLUMNS: usize = 500;
/// Default tail magnitude for approximation experiments.
pub const DEFAULT_TAIL_EPS: f64 = 1e-3;

/// Fixed CSV column set; one row per trial.
pub const CSV_HEADER: &str = "matrix_id,n,m,gamma,girth,lambda,c0,k,trial,\
support,signs,success,linf_err,l1_ratio,l2_ratio,linf_ratio,alt_opt,residual";

/// What a trial's signal looks like and what counts as success.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Exactly k-sparse signals; success means the estimate matches them.
    ExactRecovery,
    /// k dominant entries plus a uniform tail in [-tail_eps, tail_eps];
    /// success means the three approximation inequalities hold.
    Approximation { tail_eps: f64 },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Label for the CSV matrix_id column (builtin name or file path).
    pub matrix_id: String,
    pub matrix: BinaryMatrix,
    pub k_min: usize,
    pub k_max: usize,
    /// Sampled mode: trials per k. Exhaustive mode: magnitude draws per
    /// support/sign pattern.
    pub trials: usize,
    pub seed: u64,
    /// Enumerate every support and sign pattern instead of sampling.
    pub exhaustive: bool,
    pub mode: Mode,
}

/// One basis-pursuit run. The ratio fields hold the measured approximation
/// quality against the tail mass and are None when the signal has no tail:
/// l1_ratio is ||x - xhat||_1 * k / ||tail||_1 (the theory caps it at C1),
/// l2_ratio is ||x - xhat||_2 / ||tail||_1 (capped at C2/k), and linf_ratio
/// is ||x - xhat||_inf / ||tail||_1 (capped at C3/k).
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub k: usize,
    pub trial: u64,
    /// Drawn support, ascending.
    pub support: Vec<usize>,
    /// Sign per support entry: +1 or -1.
    pub signs: Vec<i8>,
    pub success: bool,
    pub linf_err: f64,
    pub l1_ratio: Option<f64>,
    pub l2_ratio: Option<f64>,
    pub linf_ratio: Option<f64>,
    pub alternate_optimum: bool,
    /// ||H * xhat - y||_inf, so every row can be re-checked independently.
    pub residual: f64,
    /// True when this trial contradicts the theory: a failed recovery at
    /// k <= k_max, or a violated approximation inequality.
    pub violation: bool,
}

/// Per-k aggregate.
#[derive(Debug, Clone, Copy)]
pub struct KSummary {
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub violations: usize,
}

/// Everything a run produces; `csv` renders the records.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub matrix_id: String,
    pub rows: usize,
    pub cols: usize,
    pub gamma: usize,
    pub girth: usize,
    pub lambda: usize,
    pub c0: f64,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<KSummary>,
}

#[derive(Debug)]
pub enum ExperimentError {
    /// The matrix has no girth-based guarantee (irregular, forest, ...).
    Bounds(BoundsError),
    /// A trial's LP failed; consistent measurements make this an internal
    /// error worth surfacing loudly.
    Lp { k: usize, trial: u64, error: LpError },
    /// C(n, k) * 2^k patterns exceed [`ENUM_LIMIT`].
    Guard { k: usize },
    EmptyRange { k_min: usize, k_max: usize },
    KOutOfRange { k: usize, cols: usize },
    TooWide { cols: usize },
    BadTailEps(f64),
    ZeroTrials,
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Bounds(e) => write!(f, "{e}"),
            ExperimentError::Lp { k, trial, error } => {
                write!(f, "LP failed at k = {k}, trial {trial}: {error}")
            }
            ExperimentError::Guard { k } => write!(
                f,
                "exhaustive enumeration at k = {k} needs more than {ENUM_LIMIT} patterns"
            ),
            ExperimentError::EmptyRange { k_min, k_max } => {
                write!(f, "empty sparsity range: k_min = {k_min}, k_max = {k_max}")
            }
            ExperimentError::KOutOfRange { k, cols } => {
                write!(f, "sparsity {k} out of range for {cols} columns")
            }
            ExperimentError::TooWide { cols } => {
                write!(f, "{cols} columns exceed the {MAX_COLUMNS}-column simplex guard")
            }
            ExperimentError::BadTailEps(eps) => {
                write!(f, "tail magnitude {eps} must be finite and nonnegative")
            }
            ExperimentError::ZeroTrials => write!(f, "trial count must be positive"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<BoundsError> for ExperimentError {
    fn from(e: BoundsError) -> Self {
        ExperimentError::Bounds(e)
    }
}

/// The per-trial generator: stream (seed, k, trial) as documented above.
fn trial_rng(seed: u64, k: usize, trial: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(k as u64).to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// Uniform in [0, 1): top 53 bits of one 64-bit draw.
fn unit(r: &mut ChaCha12Rng) -> f64 {
    (r.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn magnitude(r: &mut ChaCha12Rng) -> f64 {
    MAG_LOW + (MAG_HIGH - MAG_LOW) * unit(r)
}

/// C(n, k) * 2^k when it stays within [`ENUM_LIMIT`].
fn pattern_count(n: usize, k: usize) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if c > ENUM_LIMIT {
            return None;
        }
    }
    let total = c.checked_mul(1u128 << k.min(127))?;
    (total <= ENUM_LIMIT).then_some(total)
}

/// Advances `support` to the next k-subset of 0..n in lexicographic order.
fn next_combination(support: &mut [usize], n: usize) -> bool {
    let k = support.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if support[i] < n - k + i {
            support[i] += 1;
            for j in i + 1..k {
                support[j] = support[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct TrialOutput {
    record: TrialRecord,
    success: bool,
    violation: bool,
}

/// The sparsity bounds a run is judged against.
struct Judge {
    /// Largest k with guaranteed exact recovery.
    guaranteed_k: u64,
    /// (c1, c2, c3) per k in approximation mode.
    constants: Option<(f64, f64, f64)>,
}

/// Everything held fixed across one sparsity level's trials.
struct KContext<'a> {
    h: &'a BinaryMatrix,
    mode: Mode,
    judge: Judge,
    k: usize,
}

fn run_trial(
    ctx: &KContext,
    trial: u64,
    support: &[usize],
    signs: &[i8],
    rng: &mut ChaCha12Rng,
) -> Result<TrialOutput, ExperimentError> {
    let KContext { h, mode, ref judge, k } = *ctx;
    let n = h.num_cols();
    let mut x = vec![0.0; n];
    for (&j, &s) in support.iter().zip(signs) {
        x[j] = f64::from(s) * magnitude(rng);
    }
    let mut tail_l1 = 0.0;
    if let Mode::Approximation { tail_eps } = mode {
        // Tail entries fill the complement in ascending coordinate order.
        for (j, v) in x.iter_mut().enumerate() {
            if !support.contains(&j) {
                *v = (2.0 * unit(rng) - 1.0) * tail_eps;
            }
        }
        // Definition of the ratios: K is the k largest-magnitude coordinates,
        // ties to the lowest index; with tails below MAG_LOW this is exactly
        // the drawn support.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[b].abs().partial_cmp(&x[a].abs()).unwrap().then(a.cmp(&b)));
        tail_l1 = order[k..].iter().map(|&j| x[j].abs()).sum();
    }
    let y = h.mul_vec(&x);
    let rec = lpsolve::basis_pursuit(h, &y)
        .map_err(|error| ExperimentError::Lp { k, trial, error })?;
    let cmp = lpsolve::compare_with_reference(&x, &rec.estimate);

    let (l1_ratio, l2_ratio, linf_ratio) = if tail_l1 > 0.0 {
        (
            Some(cmp.l1 * k as f64 / tail_l1),
            Some(cmp.l2 / tail_l1),
            Some(cmp.linf / tail_l1),
        )
    } else {
        (None, None, None)
    };

    let (success, violation) = match (judge.constants, l1_ratio) {
        // Approximation mode with actual tail mass: the three inequalities
        // are the claim under test.
        (Some((c1, c2, c3)), Some(r1)) => {
            let kf = k as f64;
            let ok = r1 <= c1 + 1e-9 * c1.max(1.0)
                && l2_ratio.unwrap() <= c2 / kf + 1e-9 * (c2 / kf).max(1.0)
                && linf_ratio.unwrap() <= c3 / kf + 1e-9 * (c3 / kf).max(1.0);
            (ok, !ok)
        }
        // No tail (either mode): success is exact recovery, and a failure
        // inside the guaranteed range contradicts the theory.
        _ => (cmp.success, !cmp.success && (k as u64) <= judge.guaranteed_k),
    };

    Ok(TrialOutput {
        record: TrialRecord {
            k,
            trial,
            support: support.to_vec(),
            signs: signs.to_vec(),
            success,
            linf_err: cmp.linf,
            l1_ratio,
            l2_ratio,
            linf_ratio,
            alternate_optimum: rec.alternate_optimum,
            residual: rec.residual,
            violation,
        },
        success,
        violation,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    let h = &cfg.matrix;
    let n = h.num_cols();
    if n > MAX_COLUMNS {
        return Err(ExperimentError::TooWide { cols: n });
    }
    if cfg.k_min == 0 || cfg.k_min > cfg.k_max {
        return Err(ExperimentError::EmptyRange { k_min: cfg.k_min, k_max: cfg.k_max });
    }
    if cfg.k_max > n {
        return Err(ExperimentError::KOutOfRange { k: cfg.k_max, cols: n });
    }
    if cfg.trials == 0 {
        return Err(ExperimentError::ZeroTrials);
    }
    if let Mode::Approximation { tail_eps } = cfg.mode {
        if !tail_eps.is_finite() || tail_eps < 0.0 {
            return Err(ExperimentError::BadTailEps(tail_eps));
        }
    }
    let bundle = bounds::guarantee(&tanner::profile(h))?;
    let c0f = *bundle.c0.numer() as f64 / *bundle.c0.denom() as f64;

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for k in cfg.k_min..=cfg.k_max {
        let judge = Judge {
            guaranteed_k: bundle.k_max,
            constants: match cfg.mode {
                Mode::ExactRecovery => None,
                Mode::Approximation { .. } => {
                    // The approximation theory only speaks below c0/2; fail
                    // loudly instead of recording unfalsifiable rows.
                    let c = bounds::approximation_constants(bundle.c0, k as u64)?;
                    Some((
                        *c.c1.numer() as f64 / *c.c1.denom() as f64,
                        c.c2,
                        *c.c3.numer() as f64 / *c.c3.denom() as f64,
                    ))
                }
            },
        };
        let ctx = KContext { h, mode: cfg.mode, judge, k };
        let mut summary = KSummary { k, trials: 0, successes: 0, violations: 0 };
        let mut push = |out: TrialOutput, records: &mut Vec<TrialRecord>| {
            summary.trials += 1;
            summary.successes += usize::from(out.success);
            summary.violations += usize::from(out.violation);
            records.push(out.record);
        };

        if cfg.exhaustive {
            if pattern_count(n, k).is_none() {
                return Err(ExperimentError::Guard { k });
            }
            let mut trial: u64 = 0;
            let mut support: Vec<usize> = (0..k).collect();
            loop {
                for pattern in 0..1u64 << k {
                    let signs: Vec<i8> =
                        (0..k).map(|j| if pattern >> j & 1 == 1 { -1 } else { 1 }).collect();
                    for _ in 0..cfg.trials {
                        let mut rng = trial_rng(cfg.seed, k, trial);
                        let out = run_trial(&ctx, trial, &support, &signs, &mut rng)?;
                        push(out, &mut records);
                        trial += 1;
                    }
                }
                if !next_combination(&mut support, n) {
                    break;
                }
            }
        } else {
            for trial in 0..cfg.trials as u64 {
                let mut rng = trial_rng(cfg.seed, k, trial);
                // Support: partial Fisher-Yates, then ascending; signs: one
                // bit per entry, drawn in support order.
                let mut perm: Vec<usize> = (0..n).collect();
                for i in 0..k {
                    let j = i + (rng.next_u64() % (n - i) as u64) as usize;
                    perm.swap(i, j);
                }
                let mut support = perm[..k].to_vec();
                support.sort_unstable();
                let signs: Vec<i8> =
                    (0..k).map(|_| if rng.next_u64() & 1 == 1 { -1 } else { 1 }).collect();
                let out = run_trial(&ctx, trial, &support, &signs, &mut rng)?;
                push(out, &mut records);
            }
        }
        summaries.push(summary);
    }

    Ok(ExperimentOutcome {
        matrix_id: cfg.matrix_id.clone(),
        rows: h.num_rows(),
        cols: n,
        gamma: bundle.gamma,
        girth: bundle.girth,
        lambda: bundle.lambda,
        c0: c0f,
        records,
        summaries,
    })
}

/// Quotes a CSV field only when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn ratio_field(r: Option<f64>) -> String {
    r.map(|v| v.to_string()).unwrap_or_default()
}

impl ExperimentOutcome {
    pub fn violations(&self) -> usize {
        self.summaries.iter().map(|s| s.violations).sum()
    }

    /// Renders the records under [`CSV_HEADER`]. Rows are already sorted by
    /// (k, trial); floats print in Rust's shortest round-trip form.
    pub fn csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let support =
                r.support.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(";");
            let signs: String =
                r.signs.iter().map(|&s| if s < 0 { '-' } else { '+' }).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&self.matrix_id),
                self.cols,
                self.rows,
                self.gamma,
                self.girth,
                self.lambda,
                self.c0,
                r.k,
                r.trial,
                support,
                signs,
                u8::from(r.success),
                r.linf_err,
                ratio_field(r.l1_ratio),
                ratio_field(r.l2_ratio),
                ratio_field(r.linf_ratio),
                u8::from(r.alternate_optimum),
                r.residual,
            ));
        }
        out
    }
}
