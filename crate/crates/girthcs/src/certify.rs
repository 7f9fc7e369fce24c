//! Exact verification of claimed nullspace certificates: membership,
//! the positive/negative balance identity, pseudoweights, the coordinate
//! bound, and tightness against the theoretical constant.
//!
//! Certificates are rational vectors and every check here is exact — a
//! claim that a vector "meets the bound" is an equality and must not be
//! smudged by floating point. Vectors that arrive as floats (LP output)
//! are first rounded to small rationals and then re-verified exactly.

use std::fmt;

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::binmat::BinaryMatrix;
use crate::bounds::{self, Rational};
use crate::tanner;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    DimensionMismatch { expected: usize, found: usize },
    ZeroVector,
    Parse { line: usize, token: String },
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::DimensionMismatch { expected, found } => {
                write!(f, "certificate has {found} entries, matrix has {expected} columns")
            }
            CertifyError::ZeroVector => write!(f, "certificate is the zero vector"),
            CertifyError::Parse { line, token } => {
                write!(f, "line {line}: cannot parse `{token}` as a rational")
            }
        }
    }
}

impl std::error::Error for CertifyError {}

/// Outcome of the balance identity: for w in the nullspace of a matrix with
/// uniform column weight, summing all rows gives gamma * sum(w) = 0, so the
/// positive part, the negative part, and ||w||_1 / 2 all coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceCheck {
    Holds,
    Fails { positive: BigRational, negative: BigRational },
    /// Column weights are not uniform, so the identity is not implied and
    /// the check is skipped.
    NotApplicable,
}

impl BalanceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, BalanceCheck::Holds)
    }
}

/// Everything checked about one certificate vector. All ratios are invariant
/// under scaling the certificate by any nonzero rational.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub in_nullspace: bool,
    pub balance: BalanceCheck,
    pub l1: BigRational,
    pub l2_squared: BigRational,
    pub linf: BigRational,
    /// ||w||_1^2 / ||w||_2^2.
    pub awgn_pseudoweight: BigRational,
    /// ||w||_1 / ||w||_inf.
    pub maxfrac_pseudoweight: BigRational,
    /// max_i |w_i| * c0 / ||w||_1 against the theoretical constant:
    /// <= 1 exactly when the coordinate bound holds for this vector,
    /// = 1 exactly when the vector achieves it.
    pub tightness: Option<BigRational>,
    /// The theoretical c0 the tightness ratio used, when the matrix admits
    /// one (column-regular, finite girth).
    pub c0_used: Option<BigRational>,
}

fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Verifies a rational certificate against a matrix; every field of the
/// report is computed with exact arithmetic.
pub fn verify_certificate(
    h: &BinaryMatrix,
    w: &[BigRational],
) -> Result<CertificateReport, CertifyError> {
    if w.len() != h.num_cols() {
        return Err(CertifyError::DimensionMismatch { expected: h.num_cols(), found: w.len() });
    }
    if w.iter().all(Zero::is_zero) {
        return Err(CertifyError::ZeroVector);
    }

    let in_nullspace = (0..h.num_rows()).all(|i| {
        h.row_support(i).iter().map(|&j| &w[j]).sum::<BigRational>().is_zero()
    });

    let mut positive = BigRational::zero();
    let mut negative = BigRational::zero();
    let mut l2_squared = BigRational::zero();
    let mut linf = BigRational::zero();
    for v in w {
        if v.is_positive() {
            positive += v;
        } else {
            negative -= v;
        }
        l2_squared += v * v;
        let a = v.abs();
        if a > linf {
            linf = a;
        }
    }
    let l1 = &positive + &negative;

    let column_regular = tanner::profile(h).gamma.is_some();
    let balance = if !column_regular {
        BalanceCheck::NotApplicable
    } else if positive == negative {
        BalanceCheck::Holds
    } else {
        BalanceCheck::Fails { positive: positive.clone(), negative: negative.clone() }
    };

    let c0_used = bounds::guarantee(&tanner::profile(h)).ok().map(|b| big(b.c0));
    let tightness = c0_used.as_ref().map(|c0| &linf * c0 / &l1);

    Ok(CertificateReport {
        in_nullspace,
        balance,
        awgn_pseudoweight: &l1 * &l1 / &l2_squared,
        maxfrac_pseudoweight: &l1 / &linf,
        l1,
        l2_squared,
        linf,
        tightness,
        c0_used,
    })
}

/// The coordinate bound with constant c0, checked exactly:
/// max_i |w_i| <= ||w||_1 / c0.
pub fn condition5_holds(w: &[BigRational], c0: &BigRational) -> Result<bool, CertifyError> {
    if w.iter().all(Zero::is_zero) {
        return Err(CertifyError::ZeroVector);
    }
    let l1: BigRational = w.iter().map(Signed::abs).sum();
    let linf = w.iter().map(Signed::abs).max().expect("nonempty");
    Ok(&linf * c0 <= l1)
}

fn parse_entry(token: &str) -> Option<BigRational> {
    if let Some((n, d)) = token.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = token.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let (negative, digits) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let combined: BigInt = if digits.is_empty() {
            frac.parse().ok()?
        } else {
            format!("{digits}{frac}").parse().ok()?
        };
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(combined, den);
        return Some(if negative { -value } else { value });
    }
    token.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Parses a certificate file: one rational per line (`p/q`, integer, or
/// decimal), `#` starts a comment, blank lines ignored.
pub fn parse_certificate(text: &str) -> Result<Vec<BigRational>, CertifyError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for token in line.split_whitespace() {
            let value = parse_entry(token).ok_or_else(|| CertifyError::Parse {
                line: idx + 1,
                token: token.to_string(),
            })?;
            entries.push(value);
        }
    }
    Ok(entries)
}

/// Closest continued-fraction convergent with denominator at most
/// `max_denominator`. Exact for every rational with a small denominator,
/// which is what LP vertices on small integer data produce.
pub fn rational_from_f64(value: f64, max_denominator: u64) -> BigRational {
    assert!(value.is_finite(), "cannot round a non-finite value");
    assert!(max_denominator >= 1);
    if value.abs() >= 9e18 {
        // Too large for the convergent arithmetic; the float is exact anyway.
        return BigRational::from_float(value).expect("finite");
    }
    let negative = value < 0.0;
    let mut x = value.abs();
    let mut a = x.floor();
    // Convergents p/q built from the continued-fraction digits of |value|.
    let (mut p_prev, mut q_prev): (u128, u128) = (1, 0);
    let (mut p, mut q): (u128, u128) = (a as u128, 1);
    for _ in 0..64 {
        let frac = x - a;
        if frac < 1e-12 {
            break;
        }
        x = 1.0 / frac;
        a = x.floor();
        if a >= 9e18 {
            break;
        }
        let step = |hi: u128, lo: u128| (a as u128).checked_mul(hi).and_then(|v| v.checked_add(lo));
        let (Some(p_next), Some(q_next)) = (step(p, p_prev), step(q, q_prev)) else {
            break;
        };
        if q_next > max_denominator as u128 {
            break;
        }
        (p_prev, q_prev) = (p, q);
        (p, q) = (p_next, q_next);
    }
    let result = BigRational::new(BigInt::from(p), BigInt::from(q));
    if negative {
        -result
    } else {
        result
    }
}

/// Rounds a float vector entrywise and reports the largest rounding
/// distance, so callers can re-verify exactly and still state how far the
/// float input was from the rational it was taken to mean.
pub fn round_certificate(w: &[f64], max_denominator: u64) -> (Vec<BigRational>, f64) {
    let mut rounded = Vec::with_capacity(w.len());
    let mut distance = 0.0f64;
    for &v in w {
        let r = rational_from_f64(v, max_denominator);
        distance = distance.max((r.to_f64().unwrap_or(v) - v).abs());
        rounded.push(r);
    }
    (rounded, distance)
}
