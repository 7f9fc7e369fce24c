//! Girth-based recovery guarantees for binary measurement matrices.
//!
//! The coordinate bound |w_i| <= ||w||_1 / C0 over the nullspace drives
//! everything here: C0 itself (from the column inner product for girth 4, or
//! from the local tree expansion for girth >= 6), the sparse-approximation
//! constants C1, C2, C3 at a given sparsity k, the largest recoverable
//! sparsity k_max, and the comparison suprema obtained through RIP and
//! pseudoweight arguments.
//!
//! Everything that feeds a strict inequality is kept exact: C0 is a rational
//! (an integer, in the girth >= 6 case), k_max is decided by rational
//! comparison, and only the inherently irrational C2 lives in floating point.

use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::tanner::{Girth, Profile};

/// Exact scalar used throughout the bound computations.
pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    /// gamma = 0: a zero column carries no constraint.
    GammaZero,
    /// The girth >= 6 expansion needs gamma >= 2.
    GammaTooSmall(usize),
    /// lambda = 0: no two columns intersect, so the inner-product bound
    /// degenerates and the matrix is outside the scope of these guarantees.
    LambdaZero,
    /// lambda may not exceed gamma for a 0-1 matrix with uniform weight.
    LambdaExceedsGamma { lambda: usize, gamma: usize },
    /// Girth must be an even number >= 4 (or >= 6 where noted).
    BadGirth(usize),
    /// No finite girth: the Tanner graph is a forest and the girth-based
    /// guarantees do not apply.
    GirthUnbounded,
    /// Column weights are not uniform.
    NonRegular,
    /// Sparsity k outside the admissible range k < c0/2.
    KOutOfRange { k: u64, c0: Rational },
    /// The pseudoweight comparison needs c' > 4k.
    CPrimeTooSmall { c_prime: Rational, k: u64 },
    /// Intermediate value exceeded the i128 range.
    Overflow,
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::GammaZero => write!(f, "gamma must be at least 1"),
            BoundsError::GammaTooSmall(g) => {
                write!(f, "girth-six bound needs gamma >= 2, got {g}")
            }
            BoundsError::LambdaZero => {
                write!(f, "lambda = 0: no two columns intersect, bounds do not apply")
            }
            BoundsError::LambdaExceedsGamma { lambda, gamma } => {
                write!(f, "lambda {lambda} exceeds gamma {gamma}")
            }
            BoundsError::BadGirth(g) => write!(f, "girth {g} must be even and large enough"),
            BoundsError::GirthUnbounded => {
                write!(f, "girth unbounded: girth-based guarantees do not apply")
            }
            BoundsError::NonRegular => write!(f, "column weights are not uniform"),
            BoundsError::KOutOfRange { k, c0 } => {
                write!(f, "sparsity {k} not below c0/2 = {}", Rational::new(*c0.numer(), 2 * c0.denom()))
            }
            BoundsError::CPrimeTooSmall { c_prime, k } => {
                write!(f, "comparison constant needs c' > 4k, got c' = {c_prime}, k = {k}")
            }
            BoundsError::Overflow => write!(f, "bound exceeds the exact integer range"),
        }
    }
}

impl std::error::Error for BoundsError {}

/// Which formula produced the reported C0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C0Source {
    /// 2*gamma/lambda, from the column inner product.
    InnerProduct,
    /// 2*sum_{u=0}^{t+1}(gamma-1)^u, from the local tree expansion.
    TreeExpansion,
}

impl fmt::Display for C0Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C0Source::InnerProduct => write!(f, "inner-product"),
            C0Source::TreeExpansion => write!(f, "tree-expansion"),
        }
    }
}

/// Everything the girth analysis says about one column-regular matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeBundle {
    pub gamma: usize,
    pub lambda: usize,
    pub girth: usize,
    /// Coordinate-bound constant: |w_i| <= ||w||_1 / c0 on the nullspace.
    pub c0: Rational,
    pub source: C0Source,
    /// floor((g-6)/4) when the tree expansion applies.
    pub t: Option<u32>,
    /// Largest integer k with k < c0/2; every k-sparse signal with k <= k_max
    /// is exactly recovered by basis pursuit.
    pub k_max: u64,
    /// Supremum (1 + gamma/lambda)/2 of the sparsities admitted by the
    /// comparison RIP argument.
    pub rip_k_sup: Rational,
    /// Supremum of the sparsities admitted by the pseudoweight argument;
    /// only defined for girth >= 6 and gamma >= 2.
    pub nsp_k_sup: Option<Rational>,
}

/// Sparse-approximation constants at sparsity k: basis pursuit returns x^
/// with ||x - x^||_1 <= (c1/k)*s, ||x - x^||_2 <= (c2/k)*s and
/// ||x - x^||_inf <= (c3/k)*s, where s is the l1 tail of x outside its k
/// largest coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationConstants {
    pub k: u64,
    pub c1: Rational,
    /// sqrt(c0)/(c0/2k - 1); irrational in general, so kept as f64.
    pub c2: f64,
    pub c3: Rational,
}

fn rational(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// C0 from the inner-product argument: exactly 2*gamma/lambda.
pub fn c0_girth4(gamma: usize, lambda: usize) -> Result<Rational, BoundsError> {
    if gamma == 0 {
        return Err(BoundsError::GammaZero);
    }
    if lambda == 0 {
        return Err(BoundsError::LambdaZero);
    }
    if lambda > gamma {
        return Err(BoundsError::LambdaExceedsGamma { lambda, gamma });
    }
    Ok(Rational::new(2 * gamma as i128, lambda as i128))
}

/// Partial sum sum_{u=0}^{upper}(gamma-1)^u in exact integers.
fn geometric_sum(gamma: usize, upper: u32) -> Result<i128, BoundsError> {
    let base = (gamma - 1) as i128;
    let mut power: i128 = 1;
    let mut total: i128 = 0;
    for u in 0..=upper {
        total = total.checked_add(power).ok_or(BoundsError::Overflow)?;
        if u < upper {
            power = power.checked_mul(base).ok_or(BoundsError::Overflow)?;
        }
    }
    Ok(total)
}

fn checked_pow(base: i128, exp: u32) -> Result<i128, BoundsError> {
    base.checked_pow(exp).ok_or(BoundsError::Overflow)
}

/// Level parameter floor((g-6)/4) of the tree expansion.
pub fn tree_levels(girth: usize) -> Result<u32, BoundsError> {
    if girth < 6 || !girth.is_multiple_of(2) {
        return Err(BoundsError::BadGirth(girth));
    }
    Ok(((girth - 6) / 4) as u32)
}

/// C0 from the tree expansion: exactly 2*sum_{u=0}^{t+1}(gamma-1)^u with
/// t = floor((g-6)/4). Needs gamma >= 2 and even girth >= 6.
pub fn c0_girth6(gamma: usize, girth: usize) -> Result<i128, BoundsError> {
    if gamma < 2 {
        return Err(BoundsError::GammaTooSmall(gamma));
    }
    let t = tree_levels(girth)?;
    geometric_sum(gamma, t + 1)?.checked_mul(2).ok_or(BoundsError::Overflow)
}

/// Supremum of admissible sparsities under the comparison RIP argument:
/// (1 + gamma/lambda)/2.
pub fn rip_k_sup(gamma: usize, lambda: usize) -> Result<Rational, BoundsError> {
    if gamma == 0 {
        return Err(BoundsError::GammaZero);
    }
    if lambda == 0 {
        return Err(BoundsError::LambdaZero);
    }
    if lambda > gamma {
        return Err(BoundsError::LambdaExceedsGamma { lambda, gamma });
    }
    Ok(Rational::new((gamma + lambda) as i128, 2 * lambda as i128))
}

/// Supremum of admissible sparsities under the pseudoweight argument:
/// sum_{u=0}^{t+1}(gamma-1)^u, minus (gamma-1)^(t+1)/2 when g/2 is odd.
pub fn nsp_k_sup(gamma: usize, girth: usize) -> Result<Rational, BoundsError> {
    if gamma < 2 {
        return Err(BoundsError::GammaTooSmall(gamma));
    }
    let t = tree_levels(girth)?;
    let total = rational(geometric_sum(gamma, t + 1)?);
    if (girth / 2) % 2 == 1 {
        let top = checked_pow((gamma - 1) as i128, t + 1)?;
        Ok(total - Rational::new(top, 2))
    } else {
        Ok(total)
    }
}

/// Largest integer k with k < c0/2.
pub fn k_max_from_c0(c0: Rational) -> u64 {
    let half = c0 / rational(2);
    let k = if half.is_integer() { half.to_integer() - 1 } else { half.floor().to_integer() };
    k.max(0) as u64
}

/// Assembles the full bundle for a column-regular profile.
///
/// For girth 4 the inner-product formula is the only one available. For
/// girth >= 6 (and gamma >= 2) both apply with lambda = 1, and the reported
/// c0 is their maximum; the two coincide for g in {6, 8} and the tree
/// expansion wins beyond. A matrix with gamma = 1 falls back to the
/// inner-product formula, which is the only hypothesis it satisfies.
pub fn guarantee(p: &Profile) -> Result<GuaranteeBundle, BoundsError> {
    let gamma = p.gamma.ok_or(BoundsError::NonRegular)?;
    if gamma == 0 {
        return Err(BoundsError::GammaZero);
    }
    let girth = match p.girth {
        Girth::Finite(g) => g,
        Girth::Infinite => return Err(BoundsError::GirthUnbounded),
    };
    if p.lambda == 0 {
        return Err(BoundsError::LambdaZero);
    }
    let (c0, source, t, nsp) = if girth >= 6 && gamma >= 2 {
        // lambda = 1 is forced by girth >= 6; trust the profile but bound
        // with the formula's own hypothesis.
        let from_inner = c0_girth4(gamma, 1)?;
        let from_tree = rational(c0_girth6(gamma, girth)?);
        let t = tree_levels(girth)?;
        if from_tree >= from_inner {
            (from_tree, C0Source::TreeExpansion, Some(t), Some(nsp_k_sup(gamma, girth)?))
        } else {
            (from_inner, C0Source::InnerProduct, Some(t), Some(nsp_k_sup(gamma, girth)?))
        }
    } else {
        (c0_girth4(gamma, p.lambda)?, C0Source::InnerProduct, None, None)
    };
    Ok(GuaranteeBundle {
        gamma,
        lambda: p.lambda,
        girth,
        c0,
        source,
        t,
        k_max: k_max_from_c0(c0),
        rip_k_sup: rip_k_sup(gamma, p.lambda)?,
        nsp_k_sup: nsp,
    })
}

/// The three sparse-approximation constants at sparsity k < c0/2.
pub fn approximation_constants(
    c0: Rational,
    k: u64,
) -> Result<ApproximationConstants, BoundsError> {
    if k == 0 || rational(2 * k as i128) >= c0 {
        return Err(BoundsError::KOutOfRange { k, c0 });
    }
    // d = c0/(2k) - 1 > 0.
    let d = c0 / rational(2 * k as i128) - rational(1);
    let c1 = c0 / d;
    let c3 = d.recip();
    let c2 = c0.to_f64().expect("c0 fits in f64").sqrt() / d.to_f64().expect("d fits in f64");
    Ok(ApproximationConstants { k, c1, c2, c3 })
}

/// The l2/l1 constant 1/(sqrt(c'/4k) - 1) of the pseudoweight-based
/// comparison guarantee; defined for c' > 4k.
pub fn pseudoweight_l2_constant(c_prime: Rational, k: u64) -> Result<f64, BoundsError> {
    if k == 0 || c_prime <= rational(4 * k as i128) {
        return Err(BoundsError::CPrimeTooSmall { c_prime, k });
    }
    let ratio = (c_prime / rational(4 * k as i128)).to_f64().expect("ratio fits in f64");
    Ok(1.0 / (ratio.sqrt() - 1.0))
}

/// True when the girth-based l2 guarantee beats the pseudoweight-based one
/// at the same constant: c2/k < c''/sqrt(k) with c' = c0. Defined whenever
/// c0 > 4k.
pub fn l2_guarantee_sharper(c0: Rational, k: u64) -> Result<bool, BoundsError> {
    let c2 = approximation_constants(c0, k)?.c2;
    let c_pp = pseudoweight_l2_constant(c0, k)?;
    Ok(c2 / (k as f64) < c_pp / (k as f64).sqrt())
}
