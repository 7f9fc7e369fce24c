//! Self-contained linear programming: a dense two-phase primal simplex with
//! Bland's rule, basis-pursuit reconstruction on top of it, and LP-derived
//! nullspace diagnostics (the empirical coordinate-bound constant and
//! brute-force nullspace-property constants for small instances).
//!
//! Problems are in standard form: minimize c'x subject to Ax = b, x >= 0.
//! The solver is deliberately simple — dense tableau, no factorization, no
//! pricing tricks — because every instance this crate builds is desk-scale
//! and the point is an auditable, deterministic reference implementation.

use std::fmt;

use crate::binmat::BinaryMatrix;

/// Entries this close to zero are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-10;
/// Feasibility tolerance (scaled by max(1, ||b||_inf)).
pub const FEAS_TOL: f64 = 1e-9;
/// Reduced-cost tolerance for optimality and alternate-optimum detection.
pub const OPT_TOL: f64 = 1e-9;
/// Relative l_inf threshold declaring an estimate equal to a reference
/// signal: success iff ||x^ - x||_inf <= RECOVERY_TOL * max(1, ||x||_inf).
pub const RECOVERY_TOL: f64 = 1e-6;
/// Ceiling on C(n,k) * 2^k for the brute-force NSP search.
pub const NSP_ENUM_LIMIT: u128 = 1_000_000;

/// Standard-form LP: minimize `objective . x` over Ax = rhs, x >= 0.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    /// Dense constraint rows, each as long as `objective`.
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Optimal vertex returned by [`simplex`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// True when some nonbasic variable has zero reduced cost at optimality,
    /// i.e. the optimal vertex is not the unique optimum in general.
    pub alternate_optimum: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    DimensionMismatch { expected: usize, found: usize },
    NonFinite,
    Infeasible,
    Unbounded,
    IterationLimit,
    BadSparsity { k: usize, n: usize },
    EnumerationGuard { instances: u128 },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            LpError::NonFinite => write!(f, "problem contains a non-finite entry"),
            LpError::Infeasible => write!(f, "problem is infeasible"),
            LpError::Unbounded => write!(f, "objective is unbounded below"),
            LpError::IterationLimit => write!(f, "simplex iteration limit exceeded"),
            LpError::BadSparsity { k, n } => {
                write!(f, "sparsity {k} out of range for {n} columns")
            }
            LpError::EnumerationGuard { instances } => {
                write!(f, "{instances} subproblems exceed the enumeration limit {NSP_ENUM_LIMIT}")
            }
        }
    }
}

impl std::error::Error for LpError {}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Reduced costs.
    z: Vec<f64>,
    /// Columns at or beyond this index (the artificials) never enter.
    limit_enter: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        self.is_basic[self.basis[r]] = false;
        self.is_basic[c] = true;
        self.basis[r] = c;
        let inv = 1.0 / self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v *= inv;
        }
        self.a[r][c] = 1.0;
        self.rhs[r] *= inv;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let factor = self.a[i][c];
            if factor != 0.0 {
                for j in 0..self.cols {
                    self.a[i][j] -= factor * self.a[r][j];
                }
                self.a[i][c] = 0.0;
                self.rhs[i] -= factor * self.rhs[r];
            }
        }
        let factor = self.z[c];
        if factor != 0.0 {
            for j in 0..self.cols {
                self.z[j] -= factor * self.a[r][j];
            }
            self.z[c] = 0.0;
        }
    }

    /// Bland's rule: enter the lowest-index improving column, leave by the
    /// lowest-index basic variable among the minimal ratios. Terminates on
    /// its own; the iteration cap only turns a logic error into a report.
    fn run(&mut self) -> Result<(), LpError> {
        let max_iter = 2_000 + 20 * (self.rows + 1) * (self.cols + 1);
        for _ in 0..max_iter {
            let entering = (0..self.limit_enter)
                .find(|&j| !self.is_basic[j] && self.z[j] < -OPT_TOL);
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                if self.a[r][c] > PIVOT_TOL {
                    let ratio = self.rhs[r] / self.a[r][c];
                    let replace = match leave {
                        None => true,
                        Some((best, var, _)) => {
                            ratio < best - PIVOT_TOL
                                || (ratio < best + PIVOT_TOL && self.basis[r] < var)
                        }
                    };
                    if replace {
                        leave = Some((ratio, self.basis[r], r));
                    }
                }
            }
            let Some((_, _, r)) = leave else { return Err(LpError::Unbounded) };
            self.pivot(r, c);
        }
        Err(LpError::IterationLimit)
    }
}

/// Two-phase primal simplex. Deterministic: identical problems produce
/// bit-identical solutions.
pub fn simplex(p: &LpProblem) -> Result<LpSolution, LpError> {
    let m = p.constraints.len();
    let n = p.objective.len();
    if p.rhs.len() != m {
        return Err(LpError::DimensionMismatch { expected: m, found: p.rhs.len() });
    }
    for row in &p.constraints {
        if row.len() != n {
            return Err(LpError::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    let finite = p.objective.iter().chain(&p.rhs).chain(p.constraints.iter().flatten());
    if !finite.into_iter().all(|v| v.is_finite()) {
        return Err(LpError::NonFinite);
    }

    // Phase 1: minimize the sum of one artificial per row.
    let mut rhs = p.rhs.clone();
    let mut a = Vec::with_capacity(m);
    for (i, row) in p.constraints.iter().enumerate() {
        let mut extended: Vec<f64> = if rhs[i] < 0.0 {
            rhs[i] = -rhs[i];
            row.iter().map(|v| -v).collect()
        } else {
            row.clone()
        };
        extended.extend((0..m).map(|t| if t == i { 1.0 } else { 0.0 }));
        a.push(extended);
    }
    let feas_tol = FEAS_TOL * rhs.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut z = vec![0.0; n + m];
    for (j, zj) in z.iter_mut().enumerate().take(n) {
        *zj = -a.iter().map(|row| row[j]).sum::<f64>();
    }
    let mut is_basic = vec![false; n + m];
    for flag in is_basic.iter_mut().skip(n) {
        *flag = true;
    }
    let mut tab = Tableau {
        rows: m,
        cols: n + m,
        a,
        rhs,
        basis: (n..n + m).collect(),
        is_basic,
        z,
        limit_enter: n,
    };
    tab.run()?;
    let artificial_mass: f64 = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(b, _)| **b >= n)
        .map(|(_, v)| v.max(0.0))
        .sum();
    if artificial_mass > feas_tol {
        return Err(LpError::Infeasible);
    }

    // Pivot leftover artificials out of the basis; a row offering no pivot
    // is a linear combination of the others and gets dropped.
    let mut dropped = vec![false; tab.rows];
    for (r, drop_row) in dropped.iter_mut().enumerate() {
        if tab.basis[r] < n {
            continue;
        }
        match (0..n).find(|&j| tab.a[r][j].abs() > PIVOT_TOL) {
            Some(j) => tab.pivot(r, j),
            None => *drop_row = true,
        }
    }

    // Phase 2 on the surviving rows, original columns only.
    let mut a2 = Vec::new();
    let mut rhs2 = Vec::new();
    let mut basis2 = Vec::new();
    for (r, &drop_row) in dropped.iter().enumerate() {
        if !drop_row {
            a2.push(tab.a[r][..n].to_vec());
            rhs2.push(tab.rhs[r].max(0.0));
            basis2.push(tab.basis[r]);
        }
    }
    let mut z2 = p.objective.clone();
    for (row, &bj) in a2.iter().zip(&basis2) {
        let cost = p.objective[bj];
        if cost != 0.0 {
            for j in 0..n {
                z2[j] -= cost * row[j];
            }
        }
    }
    let mut is_basic2 = vec![false; n];
    for &bj in &basis2 {
        is_basic2[bj] = true;
        z2[bj] = 0.0;
    }
    let rows2 = a2.len();
    let mut tab2 = Tableau {
        rows: rows2,
        cols: n,
        a: a2,
        rhs: rhs2,
        basis: basis2,
        is_basic: is_basic2,
        z: z2,
        limit_enter: n,
    };
    tab2.run()?;

    let mut x = vec![0.0; n];
    for (r, &bj) in tab2.basis.iter().enumerate() {
        x[bj] = tab2.rhs[r].max(0.0);
    }
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let alternate_optimum =
        (0..n).any(|j| !tab2.is_basic[j] && tab2.z[j].abs() <= OPT_TOL);
    Ok(LpSolution { x, objective, alternate_optimum })
}

/// Basis-pursuit output: the minimum-l1 vector consistent with the
/// measurements, plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    /// ||estimate||_1 as reported by the LP objective.
    pub l1_value: f64,
    /// See [`LpSolution::alternate_optimum`]; when set, other vectors attain
    /// the same l1 value and recovery of any particular one is not promised.
    pub alternate_optimum: bool,
    /// ||H * estimate - y||_inf.
    pub residual: f64,
}

/// min ||x||_1 subject to Hx = y, via the split x = u - v, u, v >= 0.
pub fn basis_pursuit(h: &BinaryMatrix, y: &[f64]) -> Result<RecoveryResult, LpError> {
    let m = h.num_rows();
    let n = h.num_cols();
    if y.len() != m {
        return Err(LpError::DimensionMismatch { expected: m, found: y.len() });
    }
    let mut constraints = vec![vec![0.0; 2 * n]; m];
    for j in 0..n {
        for &i in h.col_support(j) {
            constraints[i][j] = 1.0;
            constraints[i][n + j] = -1.0;
        }
    }
    let problem = LpProblem { objective: vec![1.0; 2 * n], constraints, rhs: y.to_vec() };
    let sol = simplex(&problem)?;
    let estimate: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    let residual = h
        .mul_vec(&estimate)
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RecoveryResult {
        estimate,
        l1_value: sol.objective,
        alternate_optimum: sol.alternate_optimum,
        residual,
    })
}

/// Error norms of an estimate against the reference signal it should equal.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceComparison {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// linf <= RECOVERY_TOL * max(1, ||reference||_inf).
    pub success: bool,
}

pub fn compare_with_reference(reference: &[f64], estimate: &[f64]) -> ReferenceComparison {
    assert_eq!(reference.len(), estimate.len(), "vector lengths must agree");
    let mut l1 = 0.0;
    let mut l2sq = 0.0;
    let mut linf = 0.0f64;
    for (r, e) in reference.iter().zip(estimate) {
        let d = (r - e).abs();
        l1 += d;
        l2sq += d * d;
        linf = linf.max(d);
    }
    let ref_inf = reference.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    ReferenceComparison {
        l1,
        l2: l2sq.sqrt(),
        linf,
        success: linf <= RECOVERY_TOL * ref_inf.max(1.0),
    }
}

/// The best coordinate-bound constant the matrix actually satisfies: the
/// supremum of c such that |w_i| <= ||w||_1 / c on the whole nullspace.
///
/// Computed as 1 / max_{i, s} { max s*w_i : Hw = 0, ||w||_1 <= 1 }, each
/// subproblem an LP over w = u - v with a slack closing the norm constraint.
/// Returns +infinity when the nullspace is trivial (the maxima all vanish);
/// any nonzero nullspace makes the best value at least 1/n, far above the
/// detection tolerance.
pub fn empirical_c0(h: &BinaryMatrix) -> Result<f64, LpError> {
    let m = h.num_rows();
    let n = h.num_cols();
    let cols = 2 * n + 1;
    let mut constraints = vec![vec![0.0; cols]; m + 1];
    for j in 0..n {
        for &i in h.col_support(j) {
            constraints[i][j] = 1.0;
            constraints[i][n + j] = -1.0;
        }
    }
    for entry in constraints[m].iter_mut() {
        *entry = 1.0;
    }
    let mut rhs = vec![0.0; m + 1];
    rhs[m] = 1.0;

    let mut best = 0.0f64;
    for i in 0..n {
        for s in [1.0f64, -1.0] {
            let mut objective = vec![0.0; cols];
            objective[i] = -s;
            objective[n + i] = s;
            let sol = simplex(&LpProblem {
                objective,
                constraints: constraints.clone(),
                rhs: rhs.clone(),
            })?;
            best = best.max(-sol.objective);
        }
    }
    if best <= FEAS_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / best)
}

fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > cap {
            return acc;
        }
    }
    acc
}

/// Advances `idx` to the next k-subset of 0..n in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Largest c such that c * ||w_K||_1 <= ||w_(complement of K)||_1 for every
/// nullspace vector w and every |K| = k, found by brute force: for each
/// support K and each sign pattern on it, minimize the off-support l1 mass
/// subject to Hw = 0 and on-support mass fixed at 1. Infeasible subproblems
/// contribute nothing; if every one is infeasible the nullspace is trivial
/// and the constant is +infinity.
pub fn nsp_constant(h: &BinaryMatrix, k: usize) -> Result<f64, LpError> {
    let n = h.num_cols();
    let m = h.num_rows();
    if k == 0 || k > n {
        return Err(LpError::BadSparsity { k, n });
    }
    let instances = binomial_capped(n, k, NSP_ENUM_LIMIT)
        .saturating_mul(1u128 << k.min(100) as u32);
    if instances > NSP_ENUM_LIMIT {
        return Err(LpError::EnumerationGuard { instances });
    }

    let mut best: Option<f64> = None;
    let mut support: Vec<usize> = (0..k).collect();
    loop {
        let rest: Vec<usize> = (0..n).filter(|j| !support.contains(j)).collect();
        for mask in 0..(1u64 << k) {
            // Variables: p_a = |w| on support (k), then u_j, v_j per rest
            // column. Constraints: Hw = 0 and sum(p) = 1.
            let cols = k + 2 * rest.len();
            let mut constraints = vec![vec![0.0; cols]; m + 1];
            for (a, &j) in support.iter().enumerate() {
                let sign = if mask >> a & 1 == 0 { 1.0 } else { -1.0 };
                for &i in h.col_support(j) {
                    constraints[i][a] = sign;
                }
                constraints[m][a] = 1.0;
            }
            for (b, &j) in rest.iter().enumerate() {
                for &i in h.col_support(j) {
                    constraints[i][k + 2 * b] = 1.0;
                    constraints[i][k + 2 * b + 1] = -1.0;
                }
            }
            let mut objective = vec![1.0; cols];
            for slot in objective.iter_mut().take(k) {
                *slot = 0.0;
            }
            let mut rhs = vec![0.0; m + 1];
            rhs[m] = 1.0;
            match simplex(&LpProblem { objective, constraints, rhs }) {
                Ok(sol) => {
                    best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective)));
                }
                Err(LpError::Infeasible) => {}
                Err(e) => return Err(e),
            }
        }
        if !next_combination(&mut support, n) {
            break;
        }
    }
    Ok(best.unwrap_or(f64::INFINITY))
}
