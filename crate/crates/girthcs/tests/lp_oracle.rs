//! Cross-checks for the simplex solver and everything downstream of it.
//!
//! The independent reference here is exhaustive vertex enumeration: for a
//! standard-form LP with a handful of columns, every basic solution can be
//! listed by solving each independent column subset directly, so the true
//! optimum (and feasibility) is known without running any pivoting code.
//! Unboundedness is checked the same way, by enumerating the vertices of the
//! normalized recession cone.
//!
//! The second half turns the solver loose on the built-in matrices and checks
//! that the vectors it produces obey the structural facts the analysis side
//! promises: recovery errors lie in the nullspace, spread their mass over at
//! least `c0` coordinates, balance their positive and negative parts, and
//! satisfy the local-tree level-sum identities.

use girthcs::binmat::BuiltinMatrix;
use girthcs::bounds;
use girthcs::lpsolve::{self, LpError, LpProblem};
use girthcs::tanner;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Looser than the solver's own tolerances: the oracle does plain Gaussian
/// elimination on small integer data, so everything is exact to far better
/// than this.
const TOL: f64 = 1e-7;

/// Solves the square-ish system A[:, subset] x = b. Returns the unique
/// solution when the selected columns are independent and the system is
/// consistent, and None otherwise.
fn solve_subset(a: &[Vec<f64>], b: &[f64], subset: &[usize]) -> Option<Vec<f64>> {
    let m = a.len();
    let s = subset.len();
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = subset.iter().map(|&j| a[i][j]).collect();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..s {
        let pivot = (col..m).max_by(|&p, &q| {
            t[p][col].abs().partial_cmp(&t[q][col].abs()).expect("finite test data")
        })?;
        if t[pivot][col].abs() <= TOL {
            return None; // dependent columns: not a basis
        }
        t.swap(col, pivot);
        let pivot_row = t[col].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != col && row[col] != 0.0 {
                let f = row[col] / pivot_row[col];
                for (dst, &src) in row[col..=s].iter_mut().zip(&pivot_row[col..=s]) {
                    *dst -= f * src;
                }
            }
        }
    }
    for row in t.iter().take(m).skip(s) {
        if row[s].abs() > TOL {
            return None; // inconsistent
        }
    }
    Some((0..s).map(|r| t[r][s] / t[r][r]).collect())
}

/// Exhaustive reference optimum for min c.x over Ax = b, x >= 0.
///
/// Every vertex of the feasible set has linearly independent support columns,
/// and a feasible problem over x >= 0 always has a vertex, so scanning all
/// column subsets of size at most m finds the optimum of any bounded feasible
/// instance and proves infeasibility (None) otherwise.
fn vertex_optimum(p: &LpProblem) -> Option<f64> {
    let m = p.constraints.len();
    let n = p.objective.len();
    assert!(n <= 20, "vertex enumeration is exponential in the column count");
    let mut best: Option<f64> = None;
    for mask in 0u32..(1u32 << n) {
        if (mask.count_ones() as usize) > m {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let Some(x) = solve_subset(&p.constraints, &p.rhs, &subset) else { continue };
        if x.iter().any(|&v| v < -TOL) {
            continue;
        }
        let obj: f64 = subset.iter().zip(&x).map(|(&j, &v)| p.objective[j] * v).sum();
        if best.is_none_or(|b| obj < b) {
            best = Some(obj);
        }
    }
    best
}

/// Reference check for unboundedness: the minimum of c.d over the normalized
/// recession cone {d >= 0, Ad = 0, sum d = 1}, or None when the cone is
/// trivial. A feasible instance is unbounded exactly when this is negative.
fn ray_optimum(p: &LpProblem) -> Option<f64> {
    let n = p.objective.len();
    let mut constraints = p.constraints.clone();
    constraints.push(vec![1.0; n]);
    let mut rhs = vec![0.0; p.constraints.len()];
    rhs.push(1.0);
    vertex_optimum(&LpProblem { objective: p.objective.clone(), constraints, rhs })
}

fn int_below(r: &mut ChaCha12Rng, bound: u64) -> i64 {
    (r.next_u64() % bound) as i64
}

/// Random instance with small integer data. `feasible` plants a nonnegative
/// solution and keeps costs nonnegative, so the instance is bounded and
/// feasible by construction; otherwise rhs and costs are arbitrary and any
/// of the three outcomes can occur.
fn random_lp(seed: u64, feasible: bool) -> LpProblem {
    let mut r = ChaCha12Rng::seed_from_u64(seed);
    let m = 1 + (r.next_u64() % 4) as usize;
    let n = m + 1 + (r.next_u64() % 5) as usize;
    let constraints: Vec<Vec<f64>> =
        (0..m).map(|_| (0..n).map(|_| (int_below(&mut r, 5) - 2) as f64).collect()).collect();
    let (objective, rhs) = if feasible {
        let planted: Vec<f64> = (0..n).map(|_| int_below(&mut r, 3) as f64).collect();
        let rhs = constraints
            .iter()
            .map(|row| row.iter().zip(&planted).map(|(a, x)| a * x).sum())
            .collect();
        let objective = (0..n).map(|_| int_below(&mut r, 6) as f64).collect();
        (objective, rhs)
    } else {
        let rhs = (0..m).map(|_| (int_below(&mut r, 7) - 3) as f64).collect();
        let objective = (0..n).map(|_| (int_below(&mut r, 9) - 4) as f64).collect();
        (objective, rhs)
    };
    LpProblem { objective, constraints, rhs }
}

#[test]
fn simplex_matches_vertex_enumeration_on_feasible_instances() {
    for seed in 0..300u64 {
        let p = random_lp(seed, true);
        let sol = lpsolve::simplex(&p).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let best = vertex_optimum(&p).expect("feasible by construction");
        assert!(
            (sol.objective - best).abs() <= TOL * (1.0 + best.abs()),
            "seed {seed}: simplex found {} but the vertices say {best}",
            sol.objective
        );
        // The reported point is feasible and its cost matches the report.
        for (row, &b) in p.constraints.iter().zip(&p.rhs) {
            let ax: f64 = row.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
            assert!((ax - b).abs() <= TOL * (1.0 + b.abs()), "seed {seed}: Ax != b");
        }
        assert!(sol.x.iter().all(|&v| v >= -TOL), "seed {seed}: negative coordinate");
        let cx: f64 = p.objective.iter().zip(&sol.x).map(|(c, x)| c * x).sum();
        assert!((cx - sol.objective).abs() <= TOL * (1.0 + cx.abs()), "seed {seed}: c.x mismatch");
    }
}

#[test]
fn simplex_classification_agrees_with_vertex_enumeration() {
    let (mut optimal, mut infeasible, mut unbounded) = (0u32, 0u32, 0u32);
    for seed in 1000..1500u64 {
        let p = random_lp(seed, false);
        let best = vertex_optimum(&p);
        match lpsolve::simplex(&p) {
            Ok(sol) => {
                let best = best
                    .unwrap_or_else(|| panic!("seed {seed}: optimal answer on empty polytope"));
                assert!(
                    (sol.objective - best).abs() <= TOL * (1.0 + best.abs()),
                    "seed {seed}: simplex found {} but the vertices say {best}",
                    sol.objective
                );
                if let Some(ray) = ray_optimum(&p) {
                    assert!(ray >= -TOL, "seed {seed}: missed an unbounded ray of cost {ray}");
                }
                optimal += 1;
            }
            Err(LpError::Infeasible) => {
                assert!(best.is_none(), "seed {seed}: infeasible verdict, but {best:?} exists");
                infeasible += 1;
            }
            Err(LpError::Unbounded) => {
                assert!(best.is_some(), "seed {seed}: unbounded verdict on empty polytope");
                let ray = ray_optimum(&p)
                    .unwrap_or_else(|| panic!("seed {seed}: unbounded verdict without any ray"));
                assert!(ray < -TOL, "seed {seed}: unbounded verdict, best ray costs {ray}");
                unbounded += 1;
            }
            Err(e) => panic!("seed {seed}: unexpected error {e}"),
        }
    }
    // The generator must actually exercise all three outcomes.
    assert!(
        optimal >= 20 && infeasible >= 20 && unbounded >= 20,
        "outcome mix too lopsided: {optimal} optimal / {infeasible} infeasible / {unbounded} unbounded"
    );
}

fn ratio_to_f64(r: girthcs::Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn theoretical_c0(b: BuiltinMatrix) -> f64 {
    let bundle = bounds::guarantee(&tanner::profile(&b.matrix())).expect("builtins are analyzable");
    ratio_to_f64(bundle.c0)
}

#[test]
fn empirical_spread_constant_matches_theory_on_builtins() {
    for b in BuiltinMatrix::ALL {
        let c0 = theoretical_c0(b);
        let emp = lpsolve::empirical_c0(&b.matrix()).expect("small LPs");
        assert!(
            (emp - c0).abs() <= 1e-7 * c0,
            "{}: empirical constant {emp} vs theoretical {c0}",
            b.name()
        );
    }
}

/// Asserts the structural facts every nonzero nullspace vector of a
/// column-regular matrix must satisfy: zero syndrome, balanced signs, and at
/// least `c0` worth of spread in both pseudoweights.
fn check_nullspace_spread(h: &girthcs::BinaryMatrix, w: &[f64], c0: f64, context: &str) {
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    assert!(l1 > TOL, "{context}: expected a nonzero vector");
    let syndrome = h.mul_vec(w).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    assert!(syndrome <= 1e-6 * (1.0 + l1), "{context}: syndrome {syndrome}");
    let positive: f64 = w.iter().filter(|v| **v > 0.0).sum();
    let negative: f64 = w.iter().filter(|v| **v < 0.0).sum();
    assert!(
        (positive + negative).abs() <= 1e-6 * (1.0 + l1),
        "{context}: unbalanced parts {positive} vs {negative}"
    );
    let linf = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let maxfrac = l1 / linf;
    assert!(maxfrac >= c0 - 1e-6, "{context}: max-fractional pseudoweight {maxfrac} below {c0}");
    let l2sq: f64 = w.iter().map(|v| v * v).sum();
    let awgn = l1 * l1 / l2sq;
    assert!(awgn >= maxfrac - 1e-6, "{context}: AWGN pseudoweight {awgn} below {maxfrac}");
}

/// A signal that copies a tight nullspace vector on all but its smallest
/// support coordinate. Subtracting the whole vector is then strictly cheaper
/// in l1, so basis pursuit provably returns something else and the difference
/// is a nonzero nullspace vector produced by the solver itself.
fn defeating_signal(b: BuiltinMatrix) -> Vec<f64> {
    let cert: Vec<f64> = b.certificate().iter().map(|&v| v as f64).collect();
    let drop = cert
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
        .map(|(j, _)| j)
        .expect("certificates are nonzero");
    let mut x = cert;
    x[drop] = 0.0;
    x
}

#[test]
fn recovery_errors_lie_in_the_nullspace_and_spread_out() {
    for b in BuiltinMatrix::ALL {
        let h = b.matrix();
        let c0 = theoretical_c0(b);
        let x = defeating_signal(b);
        let rec = lpsolve::basis_pursuit(&h, &h.mul_vec(&x)).expect("consistent measurements");
        let cmp = lpsolve::compare_with_reference(&x, &rec.estimate);
        assert!(
            !cmp.success,
            "{}: dropping one certificate coordinate should defeat recovery",
            b.name()
        );
        let error: Vec<f64> = rec.estimate.iter().zip(&x).map(|(e, r)| e - r).collect();
        check_nullspace_spread(&h, &error, c0, b.name());
    }
}

#[test]
fn random_recovery_failures_still_spread_out() {
    for b in BuiltinMatrix::ALL {
        let h = b.matrix();
        let n = h.num_cols();
        let c0 = theoretical_c0(b);
        let bundle = bounds::guarantee(&tanner::profile(&h)).expect("builtins are analyzable");
        let k = (bundle.k_max as usize + 2).min(n - 1);
        let mut r = ChaCha12Rng::seed_from_u64(23 + b as u64);
        let mut failures = 0;
        for trial in 0..60 {
            // Random support of size k via partial shuffle, random signs.
            let mut perm: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = i + (r.next_u64() as usize) % (n - i);
                perm.swap(i, j);
            }
            let mut x = vec![0.0; n];
            for &j in &perm[..k] {
                x[j] = if r.next_u64() % 2 == 0 { 1.0 } else { -1.0 };
            }
            let rec = lpsolve::basis_pursuit(&h, &h.mul_vec(&x)).expect("consistent");
            let cmp = lpsolve::compare_with_reference(&x, &rec.estimate);
            if cmp.success {
                continue;
            }
            failures += 1;
            let error: Vec<f64> = rec.estimate.iter().zip(&x).map(|(e, v)| e - v).collect();
            check_nullspace_spread(&h, &error, c0, &format!("{} trial {trial}", b.name()));
        }
        // Not every trial fails past the guarantee, but some must: otherwise
        // this test is checking nothing.
        assert!(failures > 0, "{}: no failures at k = {k}", b.name());
    }
}

#[test]
fn recovery_errors_satisfy_local_tree_level_sums() {
    // Depth-1 trees need girth >= 10; depth-0 trees need girth >= 6.
    let cases = [
        (BuiltinMatrix::EuclidPlane, 0usize),
        (BuiltinMatrix::Cube, 0),
        (BuiltinMatrix::Gp52, 1),
        (BuiltinMatrix::Girth12, 1),
    ];
    for (b, depth) in cases {
        let h = b.matrix();
        let gamma = h.col_weight(0) as f64;
        let x = defeating_signal(b);
        let rec = lpsolve::basis_pursuit(&h, &h.mul_vec(&x)).expect("consistent");
        let w: Vec<f64> = rec.estimate.iter().zip(&x).map(|(e, r)| e - r).collect();
        for root in 0..h.num_cols() {
            if w[root].abs() <= TOL {
                continue;
            }
            let tree = tanner::local_tree(&h, root, depth).expect("regular builtin");
            assert!(tree.disjoint, "{}: depth {depth} tree should be disjoint", b.name());
            let mut expected = -gamma * w[root];
            for u in 0..=depth {
                let sum = tree.level_sum(u, &w);
                assert!(
                    (sum - expected).abs() <= 1e-6 * (1.0 + expected.abs()),
                    "{}: root {root} level {u}: sum {sum}, expected {expected}",
                    b.name()
                );
                expected *= -(gamma - 1.0);
            }
        }
    }
}
