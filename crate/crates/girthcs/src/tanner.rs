//! Tanner-graph analysis: girth, maximum column inner product, structural
//! profiles, and local tree expansions around a variable node.
//!
//! The Tanner graph of an m x n 0-1 matrix H is the bipartite graph with a
//! variable node per column, a check node per row, and an edge wherever
//! H[i][j] = 1. Cycles in this graph have even length >= 4.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::binmat::BinaryMatrix;

/// Girth of the Tanner graph: length of its shortest cycle, or `Infinite`
/// for a forest. `Ord` places every finite girth below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn as_finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

/// Computes the girth by breadth-first search from every variable node.
///
/// From a root r, a non-tree edge (u, w) witnesses a closed walk of length
/// d(u) + d(w) + 1 through r, which always contains a cycle, so no candidate
/// undercuts the girth; and when r lies on a shortest cycle the two arcs of
/// that cycle meet at its antipode and produce the exact value. Every cycle
/// of a bipartite graph passes through a variable node, so rooting at the
/// columns alone covers all cycles.
pub fn girth(h: &BinaryMatrix) -> Girth {
    let n = h.num_cols();
    let m = h.num_rows();
    // Vertices 0..n are columns, n..n+m are rows.
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n + m];
    let mut parent = vec![usize::MAX; n + m];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        dist[root] = 0;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // Any candidate seen from u has length >= 2*d(u), so deeper
            // vertices cannot improve on the current best.
            if best.is_some_and(|b| 2 * dist[u] >= b) {
                continue;
            }
            let scan = |w: usize, dist: &mut Vec<usize>, parent: &mut Vec<usize>, queue: &mut VecDeque<usize>, best: &mut Option<usize>| {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let cand = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| cand < b) {
                        *best = Some(cand);
                    }
                }
            };
            if u < n {
                for &i in h.col_support(u) {
                    scan(n + i, &mut dist, &mut parent, &mut queue, &mut best);
                }
            } else {
                for &j in h.row_support(u - n) {
                    scan(j, &mut dist, &mut parent, &mut queue, &mut best);
                }
            }
        }
    }
    match best {
        Some(g) => Girth::Finite(g),
        None => Girth::Infinite,
    }
}

/// Maximum inner product between two distinct columns: the largest number of
/// rows any pair of columns shares. Zero when no pair intersects (or n = 1).
pub fn max_inner_product(h: &BinaryMatrix) -> usize {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for i in 0..h.num_rows() {
        let sup = h.row_support(i);
        for a in 0..sup.len() {
            for b in (a + 1)..sup.len() {
                *counts.entry((sup[a], sup[b])).or_insert(0) += 1;
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Structural summary of a measurement matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub rows: usize,
    pub cols: usize,
    pub col_weights: Vec<usize>,
    pub row_weights: Vec<usize>,
    /// Uniform column weight, present exactly when all columns agree.
    pub gamma: Option<usize>,
    /// Maximum column inner product.
    pub lambda: usize,
    pub girth: Girth,
}

pub fn profile(h: &BinaryMatrix) -> Profile {
    let col_weights: Vec<usize> = (0..h.num_cols()).map(|j| h.col_weight(j)).collect();
    let row_weights: Vec<usize> = (0..h.num_rows()).map(|i| h.row_weight(i)).collect();
    let uniform = col_weights.windows(2).all(|p| p[0] == p[1]);
    Profile {
        rows: h.num_rows(),
        cols: h.num_cols(),
        gamma: uniform.then(|| col_weights[0]),
        col_weights,
        row_weights,
        lambda: max_inner_product(h),
        girth: girth(h),
    }
}

/// One occurrence of a variable node in a local tree level.
///
/// Levels are multisets: the same column index may occur several times,
/// once per distinct path from the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    /// Column index of this occurrence.
    pub var: usize,
    /// Check (row) through which it was reached.
    pub parent_check: usize,
    /// Child check of the root that this occurrence descends from.
    pub root_branch: usize,
}

/// Local tree around a root variable node.
///
/// Level u holds every backtrack-free path of length u + 1 checks away from
/// the root: level 0 lists, for each check f adjacent to the root, the other
/// variables of f; level u + 1 expands each occurrence through the checks
/// other than its parent. Levels are recorded as multisets in deterministic
/// order (parents in level order, checks and variables ascending).
#[derive(Debug, Clone)]
pub struct LocalTree {
    pub root: usize,
    /// Index of the deepest level computed; `levels.len() == depth + 1`.
    pub depth: usize,
    pub levels: Vec<Vec<TreeNode>>,
    /// `branch_sets[u]`: sorted variable occurrences of level u that descend
    /// from the lowest-index child check of the root.
    pub branch_sets: Vec<Vec<usize>>,
    /// True when the girth guarantees that levels 0..=depth are plain sets,
    /// pairwise disjoint, and avoid the root: two distinct backtrack-free
    /// paths to a common endpoint would close a cycle of length at most
    /// 4*depth + 4, so girth >= 4*depth + 6 rules every collision out.
    pub disjoint: bool,
}

/// Rejected [`local_tree`] inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeError {
    RootOutOfRange { root: usize, cols: usize },
    /// Column weights are not uniform, so the level-sum identities the tree
    /// exists to exhibit do not hold.
    NonRegular,
    /// The expansion needs gamma >= 2; a weight-1 column has no levels.
    GammaTooSmall(usize),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::RootOutOfRange { root, cols } => {
                write!(f, "root column {root} out of range for {cols} columns")
            }
            TreeError::NonRegular => write!(f, "column weights are not uniform"),
            TreeError::GammaTooSmall(g) => {
                write!(f, "local tree needs column weight >= 2, got {g}")
            }
        }
    }
}

impl std::error::Error for TreeError {}

pub fn local_tree(h: &BinaryMatrix, root: usize, depth: usize) -> Result<LocalTree, TreeError> {
    if root >= h.num_cols() {
        return Err(TreeError::RootOutOfRange { root, cols: h.num_cols() });
    }
    let gamma = h.col_weight(0);
    if (1..h.num_cols()).any(|j| h.col_weight(j) != gamma) {
        return Err(TreeError::NonRegular);
    }
    if gamma < 2 {
        return Err(TreeError::GammaTooSmall(gamma));
    }
    let mut levels: Vec<Vec<TreeNode>> = Vec::with_capacity(depth + 1);
    let mut level0 = Vec::new();
    for &f in h.col_support(root) {
        for &v in h.row_support(f) {
            if v != root {
                level0.push(TreeNode { var: v, parent_check: f, root_branch: f });
            }
        }
    }
    levels.push(level0);
    for _ in 0..depth {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for node in prev {
            for &f in h.col_support(node.var) {
                if f == node.parent_check {
                    continue;
                }
                for &v in h.row_support(f) {
                    if v != node.var {
                        next.push(TreeNode { var: v, parent_check: f, root_branch: node.root_branch });
                    }
                }
            }
        }
        levels.push(next);
    }

    let first_branch = h.col_support(root).first().copied();
    let branch_sets = levels
        .iter()
        .map(|level| {
            let mut vars: Vec<usize> = level
                .iter()
                .filter(|node| Some(node.root_branch) == first_branch)
                .map(|node| node.var)
                .collect();
            vars.sort_unstable();
            vars
        })
        .collect();

    let disjoint = match girth(h) {
        Girth::Infinite => true,
        Girth::Finite(g) => g >= 4 * depth + 6,
    };

    Ok(LocalTree { root, depth, levels, branch_sets, disjoint })
}

impl LocalTree {
    /// Multiset sum of `w` over level `u`.
    pub fn level_sum(&self, u: usize, w: &[f64]) -> f64 {
        self.levels[u].iter().map(|node| w[node.var]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binmat::{load_dense, BuiltinMatrix};

    #[test]
    fn builtin_profiles() {
        let expected = [
            (BuiltinMatrix::Eg32PointPlane, 4, 2, Girth::Finite(4)),
            (BuiltinMatrix::EuclidPlane, 2, 1, Girth::Finite(6)),
            (BuiltinMatrix::Cube, 2, 1, Girth::Finite(8)),
            (BuiltinMatrix::Gp52, 2, 1, Girth::Finite(10)),
            (BuiltinMatrix::Girth12, 2, 1, Girth::Finite(12)),
        ];
        for (b, gamma, lambda, g) in expected {
            let p = profile(&b.matrix());
            assert_eq!(p.gamma, Some(gamma), "{}", b.name());
            assert_eq!(p.lambda, lambda, "{}", b.name());
            assert_eq!(p.girth, g, "{}", b.name());
        }
    }

    #[test]
    fn girth_of_forest_is_infinite() {
        let h = load_dense("1 0\n1 0\n0 1\n").unwrap();
        assert_eq!(girth(&h), Girth::Infinite);
        // A single column cannot close a cycle either.
        let single = load_dense("1\n1\n1\n").unwrap();
        assert_eq!(girth(&single), Girth::Infinite);
    }

    #[test]
    fn identical_columns_have_full_inner_product() {
        let h = load_dense("1 1\n1 1\n1 1\n").unwrap();
        assert_eq!(max_inner_product(&h), 3);
        assert_eq!(girth(&h), Girth::Finite(4));
    }

    #[test]
    fn profile_of_unit_matrix() {
        let p = profile(&load_dense("1").unwrap());
        assert_eq!(p.gamma, Some(1));
        assert_eq!(p.girth, Girth::Infinite);
        assert_eq!(p.lambda, 0);
        assert_eq!(p.col_weights, vec![1]);
    }

    #[test]
    fn lambda_bounded_by_gamma_and_rows() {
        for b in BuiltinMatrix::ALL {
            let p = profile(&b.matrix());
            let gamma = p.gamma.unwrap();
            assert!(p.lambda <= gamma.min(p.rows), "{}", b.name());
        }
    }

    #[test]
    fn girth_of_repeated_column_pair_is_four() {
        let h = load_dense("1 1\n1 1\n").unwrap();
        assert_eq!(girth(&h), Girth::Finite(4));
        assert_eq!(max_inner_product(&h), 2);
    }

    #[test]
    fn girth_of_six_cycle() {
        // Three variables and three checks joined into a single 6-cycle.
        let h = load_dense("1 1 0\n0 1 1\n1 0 1\n").unwrap();
        assert_eq!(girth(&h), Girth::Finite(6));
    }

    #[test]
    fn girth_ordering() {
        assert!(Girth::Finite(4) < Girth::Finite(6));
        assert!(Girth::Finite(1_000_000) < Girth::Infinite);
        assert_eq!(Girth::Infinite, Girth::Infinite);
    }

    #[test]
    fn lambda_zero_for_disjoint_columns() {
        let h = load_dense("1 0\n0 1\n").unwrap();
        assert_eq!(max_inner_product(&h), 0);
    }

    #[test]
    fn girth_at_least_six_means_lambda_at_most_one() {
        for b in BuiltinMatrix::ALL {
            let h = b.matrix();
            let p = profile(&h);
            if p.girth >= Girth::Finite(6) {
                assert!(p.lambda <= 1, "{}", b.name());
            } else {
                assert!(p.lambda >= 2, "{}", b.name());
            }
        }
    }

    #[test]
    fn local_tree_euclid_plane_levels() {
        let h = BuiltinMatrix::EuclidPlane.matrix();
        let t = local_tree(&h, 0, 1).unwrap();
        // Root column 0 sits on checks 0 and 1 (weight 3 each), so level 0
        // holds four occurrences, and with gamma = 2 each expands through
        // its single remaining check into two more.
        assert_eq!(t.levels[0].len(), 4);
        let vars0: Vec<usize> = t.levels[0].iter().map(|n| n.var).collect();
        assert_eq!(vars0, vec![2, 3, 1, 4]);
        assert_eq!(t.levels[1].len(), 8);
        assert_eq!(t.branch_sets[0], vec![2, 3]);
        assert_eq!(t.branch_sets[1], vec![1, 4, 5, 5]);
        // depth 1 needs girth >= 10; the plane only has girth 6.
        assert!(!t.disjoint);
        assert!(local_tree(&h, 0, 0).unwrap().disjoint);
    }

    #[test]
    fn local_tree_rejects_unsuitable_input() {
        let h = BuiltinMatrix::EuclidPlane.matrix();
        assert_eq!(
            local_tree(&h, 6, 0).unwrap_err(),
            TreeError::RootOutOfRange { root: 6, cols: 6 }
        );
        let irregular = load_dense("1 1\n0 1\n").unwrap();
        assert_eq!(local_tree(&irregular, 0, 0).unwrap_err(), TreeError::NonRegular);
        let weight_one = load_dense("1 0\n0 1\n").unwrap();
        assert_eq!(local_tree(&weight_one, 0, 0).unwrap_err(), TreeError::GammaTooSmall(1));
    }

    #[test]
    fn local_tree_level_sizes_on_regular_builtins() {
        // For a matrix with uniform column weight gamma and uniform row
        // weight rho, level u has gamma*(gamma-1)^u*(rho-1)^(u+1) occurrences.
        for (b, gamma, rho) in [
            (BuiltinMatrix::Cube, 2usize, 3usize),
            (BuiltinMatrix::Gp52, 2, 3),
            (BuiltinMatrix::EuclidPlane, 2, 3),
        ] {
            let h = b.matrix();
            let t = local_tree(&h, 0, 2).unwrap();
            for u in 0..=2 {
                let expect = gamma * (gamma - 1).pow(u as u32) * (rho - 1).pow(u as u32 + 1);
                assert_eq!(t.levels[u].len(), expect, "{} level {}", b.name(), u);
            }
        }
    }

    #[test]
    fn local_tree_disjoint_levels_are_sets() {
        // Whenever the flag is on, the levels really are pairwise disjoint
        // sets that exclude the root.
        for b in BuiltinMatrix::ALL {
            let h = b.matrix();
            for depth in 0..3 {
                for root in 0..h.num_cols() {
                    let t = local_tree(&h, root, depth).unwrap();
                    if !t.disjoint {
                        continue;
                    }
                    let mut seen = vec![false; h.num_cols()];
                    seen[root] = true;
                    for level in &t.levels {
                        for node in level {
                            assert!(
                                !seen[node.var],
                                "{} root {root} depth {depth}: {} repeated",
                                b.name(),
                                node.var
                            );
                            seen[node.var] = true;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn local_tree_nullspace_level_sums() {
        // For w in the nullspace of a column-regular matrix, summing w over
        // level u of any local tree gives (-1)^(u+1) * gamma * (gamma-1)^u
        // times the root coordinate, whether or not the levels are disjoint.
        for b in BuiltinMatrix::ALL {
            let h = b.matrix();
            let gamma = profile(&h).gamma.unwrap() as f64;
            let w: Vec<f64> = b.certificate().iter().map(|&v| v as f64).collect();
            for root in 0..h.num_cols() {
                let t = local_tree(&h, root, 3).unwrap();
                for u in 0..=3 {
                    let sign = if u % 2 == 0 { -1.0 } else { 1.0 };
                    let expect = sign * gamma * (gamma - 1.0).powi(u as i32) * w[root];
                    assert!(
                        (t.level_sum(u, &w) - expect).abs() < 1e-9,
                        "{} root {root} level {u}",
                        b.name()
                    );
                }
            }
        }
    }
}
