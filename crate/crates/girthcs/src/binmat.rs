//! Binary 0-1 measurement matrices: sparse representation, file formats,
//! builtin reference matrices, and a girth-aware column-regular generator.
//!
//! A matrix is stored by its column and row supports (sorted index lists).
//! Values are implicitly 0/1; there is no dense storage.

use std::fmt;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::tanner::{self, Girth};

/// Immutable sparse 0-1 matrix, held as sorted column and row supports.
///
/// Both supports describe the same matrix; the row side is derived at
/// construction and kept consistent. All index lists are strictly
/// increasing, so entries are 0/1 by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    col_support: Vec<Vec<usize>>,
    row_support: Vec<Vec<usize>>,
}

/// Construction errors for [`BinaryMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// Row or column count is zero.
    EmptyDimension,
    /// A support entry refers to a row that does not exist.
    IndexOutOfRange { col: usize, index: usize },
    /// The same row appears twice in one column.
    DuplicateIndex { col: usize, index: usize },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::EmptyDimension => write!(f, "matrix dimensions must be positive"),
            MatrixError::IndexOutOfRange { col, index } => {
                write!(f, "column {col}: row index {index} out of range")
            }
            MatrixError::DuplicateIndex { col, index } => {
                write!(f, "column {col}: duplicate row index {index}")
            }
        }
    }
}

impl std::error::Error for MatrixError {}

impl BinaryMatrix {
    /// Builds a matrix from per-column row indices. Lists are sorted here;
    /// duplicates and out-of-range indices are rejected.
    pub fn from_col_support(
        rows: usize,
        cols: usize,
        col_support: Vec<Vec<usize>>,
    ) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyDimension);
        }
        assert_eq!(col_support.len(), cols, "one support list per column");
        let mut col_support = col_support;
        let mut row_support = vec![Vec::new(); rows];
        for (j, support) in col_support.iter_mut().enumerate() {
            support.sort_unstable();
            for pair in support.windows(2) {
                if pair[0] == pair[1] {
                    return Err(MatrixError::DuplicateIndex { col: j, index: pair[0] });
                }
            }
            for &i in support.iter() {
                if i >= rows {
                    return Err(MatrixError::IndexOutOfRange { col: j, index: i });
                }
                row_support[i].push(j);
            }
        }
        // Row lists come out sorted because columns are visited in order.
        Ok(BinaryMatrix { rows, cols, col_support, row_support })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    /// Sorted row indices of the 1s in column `j`.
    pub fn col_support(&self, j: usize) -> &[usize] {
        &self.col_support[j]
    }

    /// Sorted column indices of the 1s in row `i`.
    pub fn row_support(&self, i: usize) -> &[usize] {
        &self.row_support[i]
    }

    pub fn col_weight(&self, j: usize) -> usize {
        self.col_support[j].len()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_support[i].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.col_support[j].binary_search(&i).is_ok()
    }

    /// Measurement map y = Hx.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        let mut y = vec![0.0; self.rows];
        for (j, support) in self.col_support.iter().enumerate() {
            if x[j] != 0.0 {
                for &i in support {
                    y[i] += x[j];
                }
            }
        }
        y
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix({}x{})", self.rows, self.cols)
    }
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// Parse failure in one of the text formats, tagged with a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    ExpectedInteger(String),
    NonBinaryToken(String),
    RaggedRow { expected: usize, found: usize },
    WeightMismatch(String),
    IndexOutOfRange { index: usize, limit: usize },
    DuplicateIndex(usize),
    InconsistentSections(String),
    UnexpectedEnd,
    Empty,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::MalformedHeader(msg) => write!(f, "malformed header: {msg}"),
            ParseErrorKind::ExpectedInteger(tok) => write!(f, "expected integer, found `{tok}`"),
            ParseErrorKind::NonBinaryToken(tok) => write!(f, "non-binary token `{tok}`"),
            ParseErrorKind::RaggedRow { expected, found } => {
                write!(f, "ragged row: expected {expected} tokens, found {found}")
            }
            ParseErrorKind::WeightMismatch(msg) => write!(f, "weight mismatch: {msg}"),
            ParseErrorKind::IndexOutOfRange { index, limit } => {
                write!(f, "index {index} out of range (limit {limit})")
            }
            ParseErrorKind::DuplicateIndex(index) => write!(f, "duplicate index {index}"),
            ParseErrorKind::InconsistentSections(msg) => {
                write!(f, "row/column sections inconsistent: {msg}")
            }
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Empty => write!(f, "empty input"),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| err(line, ParseErrorKind::ExpectedInteger(tok.to_string())))
}

/// Loads the alist interchange format.
///
/// Layout: `n m`, then `max_col_weight max_row_weight`, then the n column
/// weights, the m row weights, one line of 1-based row indices per column
/// and one line of 1-based column indices per row, each right-padded with
/// `0` to the declared maximum weight.
pub fn load_alist(text: &str) -> Result<BinaryMatrix, ParseError> {
    // (1-based line number, tokens) for every non-blank line.
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect();
    let mut cursor = lines.into_iter();
    let last_line = text.lines().count().max(1);
    let mut next = |expected_len: Option<usize>| -> Result<(usize, Vec<&str>), ParseError> {
        let (line, toks) = cursor.next().ok_or(err(last_line, ParseErrorKind::UnexpectedEnd))?;
        if let Some(len) = expected_len {
            if toks.len() != len {
                return Err(err(line, ParseErrorKind::RaggedRow { expected: len, found: toks.len() }));
            }
        }
        Ok((line, toks))
    };

    let (hline, header) = next(None)?;
    if header.len() != 2 {
        return Err(err(hline, ParseErrorKind::MalformedHeader("expected `n m`".into())));
    }
    let n = parse_usize(header[0], hline)?;
    let m = parse_usize(header[1], hline)?;
    if n == 0 || m == 0 {
        return Err(err(hline, ParseErrorKind::MalformedHeader("dimensions must be positive".into())));
    }

    let (wline, wmax) = next(None)?;
    if wmax.len() != 2 {
        return Err(err(wline, ParseErrorKind::MalformedHeader("expected `max_col_weight max_row_weight`".into())));
    }
    let max_col_w = parse_usize(wmax[0], wline)?;
    let max_row_w = parse_usize(wmax[1], wline)?;

    let (cline, ctoks) = next(Some(n))?;
    let mut col_weights = Vec::with_capacity(n);
    for tok in &ctoks {
        let w = parse_usize(tok, cline)?;
        if w > max_col_w {
            return Err(err(cline, ParseErrorKind::WeightMismatch(format!(
                "declared column weight {w} exceeds maximum {max_col_w}"
            ))));
        }
        col_weights.push(w);
    }
    let (rline, rtoks) = next(Some(m))?;
    let mut row_weights = Vec::with_capacity(m);
    for tok in &rtoks {
        let w = parse_usize(tok, rline)?;
        if w > max_row_w {
            return Err(err(rline, ParseErrorKind::WeightMismatch(format!(
                "declared row weight {w} exceeds maximum {max_row_w}"
            ))));
        }
        row_weights.push(w);
    }

    // Reads one padded index line: `weight` nonzero 1-based entries, then zeros.
    let read_index_line = |(line, toks): (usize, Vec<&str>),
                           weight: usize,
                           limit: usize|
     -> Result<Vec<usize>, ParseError> {
        let mut indices = Vec::with_capacity(weight);
        for (pos, tok) in toks.iter().enumerate() {
            let v = parse_usize(tok, line)?;
            if pos < weight {
                if v == 0 {
                    return Err(err(line, ParseErrorKind::WeightMismatch(format!(
                        "expected {weight} nonzero indices, found zero padding at position {}",
                        pos + 1
                    ))));
                }
                if v > limit {
                    return Err(err(line, ParseErrorKind::IndexOutOfRange { index: v, limit }));
                }
                indices.push(v - 1);
            } else if v != 0 {
                return Err(err(line, ParseErrorKind::WeightMismatch(format!(
                    "expected zero padding after {weight} indices, found `{v}`"
                ))));
            }
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(err(line, ParseErrorKind::DuplicateIndex(pair[0] + 1)));
            }
        }
        Ok(sorted)
    };

    let mut col_support = Vec::with_capacity(n);
    for &w in &col_weights {
        let entry = next(Some(max_col_w))?;
        col_support.push(read_index_line(entry, w, m)?);
    }
    let mut row_support = Vec::with_capacity(m);
    for &w in &row_weights {
        let entry = next(Some(max_row_w))?;
        row_support.push(read_index_line(entry, w, n)?);
    }

    let matrix = BinaryMatrix::from_col_support(m, n, col_support).map_err(|e| {
        err(1, ParseErrorKind::WeightMismatch(e.to_string()))
    })?;
    // The row section is redundant; require it to agree with the columns.
    for (i, declared) in row_support.iter().enumerate() {
        if matrix.row_support(i) != declared.as_slice() {
            return Err(err(1, ParseErrorKind::InconsistentSections(format!(
                "row {} does not match the transpose of the column section",
                i + 1
            ))));
        }
    }
    Ok(matrix)
}

/// Serializes to alist text (inverse of [`load_alist`]).
pub fn save_alist(h: &BinaryMatrix) -> String {
    let m = h.num_rows();
    let n = h.num_cols();
    let max_col_w = (0..n).map(|j| h.col_weight(j)).max().unwrap_or(0).max(1);
    let max_row_w = (0..m).map(|i| h.row_weight(i)).max().unwrap_or(0).max(1);
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col_w} {max_row_w}\n"));
    let weights = |ws: Vec<usize>| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
    out.push_str(&weights((0..n).map(|j| h.col_weight(j)).collect()));
    out.push('\n');
    out.push_str(&weights((0..m).map(|i| h.row_weight(i)).collect()));
    out.push('\n');
    let padded = |support: &[usize], width: usize| {
        let mut toks: Vec<String> = support.iter().map(|i| (i + 1).to_string()).collect();
        toks.resize(width, "0".to_string());
        toks.join(" ")
    };
    for j in 0..n {
        out.push_str(&padded(h.col_support(j), max_col_w));
        out.push('\n');
    }
    for i in 0..m {
        out.push_str(&padded(h.row_support(i), max_row_w));
        out.push('\n');
    }
    out
}

/// Loads a dense 0/1 text matrix: one row per line, whitespace-separated tokens.
pub fn load_dense(text: &str) -> Result<BinaryMatrix, ParseError> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match width {
            None => width = Some(toks.len()),
            Some(w) if w != toks.len() => {
                return Err(err(lineno, ParseErrorKind::RaggedRow { expected: w, found: toks.len() }));
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(toks.len());
        for tok in toks {
            match tok {
                "0" => row.push(false),
                "1" => row.push(true),
                other => return Err(err(lineno, ParseErrorKind::NonBinaryToken(other.to_string()))),
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(1, ParseErrorKind::Empty));
    }
    let m = rows.len();
    let n = rows[0].len();
    let mut col_support = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for (j, &one) in row.iter().enumerate() {
            if one {
                col_support[j].push(i);
            }
        }
    }
    BinaryMatrix::from_col_support(m, n, col_support)
        .map_err(|e| err(1, ParseErrorKind::MalformedHeader(e.to_string())))
}

/// Serializes to dense 0/1 text (inverse of [`load_dense`]).
pub fn save_dense(h: &BinaryMatrix) -> String {
    let mut out = String::new();
    for i in 0..h.num_rows() {
        let mut row = vec![b'0'; h.num_cols()];
        for &j in h.row_support(i) {
            row[j] = b'1';
        }
        let toks: Vec<String> = row.iter().map(|b| (*b as char).to_string()).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Builtin matrices
// ---------------------------------------------------------------------------

/// The five builtin reference matrices.
///
/// Each is a small incidence matrix with uniform column weight whose
/// coordinate bound is met with equality by a known nullspace vector
/// (see [`BuiltinMatrix::certificate`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinMatrix {
    /// Point-plane incidence matrix of the 3-dimensional Euclidean geometry
    /// over GF(2): 8x14, column weight 4, girth 4.
    Eg32PointPlane,
    /// Point-line incidence matrix of the Euclidean plane over GF(2):
    /// 4x6, column weight 2, girth 6.
    EuclidPlane,
    /// Point-line incidence matrix of the cube: 8x12, column weight 2, girth 8.
    Cube,
    /// Point-line incidence matrix of the generalized pentagon GP(5,2):
    /// 10x15, column weight 2, girth 10.
    Gp52,
    /// A 10x12 column-weight-2 matrix with girth 12.
    Girth12,
}

const EG32_POINTPLANE: &str = "\
1 0 0 1 1 1 0 0 1 1 0 0 0 1
0 1 0 0 1 1 1 1 0 1 1 0 0 0
1 0 1 0 0 1 1 0 1 0 1 1 0 0
1 1 0 1 0 0 1 0 0 1 0 1 1 0
1 1 1 0 1 0 0 0 0 0 1 0 1 1
0 1 1 1 0 1 0 1 0 0 0 1 0 1
0 0 1 1 1 0 1 1 1 0 0 0 1 0
0 0 0 0 0 0 0 1 1 1 1 1 1 1
";

const EUCLID_PLANE: &str = "\
1 0 1 1 0 0
1 1 0 0 1 0
0 1 1 0 0 1
0 0 0 1 1 1
";

const CUBE: &str = "\
1 0 0 1 0 0 0 0 1 0 0 0
1 1 0 0 0 0 0 0 0 1 0 0
0 1 1 0 1 0 0 0 0 0 0 0
0 0 1 1 0 0 1 0 0 0 0 0
0 0 0 0 0 0 0 1 1 0 0 1
0 0 0 0 0 0 0 0 0 1 1 1
0 0 0 0 1 1 0 0 0 0 1 0
0 0 0 0 0 1 1 1 0 0 0 0
";

const GP52: &str = "\
1 0 0 0 1 1 0 0 0 0 0 0 0 0 0
1 1 0 0 0 0 0 0 0 1 0 0 0 0 0
0 1 1 0 0 0 0 0 1 0 0 0 0 0 0
0 0 1 1 0 0 0 1 0 0 0 0 0 0 0
0 0 0 1 1 0 1 0 0 0 0 0 0 0 0
0 0 0 0 0 1 0 0 0 0 1 0 0 0 1
0 0 0 0 0 0 0 0 0 1 0 0 1 1 0
0 0 0 0 0 0 0 0 1 0 1 1 0 0 0
0 0 0 0 0 0 0 1 0 0 0 0 0 1 1
0 0 0 0 0 0 1 0 0 0 0 1 1 0 0
";

const GIRTH12: &str = "\
1 1 1 0 0 0 0 0 0 0 0 0
0 0 0 1 1 1 0 0 0 0 0 0
0 0 0 0 0 0 1 1 1 0 0 0
0 0 0 0 0 0 0 0 0 1 1 1
1 0 0 1 0 0 0 0 0 0 0 0
0 0 0 0 1 0 1 0 0 0 0 0
0 1 0 0 0 0 0 1 0 0 0 0
0 0 1 0 0 0 0 0 0 1 0 0
0 0 0 0 0 1 0 0 0 0 1 0
0 0 0 0 0 0 0 0 1 0 0 1
";

impl BuiltinMatrix {
    pub const ALL: [BuiltinMatrix; 5] = [
        BuiltinMatrix::Eg32PointPlane,
        BuiltinMatrix::EuclidPlane,
        BuiltinMatrix::Cube,
        BuiltinMatrix::Gp52,
        BuiltinMatrix::Girth12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinMatrix::Eg32PointPlane => "eg32_pointplane",
            BuiltinMatrix::EuclidPlane => "euclid_plane",
            BuiltinMatrix::Cube => "cube",
            BuiltinMatrix::Gp52 => "gp52",
            BuiltinMatrix::Girth12 => "girth12",
        }
    }

    fn dense_text(self) -> &'static str {
        match self {
            BuiltinMatrix::Eg32PointPlane => EG32_POINTPLANE,
            BuiltinMatrix::EuclidPlane => EUCLID_PLANE,
            BuiltinMatrix::Cube => CUBE,
            BuiltinMatrix::Gp52 => GP52,
            BuiltinMatrix::Girth12 => GIRTH12,
        }
    }

    pub fn matrix(self) -> BinaryMatrix {
        load_dense(self.dense_text()).expect("builtin matrices are well-formed")
    }

    /// A nullspace vector meeting the matrix's coordinate bound with
    /// equality: every nonzero entry has magnitude l1/c0.
    pub fn certificate(self) -> Vec<i64> {
        match self {
            BuiltinMatrix::Eg32PointPlane => vec![1, -1, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0],
            BuiltinMatrix::EuclidPlane => vec![1, 0, -1, 0, -1, 1],
            BuiltinMatrix::Cube => vec![1, -1, 1, -1, 0, 0, 0, 0, 0, 0, 0, 0],
            BuiltinMatrix::Gp52 => vec![-1, 1, 0, 0, 1, 0, -1, 0, -1, 0, 0, 1, 0, 0, 0],
            BuiltinMatrix::Girth12 => vec![1, 0, -1, -1, 0, 1, 0, 0, 0, 1, -1, 0],
        }
    }
}

/// Unknown builtin matrix name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownBuiltin(pub String);

impl fmt::Display for UnknownBuiltin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown builtin matrix `{}` (expected one of: ", self.0)?;
        let names: Vec<&str> = BuiltinMatrix::ALL.iter().map(|b| b.name()).collect();
        write!(f, "{})", names.join(", "))
    }
}

impl std::error::Error for UnknownBuiltin {}

impl std::str::FromStr for BuiltinMatrix {
    type Err = UnknownBuiltin;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinMatrix::ALL
            .iter()
            .copied()
            .find(|b| b.name() == s)
            .ok_or_else(|| UnknownBuiltin(s.to_string()))
    }
}

/// Looks up a builtin matrix by name.
pub fn builtin(name: &str) -> Result<BinaryMatrix, UnknownBuiltin> {
    name.parse::<BuiltinMatrix>().map(BuiltinMatrix::matrix)
}

// ---------------------------------------------------------------------------
// Column-regular generator
// ---------------------------------------------------------------------------

/// Parameters for [`generate_regular`].
#[derive(Debug, Clone, Copy)]
pub struct GenerateConfig {
    pub rows: usize,
    pub cols: usize,
    /// Uniform column weight.
    pub gamma: usize,
    /// Required girth of the result; `None` means unconstrained.
    pub target_girth: Option<usize>,
    pub seed: u64,
}

/// A generated matrix together with the girth it achieved.
#[derive(Debug, Clone)]
pub struct Generated {
    pub matrix: BinaryMatrix,
    pub girth: Girth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateError {
    EmptyDimension,
    GammaZero,
    /// Column weight larger than the row count.
    GammaExceedsRows { gamma: usize, rows: usize },
    /// Target girth must be an even number >= 4.
    BadTargetGirth(usize),
    /// The edge-growth procedure finished below the requested girth.
    TargetNotReached { target: usize, achieved: Girth },
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::EmptyDimension => write!(f, "matrix dimensions must be positive"),
            GenerateError::GammaZero => write!(f, "gamma must be at least 1"),
            GenerateError::GammaExceedsRows { gamma, rows } => {
                write!(f, "gamma exceeds m: column weight {gamma} > {rows} rows")
            }
            GenerateError::BadTargetGirth(g) => {
                write!(f, "target girth {g} must be an even number >= 4")
            }
            GenerateError::TargetNotReached { target, achieved } => {
                write!(f, "target girth {target} not reached: achieved {achieved}")
            }
        }
    }
}

impl std::error::Error for GenerateError {}

/// Fisher-Yates shuffle driven by the raw 64-bit stream, so the result does
/// not depend on any distribution implementation.
fn seeded_permutation(len: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = bounded_index(rng, i + 1);
        perm.swap(i, j);
    }
    perm
}

/// Uniform index in `0..bound` by rejection on the top of the u64 range.
pub(crate) fn bounded_index(rng: &mut ChaCha12Rng, bound: usize) -> usize {
    debug_assert!(bound > 0);
    let bound = bound as u64;
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % bound) as usize;
        }
    }
}

/// Grows a column-regular matrix edge by edge, always attaching the new edge
/// to a row as far as possible (in the current Tanner graph) from the column
/// under construction. Ties prefer the lightest row, then the earliest row in
/// a seed-derived priority order, which makes the whole procedure a pure
/// function of the configuration.
pub fn generate_regular(cfg: &GenerateConfig) -> Result<Generated, GenerateError> {
    if cfg.rows == 0 || cfg.cols == 0 {
        return Err(GenerateError::EmptyDimension);
    }
    if cfg.gamma == 0 {
        return Err(GenerateError::GammaZero);
    }
    if cfg.gamma > cfg.rows {
        return Err(GenerateError::GammaExceedsRows { gamma: cfg.gamma, rows: cfg.rows });
    }
    if let Some(g) = cfg.target_girth {
        if g < 4 || g % 2 != 0 {
            return Err(GenerateError::BadTargetGirth(g));
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let perm = seeded_permutation(cfg.rows, &mut rng);
    let mut priority = vec![0usize; cfg.rows];
    for (rank, &row) in perm.iter().enumerate() {
        priority[row] = rank;
    }

    let m = cfg.rows;
    let n = cfg.cols;
    let mut col_support: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut row_support: Vec<Vec<usize>> = vec![Vec::new(); m];

    // Distance (in edges) from column `start` to every row in the partial
    // graph; usize::MAX marks unreachable rows.
    let row_distances = |start: usize, col_support: &[Vec<usize>], row_support: &[Vec<usize>]| {
        let mut col_dist = vec![usize::MAX; n];
        let mut row_dist = vec![usize::MAX; m];
        col_dist[start] = 0;
        let mut frontier = vec![start];
        let mut depth = 0;
        while !frontier.is_empty() {
            let mut next_rows = Vec::new();
            for &j in &frontier {
                for &i in &col_support[j] {
                    if row_dist[i] == usize::MAX {
                        row_dist[i] = depth + 1;
                        next_rows.push(i);
                    }
                }
            }
            let mut next_cols = Vec::new();
            for &i in &next_rows {
                for &j in &row_support[i] {
                    if col_dist[j] == usize::MAX {
                        col_dist[j] = depth + 2;
                        next_cols.push(j);
                    }
                }
            }
            depth += 2;
            frontier = next_cols;
        }
        row_dist
    };

    for col in 0..n {
        for _ in 0..cfg.gamma {
            let dist = row_distances(col, &col_support, &row_support);
            // Best candidate: farthest row (unreachable wins), then lightest,
            // then lowest seeded priority.
            let mut best: Option<(usize, usize, usize, usize)> = None;
            for row in 0..m {
                if col_support[col].binary_search(&row).is_ok() {
                    continue;
                }
                let key = (usize::MAX - dist[row], row_support[row].len(), priority[row], row);
                if best.is_none_or(|b| key < (b.0, b.1, b.2, b.3)) {
                    best = Some(key);
                }
            }
            let (_, _, _, row) = best.expect("gamma <= rows leaves a candidate");
            let pos = col_support[col].binary_search(&row).unwrap_err();
            col_support[col].insert(pos, row);
            let pos = row_support[row].binary_search(&col).unwrap_err();
            row_support[row].insert(pos, col);
        }
    }

    let matrix = BinaryMatrix::from_col_support(m, n, col_support)
        .expect("generator produces valid supports");
    let girth = tanner::girth(&matrix);
    if let Some(target) = cfg.target_girth {
        if girth < Girth::Finite(target) {
            return Err(GenerateError::TargetNotReached { target, achieved: girth });
        }
    }
    Ok(Generated { matrix, girth })
}
