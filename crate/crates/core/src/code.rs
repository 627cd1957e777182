//! Scalar linear index codes: an `n x N` GF(2) encoding matrix whose
//! identity is the unordered set of its columns.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, Subspace};
use crate::icp::{IndexCodingProblem, Receiver};

/// A scalar linear index code of length `N` over `n` messages.
///
/// The column order given at construction is preserved (it fixes which
/// coded bit is `y_1`, `y_2`, ...), but code identity is the unordered
/// column set: equality, ordering, and hashing all go through the
/// sorted columns, so column permutations of one code compare equal.
#[derive(Clone, Eq)]
pub struct IndexCode {
    cols: Vec<BitVec>,
}

impl IndexCode {
    /// Builds a code from its column vectors (each in `F_2^n`). The
    /// columns must be linearly independent, i.e. `rank(L) = N`.
    pub fn new(cols: Vec<BitVec>) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        }
        let n = cols[0].width();
        for c in &cols {
            if c.width() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.width(),
                });
            }
        }
        let span = Subspace::from_vectors(&cols, n)?;
        if span.dim() != cols.len() {
            return Err(Error::NotFullRank);
        }
        Ok(Self { cols })
    }

    /// The unordered-set identity key: columns in ascending order.
    pub fn canonical_columns(&self) -> Vec<BitVec> {
        let mut cols = self.cols.clone();
        cols.sort_unstable();
        cols
    }

    /// Interprets the columns of `l` as the code's coded symbols.
    pub fn from_matrix(l: &BitMatrix) -> Result<Self> {
        let cols = (0..l.n_cols()).map(|j| l.col(j)).collect();
        Self::new(cols)
    }

    /// Number of messages `n`.
    pub fn n(&self) -> usize {
        self.cols[0].width()
    }

    /// Code length `N` (bits per broadcast vector).
    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The column vectors in the order given at construction.
    pub fn columns(&self) -> &[BitVec] {
        &self.cols
    }

    /// The `n x N` encoding matrix with columns in canonical order.
    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_cols(&self.cols).expect("valid columns")
    }

    /// Row `j` of the encoding matrix, i.e. the broadcast-coordinate
    /// pattern message `x_{j+1}` feeds into.
    pub fn row(&self, j: usize) -> BitVec {
        let mut bits = BitVec::zero(self.len()).expect("len <= 64");
        for (k, c) in self.cols.iter().enumerate() {
            if c.bit(j) {
                bits = bits.with_bit(k, true);
            }
        }
        bits
    }

    /// All rows of the encoding matrix.
    pub fn rows(&self) -> Vec<BitVec> {
        (0..self.n()).map(|j| self.row(j)).collect()
    }

    /// The broadcast vector `y = x L`.
    pub fn encode(&self, x: &BitVec) -> Result<BitVec> {
        if x.width() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.width(),
            });
        }
        let mut y = BitVec::zero(self.len())?;
        for j in 0..self.n() {
            if x.bit(j) {
                y = y ^ self.row(j);
            }
        }
        Ok(y)
    }

    /// True when receiver `r` can always recover its wanted message:
    /// the unit vector `e_{f(i)}` lies in the span of the code columns
    /// together with the side-information unit vectors.
    pub fn is_decodable(&self, r: &Receiver) -> bool {
        let n = self.n();
        if r.wants() >= n {
            return false;
        }
        let mut gens: Vec<BitVec> = self.cols.clone();
        for &k in r.knows() {
            if k >= n {
                return false;
            }
            gens.push(BitVec::unit(k, n).expect("in range"));
        }
        let span = Subspace::from_vectors(&gens, n).expect("widths agree");
        let target = BitVec::unit(r.wants(), n).expect("in range");
        span.contains(&target).expect("widths agree")
    }

    /// Checks decodability for every receiver, naming the first failure.
    pub fn check_decodable(&self, icp: &IndexCodingProblem) -> Result<()> {
        if icp.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: icp.n(),
                got: self.n(),
            });
        }
        for (i, r) in icp.receivers().iter().enumerate() {
            if !self.is_decodable(r) {
                return Err(Error::Undecodable {
                    code: self.to_string(),
                    receiver: i,
                });
            }
        }
        Ok(())
    }

    /// Renders one coded symbol as a sum of message terms, e.g. `x1+x4`.
    pub fn symbol(&self, k: usize) -> String {
        let c = &self.cols[k];
        let terms: Vec<String> = (0..self.n())
            .filter(|&j| c.bit(j))
            .map(|j| format!("x{}", j + 1))
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

impl PartialEq for IndexCode {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_columns() == other.canonical_columns()
    }
}

impl std::hash::Hash for IndexCode {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical_columns().hash(state);
    }
}

impl PartialOrd for IndexCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_columns().cmp(&other.canonical_columns())
    }
}

impl fmt::Display for IndexCode {
    /// Set notation in the stored column order, e.g. `{x1, x2+x3, x4+x5}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for k in 0..self.len() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.symbol(k))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses one coded symbol given the message count: either a symbolic
/// sum (`x1+x4`) or a column bit-string (`10010`, component `x1` first).
pub fn parse_symbol(s: &str, n: usize) -> Result<BitVec> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty coded symbol".into()));
    }
    if s.chars().all(|c| c == '0' || c == '1') {
        let v: BitVec = s.parse()?;
        if v.width() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.width(),
            });
        }
        return Ok(v);
    }
    let mut col = BitVec::zero(n)?;
    for term in s.split('+') {
        let term = term.trim();
        let idx: usize = term
            .strip_prefix('x')
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad message term {term:?}")))?;
        if idx == 0 || idx > n {
            return Err(Error::Parse(format!(
                "message index in {term:?} outside 1..={n}"
            )));
        }
        if col.bit(idx - 1) {
            return Err(Error::Parse(format!("repeated term {term:?}")));
        }
        col = col.with_bit(idx - 1, true);
    }
    Ok(col)
}

/// Parses a whole code like `{x1, x2+x3, x4+x5}` or `x1, x2+x3` or a
/// list of column bit-strings; `n` is the message count.
pub fn parse_code(s: &str, n: usize) -> Result<IndexCode> {
    let inner = s
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .trim();
    let cols: Result<Vec<BitVec>> = inner
        .split(',')
        .map(|part| parse_symbol(part, n))
        .collect();
    IndexCode::new(cols?)
}

/// Parses a codes document: one code per line (comma-separated
/// symbols), blank lines and `#` comments ignored.
pub fn parse_codes_file(text: &str, n: usize) -> Result<Vec<IndexCode>> {
    let mut codes = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        codes.push(parse_code(line, n).map_err(|e| {
            Error::Parse(format!("line {}: {e}", lineno + 1))
        })?);
    }
    if codes.is_empty() {
        return Err(Error::EmptyCodeSet);
    }
    Ok(codes)
}

/// `FromStr` is not implemented because parsing needs the message
/// count; use [`parse_code`].
impl FromStr for IndexCode {
    type Err = Error;

    fn from_str(_: &str) -> Result<Self> {
        Err(Error::Parse(
            "use parse_code(s, n): the message count is required".into(),
        ))
    }
}

/// The length-3 code of the five-message worked instance:
/// `y1 = x1+x4+x5, y2 = x1+..+x5, y3 = x4+x5`.
pub fn example1_code() -> IndexCode {
    parse_code("x1+x4+x5, x1+x2+x3+x4+x5, x4+x5", 5).expect("valid code")
}

/// The length-4 code of the six-message worked instance:
/// `y1 = x1+x4, y2 = x2+x3, y3 = x5, y4 = x6`.
pub fn example2_code() -> IndexCode {
    parse_code("x1+x4, x2+x3, x5, x6", 6).expect("valid code")
}

/// The specified length-4 code of the third worked instance:
/// `y1 = x1+x2, y2 = x3, y3 = x4, y4 = x5`.
pub fn example3_code() -> IndexCode {
    parse_code("x1+x2, x3, x4, x5", 5).expect("valid code")
}
