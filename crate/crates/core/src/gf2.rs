//! Bit-packed linear algebra over GF(2): vectors, matrices, rank,
//! row-reduced canonical form, and coset enumeration.
//!
//! Component 1 of a vector lives in the least significant bit, so the
//! textual form `(110)` (component 1 first) is the integer `0b011`.
//! Widths are capped at 64 bits, which covers every instance this crate
//! targets.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum vector width supported by the packed representation.
pub const MAX_WIDTH: usize = 64;

/// A GF(2) row vector of fixed width.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    bits: u64,
    width: u8,
}

impl BitVec {
    /// The zero vector of the given width.
    pub fn zero(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    /// Builds a vector from packed bits (component 1 in the LSB).
    /// Bits beyond `width` must be clear.
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthTooLarge(width));
        }
        if width < MAX_WIDTH && bits >> width != 0 {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: 64 - bits.leading_zeros() as usize,
            });
        }
        Ok(Self {
            bits,
            width: width as u8,
        })
    }

    /// The unit vector with a single 1 in component `i` (0-based).
    pub fn unit(i: usize, width: usize) -> Result<Self> {
        if i >= width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: i + 1,
            });
        }
        Self::new(1 << i, width)
    }

    /// Reconstructs a vector from its `as_index` value.
    pub fn from_index(index: usize, width: usize) -> Result<Self> {
        Self::new(index as u64, width)
    }

    /// Reconstructs a vector from its decimal rendering (component 1 as
    /// the most significant bit).
    pub fn from_decimal(decimal: u64, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthTooLarge(width));
        }
        if width < MAX_WIDTH && decimal >> width != 0 {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: 64 - decimal.leading_zeros() as usize,
            });
        }
        let bits = if width == 0 {
            0
        } else {
            decimal.reverse_bits() >> (MAX_WIDTH - width)
        };
        Self::new(bits, width)
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Component `i` (0-based). Panics when out of range.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width(), "bit index {i} out of range");
        self.bits >> i & 1 == 1
    }

    /// Returns a copy with component `i` set to `value`.
    pub fn with_bit(mut self, i: usize, value: bool) -> Self {
        assert!(i < self.width(), "bit index {i} out of range");
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
        self
    }

    /// Number of nonzero components.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The packed bits as an array index (component 1 in bit 0).
    pub fn as_index(&self) -> usize {
        self.bits as usize
    }

    /// Decimal value with component 1 as the most significant bit; this
    /// is the convention used when rendering mappings as integer lists.
    pub fn decimal(&self) -> u64 {
        if self.width == 0 {
            0
        } else {
            self.bits.reverse_bits() >> (MAX_WIDTH as u8 - self.width)
        }
    }

    /// Sub-vector on the (0-based, strictly ascending) index set `idxs`.
    pub fn extract(&self, idxs: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for (k, &i) in idxs.iter().enumerate() {
            if i >= self.width() {
                return Err(Error::DimensionMismatch {
                    expected: self.width(),
                    got: i + 1,
                });
            }
            if self.bit(i) {
                bits |= 1 << k;
            }
        }
        Self::new(bits, idxs.len())
    }

    /// Dot product over GF(2).
    pub fn dot(&self, other: &Self) -> Result<bool> {
        if self.width != other.width {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                got: other.width(),
            });
        }
        Ok((self.bits & other.bits).count_ones() % 2 == 1)
    }
}

impl BitXor for BitVec {
    type Output = BitVec;

    fn bitxor(self, rhs: Self) -> Self {
        assert_eq!(self.width, rhs.width, "xor of mismatched widths");
        Self {
            bits: self.bits ^ rhs.bits,
            width: self.width,
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.width() {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses `(0110)` or bare `0110` (component 1 first).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut bits = 0u64;
        let mut width = 0usize;
        for ch in s.chars() {
            match ch {
                '0' => width += 1,
                '1' => {
                    if width >= MAX_WIDTH {
                        return Err(Error::WidthTooLarge(width + 1));
                    }
                    bits |= 1 << width;
                    width += 1;
                }
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit vector"))),
            }
        }
        Self::new(bits, width)
    }
}

/// A GF(2) matrix stored as packed row vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl BitMatrix {
    /// All-zero matrix. Dimensions must be positive and `cols <= 64`.
    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if cols > MAX_WIDTH {
            return Err(Error::WidthTooLarge(cols));
        }
        Ok(Self {
            rows: vec![0; rows],
            cols,
        })
    }

    /// Builds a matrix from row vectors of equal width.
    pub fn from_rows(rows: &[BitVec]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        };
        let cols = first.width();
        if cols == 0 {
            return Err(Error::EmptyMatrix { rows: rows.len(), cols });
        }
        let mut packed = Vec::with_capacity(rows.len());
        for r in rows {
            if r.width() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.width(),
                });
            }
            packed.push(r.as_index() as u64);
        }
        Ok(Self { rows: packed, cols })
    }

    /// Builds a matrix from column vectors of equal width.
    pub fn from_cols(cols: &[BitVec]) -> Result<Self> {
        let Some(first) = cols.first() else {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        };
        let n = first.width();
        let mut m = Self::zero(n, cols.len())?;
        for (j, c) in cols.iter().enumerate() {
            if c.width() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.width(),
                });
            }
            for i in 0..n {
                m.set(i, j, c.bit(i));
            }
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows() && j < self.cols, "index ({i},{j}) out of range");
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows() && j < self.cols, "index ({i},{j}) out of range");
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::new(self.rows[i], self.cols).expect("row invariant")
    }

    pub fn col(&self, j: usize) -> BitVec {
        let mut bits = 0u64;
        for i in 0..self.n_rows() {
            if self.get(i, j) {
                bits |= 1 << i;
            }
        }
        BitVec::new(bits, self.n_rows()).expect("column invariant")
    }

    /// Row-vector product `y = x M` over GF(2).
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.width() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows(),
                got: x.width(),
            });
        }
        let mut acc = 0u64;
        for (i, row) in self.rows.iter().enumerate() {
            if x.bit(i) {
                acc ^= row;
            }
        }
        BitVec::new(acc, self.cols)
    }

    /// GF(2) rank by forward Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> c & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for r in rows.iter_mut().skip(rank + 1) {
                if *r >> c & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    /// The span of this matrix's rows in canonical (RREF) form.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_packed_rows(self.rows.clone(), self.cols)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows(), self.cols)?;
        for i in 0..self.n_rows() {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// A subspace of `F_2^width` held as its unique reduced row-echelon
/// basis, so equal spans compare (and hash) equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: Vec<u64>,
    width: u8,
}

impl Subspace {
    /// The trivial subspace `{0}`.
    pub fn trivial(width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthTooLarge(width));
        }
        Ok(Self {
            basis: Vec::new(),
            width: width as u8,
        })
    }

    /// Span of the given vectors (need not be independent).
    pub fn from_vectors(vectors: &[BitVec], width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthTooLarge(width));
        }
        for v in vectors {
            if v.width() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: v.width(),
                });
            }
        }
        let packed = vectors.iter().map(|v| v.as_index() as u64).collect();
        Ok(Self::from_packed_rows(packed, width))
    }

    /// Gauss-Jordan reduction to the unique RREF basis, pivots scanned
    /// from component 1 upward.
    fn from_packed_rows(mut rows: Vec<u64>, width: usize) -> Self {
        let mut rank = 0;
        for c in 0..width {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> c & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> c & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        Self {
            basis: rows,
            width: width as u8,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// The canonical basis rows.
    pub fn basis(&self) -> Vec<BitVec> {
        self.basis
            .iter()
            .map(|&b| BitVec::new(b, self.width()).expect("basis invariant"))
            .collect()
    }

    /// Membership test (reduce `v` against the RREF basis).
    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        if v.width() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                got: v.width(),
            });
        }
        let mut rem = v.as_index() as u64;
        for &b in &self.basis {
            let pivot = b.trailing_zeros();
            if rem >> pivot & 1 == 1 {
                rem ^= b;
            }
        }
        Ok(rem == 0)
    }

    /// All `2^dim` members, sorted by `as_index`.
    pub fn enumerate(&self) -> Vec<BitVec> {
        let mut members = coset_span(&self.basis, 0);
        members.sort_unstable();
        members
            .into_iter()
            .map(|m| BitVec::new(m, self.width()).expect("member invariant"))
            .collect()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (k, b) in self.basis().iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

/// The coset `offset + span(basis)` as a sorted list of distinct
/// vectors. The basis must be linearly independent.
pub fn coset_enumerate(basis: &[BitVec], offset: &BitVec) -> Result<Vec<BitVec>> {
    let width = offset.width();
    for b in basis {
        if b.width() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: b.width(),
            });
        }
    }
    let independent =
        Subspace::from_vectors(basis, width)?.dim() == basis.len();
    if !independent {
        return Err(Error::DependentBasis);
    }
    let packed: Vec<u64> = basis.iter().map(|b| b.as_index() as u64).collect();
    let mut members = coset_span(&packed, offset.as_index() as u64);
    members.sort_unstable();
    Ok(members
        .into_iter()
        .map(|m| BitVec::new(m, width).expect("member invariant"))
        .collect())
}

/// Raw span walk: `offset ^ (every subset XOR of basis)`.
fn coset_span(basis: &[u64], offset: u64) -> Vec<u64> {
    let mut members = vec![offset];
    for &b in basis {
        let mut shifted: Vec<u64> = members.iter().map(|&m| m ^ b).collect();
        members.append(&mut shifted);
    }
    members
}
