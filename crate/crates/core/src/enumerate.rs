//! Enumeration of valid scalar linear index codes of a given length for
//! single-unicast problems, via fitting matrices: unit diagonal, free
//! entries on side-information columns, zeros elsewhere. The distinct
//! row spaces of the full-rank fitting matrices generate every valid
//! code, and the codes of one row space are its unordered bases.

use std::collections::HashSet;

use itertools::Itertools;

use crate::code::IndexCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, Subspace};
use crate::icp::IndexCodingProblem;

/// Counts collected while enumerating codes of length `n_code_len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationStats {
    /// All fitting-matrix candidates, `2^(sum of side-information sizes)`.
    pub candidates: u64,
    /// Candidates whose rank equals the code length.
    pub full_rank: u64,
    /// Distinct row spaces among the full-rank candidates.
    pub distinct_spaces: usize,
    /// Unordered bases per space: `prod(2^N - 2^i) / N!`.
    pub codes_per_space: u64,
    /// Total codes: `distinct_spaces * codes_per_space`.
    pub total_codes: u64,
}

/// Unordered bases of an `N`-dimensional GF(2) space:
/// `prod_{i<N}(2^N - 2^i) / N!`.
pub fn unordered_basis_count(dim: u32) -> u64 {
    let ordered: u64 = (0..dim).map(|i| (1u64 << dim) - (1u64 << i)).product();
    let fact: u64 = (1..=dim as u64).product();
    ordered / fact
}

/// Streams every fitting matrix of the problem. Requires single
/// unicast with receiver `i` wanting message `i`.
pub fn fitting_matrices(icp: &IndexCodingProblem) -> Result<FittingMatrices> {
    if !icp.is_single_unicast() {
        return Err(Error::NotSingleUnicast);
    }
    let n = icp.n();
    let mut base = BitMatrix::zero(n, n)?;
    let mut free = Vec::new();
    for (i, r) in icp.receivers().iter().enumerate() {
        base.set(i, i, true);
        for &j in r.knows() {
            free.push((i, j));
        }
    }
    if free.len() > 40 {
        return Err(Error::ScaleGuard(format!(
            "2^{} fitting-matrix candidates",
            free.len()
        )));
    }
    Ok(FittingMatrices {
        base,
        free,
        next: 0,
    })
}

/// Iterator over fitting matrices, one per assignment of the free
/// (side-information) entries.
#[derive(Debug)]
pub struct FittingMatrices {
    base: BitMatrix,
    free: Vec<(usize, usize)>,
    next: u64,
}

impl FittingMatrices {
    pub fn total(&self) -> u64 {
        1u64 << self.free.len()
    }
}

impl Iterator for FittingMatrices {
    type Item = BitMatrix;

    fn next(&mut self) -> Option<BitMatrix> {
        if self.next >= self.total() {
            return None;
        }
        let assignment = self.next;
        self.next += 1;
        let mut m = self.base.clone();
        for (bit, &(i, j)) in self.free.iter().enumerate() {
            m.set(i, j, assignment >> bit & 1 == 1);
        }
        Some(m)
    }
}

/// The distinct row spaces of the rank-`n_code_len` fitting matrices,
/// sorted into a deterministic order. Also reports the candidate and
/// full-rank counts.
pub fn valid_row_spaces(
    icp: &IndexCodingProblem,
    n_code_len: usize,
) -> Result<(Vec<Subspace>, u64, u64)> {
    let iter = fitting_matrices(icp)?;
    let candidates = iter.total();
    let mut full_rank = 0u64;
    let mut spaces = HashSet::new();
    for m in iter {
        if m.rank() == n_code_len {
            full_rank += 1;
            spaces.insert(m.row_space());
        }
    }
    let mut spaces: Vec<Subspace> = spaces.into_iter().collect();
    spaces.sort_unstable();
    Ok((spaces, candidates, full_rank))
}

/// All index codes of one row space: every unordered basis, each
/// emitted with the basis vectors as the code's columns.
pub fn codes_for_space(space: &Subspace) -> Result<Vec<IndexCode>> {
    let dim = space.dim();
    let nonzero: Vec<BitVec> = space
        .enumerate()
        .into_iter()
        .filter(|v| !v.is_zero())
        .collect();
    let combos = binomial(nonzero.len() as u64, dim as u64);
    if combos > 20_000_000 {
        return Err(Error::ScaleGuard(format!(
            "{combos} column subsets for one row space"
        )));
    }
    let mut codes = Vec::with_capacity(unordered_basis_count(dim as u32) as usize);
    for subset in nonzero.iter().copied().combinations(dim) {
        if Subspace::from_vectors(&subset, space.width())?.dim() == dim {
            codes.push(IndexCode::new(subset)?);
        }
    }
    codes.sort_unstable();
    Ok(codes)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Enumerates every valid code of length `n_code_len` for a
/// single-unicast problem, with the counts along the way. Codes come
/// out sorted by their canonical column lists.
pub fn enumerate_codes(
    icp: &IndexCodingProblem,
    n_code_len: usize,
) -> Result<(Vec<IndexCode>, EnumerationStats)> {
    let (spaces, candidates, full_rank) = valid_row_spaces(icp, n_code_len)?;
    let mut codes = Vec::new();
    for s in &spaces {
        codes.extend(codes_for_space(s)?);
    }
    codes.sort_unstable();
    let codes_per_space = unordered_basis_count(n_code_len as u32);
    let stats = EnumerationStats {
        candidates,
        full_rank,
        distinct_spaces: spaces.len(),
        codes_per_space,
        total_codes: codes.len() as u64,
    };
    debug_assert_eq!(
        stats.total_codes,
        stats.distinct_spaces as u64 * stats.codes_per_space
    );
    Ok((codes, stats))
}
