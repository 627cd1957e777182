//! Effective broadcast vector sets: the cosets of `F_2^N` a receiver
//! must distinguish, each split into the halves carrying wanted bit 0
//! and wanted bit 1.

use crate::code::IndexCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Subspace};
use crate::icp::{IndexCodingProblem, Receiver};

/// One effective broadcast vector set: a coset `carrier` of the
/// receiver's ambiguity subspace, split into its two wanted-bit halves.
///
/// The halves form an unordered pair; which one is labeled 0 depends on
/// the side-information realization, so `parts[0]` is canonically the
/// half containing the carrier's smallest vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveSet {
    pub carrier: Vec<BitVec>,
    pub parts: [Vec<BitVec>; 2],
}

impl EffectiveSet {
    /// True when `{a, b}` equals `parts` as an unordered pair of sets.
    pub fn partition_matches(&self, a: &[BitVec], b: &[BitVec]) -> bool {
        let sorted = |v: &[BitVec]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        let (a, b) = (sorted(a), sorted(b));
        (a == self.parts[0] && b == self.parts[1])
            || (a == self.parts[1] && b == self.parts[0])
    }
}

/// Every distinct effective broadcast vector set seen by one receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveSetFamily {
    pub receiver: usize,
    /// The subspace the carriers are cosets of (spanned by the rows of
    /// `L` whose message index lies outside the side information).
    pub coset_subspace: Subspace,
    /// Sets ordered by their smallest carrier vector; members sorted.
    pub sets: Vec<EffectiveSet>,
}

impl EffectiveSetFamily {
    /// Number of distinct effective sets (each of size
    /// `|coset_subspace|`).
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Rows of `L` the receiver cannot cancel: those outside its side
/// information, minus the wanted row when `split_wanted` is set.
fn uncancelled_rows(
    code: &IndexCode,
    receiver: &Receiver,
    exclude_wanted: bool,
) -> Vec<BitVec> {
    (0..code.n())
        .filter(|&j| {
            receiver.knows().binary_search(&j).is_err()
                && !(exclude_wanted && j == receiver.wants())
        })
        .map(|j| code.row(j))
        .collect()
}

/// `|S_L(a_i)|`: size of every effective set seen by the receiver,
/// computed as `2^rank` of the uncancelled rows.
pub fn effective_set_size(code: &IndexCode, receiver: &Receiver) -> usize {
    let rows = uncancelled_rows(code, receiver, false);
    let dim = Subspace::from_vectors(&rows, code.len())
        .expect("row widths agree")
        .dim();
    1 << dim
}

/// Smallest effective-set size over a set of codes.
pub fn min_effective_set_size(codes: &[IndexCode], receiver: &Receiver) -> Result<usize> {
    codes
        .iter()
        .map(|c| effective_set_size(c, receiver))
        .min()
        .ok_or(Error::EmptyCodeSet)
}

/// The wanted-bit partition of one effective set for a concrete
/// side-information realization `a` (components follow the sorted
/// index set `I_i`). Returns `(C0, C1)`, both sorted.
pub fn labeled_partition(
    code: &IndexCode,
    receiver: &Receiver,
    a: &BitVec,
) -> Result<(Vec<BitVec>, Vec<BitVec>)> {
    if a.width() != receiver.knows().len() {
        return Err(Error::DimensionMismatch {
            expected: receiver.knows().len(),
            got: a.width(),
        });
    }
    let free = uncancelled_rows(code, receiver, true);
    let part_space = Subspace::from_vectors(&free, code.len())?;
    let wanted_row = code.row(receiver.wants());
    if part_space.contains(&wanted_row)? {
        // The two halves would coincide: C0 and C1 intersect.
        return Err(Error::UndecodableWant {
            code: code.to_string(),
            wants: receiver.wants(),
        });
    }
    let mut offset = BitVec::zero(code.len())?;
    for (k, &j) in receiver.knows().iter().enumerate() {
        if a.bit(k) {
            offset = offset ^ code.row(j);
        }
    }
    let mut zero_part: Vec<BitVec> =
        part_space.enumerate().iter().map(|v| *v ^ offset).collect();
    let mut one_part: Vec<BitVec> = zero_part
        .iter()
        .map(|v| *v ^ wanted_row)
        .collect();
    zero_part.sort_unstable();
    one_part.sort_unstable();
    Ok((zero_part, one_part))
}

/// Computes every distinct effective set of `icp`'s receiver `i`,
/// partitioned into its wanted-bit halves.
///
/// Requires the code to be decodable for that receiver; otherwise the
/// halves would overlap and the partition is meaningless.
pub fn effective_sets(
    code: &IndexCode,
    icp: &IndexCodingProblem,
    i: usize,
) -> Result<EffectiveSetFamily> {
    let receiver = icp.receiver(i);
    if icp.n() != code.n() {
        return Err(Error::DimensionMismatch {
            expected: icp.n(),
            got: code.n(),
        });
    }

    let free = uncancelled_rows(code, receiver, true);
    let part_space = Subspace::from_vectors(&free, code.len())?;
    let wanted_row = code.row(receiver.wants());
    if part_space.contains(&wanted_row)? {
        return Err(Error::Undecodable {
            code: code.to_string(),
            receiver: i,
        });
    }
    let all_rows = uncancelled_rows(code, receiver, false);
    let coset_subspace = Subspace::from_vectors(&all_rows, code.len())?;

    // Every coset of the subspace is realized (the code has full column
    // rank), so walk the words in order and emit each coset once, at
    // its smallest member.
    let order = 1usize << code.len();
    let mut visited = vec![false; order];
    let half: Vec<BitVec> = part_space.enumerate();
    let mut sets = Vec::with_capacity(order / (half.len() * 2));
    for w in 0..order {
        if visited[w] {
            continue;
        }
        let rep = BitVec::from_index(w, code.len())?;
        let mut p0: Vec<BitVec> = half.iter().map(|v| *v ^ rep).collect();
        let mut p1: Vec<BitVec> = p0.iter().map(|v| *v ^ wanted_row).collect();
        p0.sort_unstable();
        p1.sort_unstable();
        let mut carrier: Vec<BitVec> = p0.iter().chain(p1.iter()).copied().collect();
        carrier.sort_unstable();
        for v in &carrier {
            visited[v.as_index()] = true;
        }
        sets.push(EffectiveSet {
            carrier,
            parts: [p0, p1],
        });
    }

    Ok(EffectiveSetFamily {
        receiver: i,
        coset_subspace,
        sets,
    })
}
