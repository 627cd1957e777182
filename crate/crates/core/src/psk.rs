//! PSK constellation geometry: signal points, chord distances,
//! broadcast-vector-to-point mappings, inter-set distances, and the
//! coding gain relative to an uncoded `2^n`-PSK reference.

use std::f64::consts::PI;
use std::fmt;

use crate::code::IndexCode;
use crate::effective::{effective_sets, EffectiveSetFamily};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::icp::IndexCodingProblem;

/// Absolute tolerance when comparing distances; every candidate value
/// is one of the finitely many exact chords `2 sin(pi k / order)`.
pub const DIST_TOL: f64 = 1e-9;

/// A `2^N`-PSK signal set on the unit circle. Point 1 sits at angle 0
/// and indices increase counterclockwise.
#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    points: Vec<(f64, f64)>,
    chords: Vec<f64>,
}

impl Constellation {
    /// `order` must be a power of two, at least 2 and at most 2^16.
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() || order > 1 << 16 {
            return Err(Error::Parse(format!(
                "constellation order must be a power of two in 2..=65536, got {order}"
            )));
        }
        let points = (0..order)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / order as f64;
                (theta.cos(), theta.sin())
            })
            .collect();
        let chords = (0..=order / 2)
            .map(|delta| 2.0 * (PI * delta as f64 / order as f64).sin())
            .collect();
        Ok(Self {
            order,
            points,
            chords,
        })
    }

    /// Constellation sized for broadcast vectors of `n_code_len` bits.
    pub fn for_code_len(n_code_len: usize) -> Result<Self> {
        if n_code_len == 0 || n_code_len > 16 {
            return Err(Error::Parse(format!(
                "code length {n_code_len} outside 1..=16"
            )));
        }
        Self::new(1 << n_code_len)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coordinates of the point at 0-based position `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        self.points[k]
    }

    /// Euclidean distance between the points at positions `k1`, `k2`,
    /// computed from the exact chord formula `2 sin(pi delta / order)`.
    pub fn chord(&self, k1: usize, k2: usize) -> f64 {
        let diff = k1.abs_diff(k2) % self.order;
        self.chords[diff.min(self.order - diff)]
    }

    /// Chord spanned by a circular index offset `delta`.
    pub fn chord_at(&self, delta: usize) -> f64 {
        let diff = delta % self.order;
        self.chords[diff.min(self.order - diff)]
    }

    /// Smallest distance between distinct points.
    pub fn min_distance(&self) -> f64 {
        self.chords[1]
    }
}

/// Minimum distance of an uncoded `2^n`-PSK reference constellation.
pub fn reference_min_distance(n_messages: usize) -> f64 {
    2.0 * (PI / 2f64.powi(n_messages as i32)).sin()
}

/// PSK index coding gain in dB: `20 log10(d / d_min_ref)` where the
/// reference is the `2^n`-PSK minimum distance for `n` messages.
pub fn psk_icg(d: f64, n_messages: usize) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(20.0 * (d / reference_min_distance(n_messages)).log10())
}

/// A bijection from `N`-bit broadcast vectors to constellation points.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PskMapping {
    /// Position of each word, indexed by `BitVec::as_index`.
    pos_of: Vec<u16>,
    width: u8,
}

impl PskMapping {
    /// Builds a mapping from `pos_of[word_index] = position`.
    pub fn from_positions(pos_of: Vec<u16>, width: usize) -> Result<Self> {
        let order = 1usize << width;
        if pos_of.len() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                got: pos_of.len(),
            });
        }
        let mut seen = vec![false; order];
        for &p in &pos_of {
            if (p as usize) >= order || seen[p as usize] {
                return Err(Error::Parse(format!(
                    "mapping is not a bijection onto 0..{order}"
                )));
            }
            seen[p as usize] = true;
        }
        Ok(Self {
            pos_of,
            width: width as u8,
        })
    }

    /// The natural-order mapping: decimal word `k` on point `k+1`.
    pub fn identity(width: usize) -> Result<Self> {
        let order = 1u64 << width;
        Self::from_rendering(&(0..order).collect::<Vec<_>>())
    }

    /// Builds from a rendering: `decimals[p]` is the decimal word
    /// mapped to point `p+1`.
    pub fn from_rendering(decimals: &[u64]) -> Result<Self> {
        let order = decimals.len();
        if !order.is_power_of_two() || order < 2 {
            return Err(Error::Parse(format!(
                "rendering length {order} is not a power of two"
            )));
        }
        let width = order.trailing_zeros() as usize;
        let mut pos_of = vec![u16::MAX; order];
        for (p, &d) in decimals.iter().enumerate() {
            let w = BitVec::from_decimal(d, width)?;
            if pos_of[w.as_index()] != u16::MAX {
                return Err(Error::Parse(format!("word {d} listed twice")));
            }
            pos_of[w.as_index()] = p as u16;
        }
        Self::from_positions(pos_of, width)
    }

    /// Parses the parenthesized decimal list `(0,1,2,3,4,5,6,7)`.
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')');
        let decimals: Result<Vec<u64>> = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("bad mapping entry {t:?}: {e}")))
            })
            .collect();
        Self::from_rendering(&decimals?)
    }

    /// Broadcast-vector width `N`.
    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn order(&self) -> usize {
        self.pos_of.len()
    }

    /// 0-based constellation position of a broadcast vector.
    pub fn position(&self, word: &BitVec) -> usize {
        debug_assert_eq!(word.width(), self.width());
        self.pos_of[word.as_index()] as usize
    }

    /// Positions indexed by `BitVec::as_index`.
    pub fn positions(&self) -> &[u16] {
        &self.pos_of
    }

    /// The broadcast vector sitting on 0-based position `p`.
    pub fn word_at(&self, p: usize) -> BitVec {
        let idx = self
            .pos_of
            .iter()
            .position(|&q| q as usize == p)
            .expect("bijection");
        BitVec::from_index(idx, self.width()).expect("width invariant")
    }

    /// Every word's position shifted by `steps` (counterclockwise).
    pub fn rotated(&self, steps: usize) -> Self {
        let order = self.order();
        let pos_of = self
            .pos_of
            .iter()
            .map(|&p| ((p as usize + steps) % order) as u16)
            .collect();
        Self {
            pos_of,
            width: self.width,
        }
    }

    /// Rotated so the all-zeros word lands on point 1.
    pub fn canonical(&self) -> Self {
        let zero_pos = self.pos_of[0] as usize;
        self.rotated(self.order() - zero_pos)
    }

    pub fn is_canonical(&self) -> bool {
        self.pos_of[0] == 0
    }

    /// Decimal words in point order, the serialized form.
    pub fn rendering(&self) -> Vec<u64> {
        let width = self.width();
        let mut out = vec![0u64; self.order()];
        for (idx, &p) in self.pos_of.iter().enumerate() {
            out[p as usize] = BitVec::from_index(idx, width)
                .expect("width invariant")
                .decimal();
        }
        out
    }

    /// Compact rendering key for deterministic sorting of mapping lists.
    pub fn rendering_key(&self) -> Vec<u16> {
        self.rendering().iter().map(|&d| d as u16).collect()
    }
}

impl fmt::Display for PskMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (p, d) in self.rendering().iter().enumerate() {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PskMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for PskMapping {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PskMapping {
    /// Orders by rendering. O(order^2); use `rendering_key` with
    /// `sort_by_cached_key` for large lists.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rendering().cmp(&other.rendering())
    }
}

/// Smallest distance between a point of `s0` and a point of `s1`
/// (0-based positions). The sets must be nonempty and disjoint.
pub fn inter_set_distance(c: &Constellation, s0: &[usize], s1: &[usize]) -> Result<f64> {
    if s0.is_empty() || s1.is_empty() || s0.iter().any(|p| s1.contains(p)) {
        return Err(Error::BadSignalSets);
    }
    let mut best = f64::INFINITY;
    for &a in s0 {
        for &b in s1 {
            best = best.min(c.chord(a, b));
        }
    }
    Ok(best)
}

/// Minimum inter-set distance of a receiver's effective-set family
/// under `mapping`: the smallest cross-pair distance over all sets.
pub fn min_inter_set_distance(
    c: &Constellation,
    family: &EffectiveSetFamily,
    mapping: &PskMapping,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for set in &family.sets {
        let s0: Vec<usize> = set.parts[0].iter().map(|w| mapping.position(w)).collect();
        let s1: Vec<usize> = set.parts[1].iter().map(|w| mapping.position(w)).collect();
        best = best.min(inter_set_distance(c, &s0, &s1)?);
    }
    Ok(best)
}

/// Convenience form taking the problem directly.
pub fn min_inter_set_distance_for(
    code: &IndexCode,
    icp: &IndexCodingProblem,
    receiver: usize,
    mapping: &PskMapping,
) -> Result<f64> {
    let c = Constellation::for_code_len(code.len())?;
    let family = effective_sets(code, icp, receiver)?;
    min_inter_set_distance(&c, &family, mapping)
}

/// Per-receiver minimum inter-set distances and coding gains for one
/// (code, mapping) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    /// `d_IS,min` per receiver (receiver order, not priority order).
    pub distances: Vec<f64>,
    /// PSK index coding gain per receiver, dB.
    pub gains_db: Vec<f64>,
}

/// Computes the full profile of a pair over every receiver.
pub fn distance_profile(
    icp: &IndexCodingProblem,
    code: &IndexCode,
    mapping: &PskMapping,
) -> Result<DistanceProfile> {
    let c = Constellation::for_code_len(code.len())?;
    let mut distances = Vec::with_capacity(icp.m());
    let mut gains_db = Vec::with_capacity(icp.m());
    for i in 0..icp.m() {
        let family = effective_sets(code, icp, i)?;
        let d = min_inter_set_distance(&c, &family, mapping)?;
        distances.push(d);
        gains_db.push(psk_icg(d, icp.n())?);
    }
    Ok(DistanceProfile {
        distances,
        gains_db,
    })
}
