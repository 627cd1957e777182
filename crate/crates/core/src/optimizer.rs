//! Optimal-mapping enumeration per receiver and the priority cascade
//! that keeps, receiver by receiver, only the (code, mapping) pairs
//! maximizing the minimum inter-set distance.

use itertools::Itertools;
use rayon::prelude::*;

use crate::code::IndexCode;
use crate::effective::{effective_set_size, effective_sets};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::icp::IndexCodingProblem;
use crate::psk::{
    distance_profile, psk_icg, Constellation, DistanceProfile, PskMapping, DIST_TOL,
};

/// A candidate (index code, mapping) pair with its per-receiver
/// distance profile. The mapping is in canonical rotation (all-zeros
/// word on point 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub code: IndexCode,
    pub mapping: PskMapping,
    pub profile: DistanceProfile,
}

impl CandidatePair {
    /// Pair notation `({x1, x2+x3}, (0,1,2,3))`.
    pub fn render(&self) -> String {
        format!("({}, {})", self.code, self.mapping)
    }
}

/// Parses pair notation `({x1, x2+x3, x4+x5}, (0,1,2,3,4,5,6,7))`.
/// The mapping's decimal words follow the code's written column order.
pub fn parse_pair(s: &str, n: usize) -> Result<(IndexCode, PskMapping)> {
    let inner = s.trim();
    let inner = inner
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse("pair must be wrapped in parentheses".into()))?;
    let brace_end = inner
        .find('}')
        .ok_or_else(|| Error::Parse("pair must start with a {..} code set".into()))?;
    let code = crate::code::parse_code(&inner[..=brace_end], n)?;
    let rest = inner[brace_end + 1..]
        .trim_start()
        .strip_prefix(',')
        .ok_or_else(|| Error::Parse("expected a comma between code and mapping".into()))?;
    let mapping = PskMapping::parse(rest.trim())?;
    if mapping.width() != code.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << code.len(),
            got: mapping.order(),
        });
    }
    Ok((code, mapping))
}

/// What happened at one receiver's stage of the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageRole {
    /// Receiver saw the full constellation before any pairs existed.
    SkippedFullConstellation,
    /// First receiver with a proper effective set; pairs were built here.
    Seed,
    /// Pairs were filtered down to the maximum-distance survivors.
    Filter,
}

/// Per-receiver row of the cascade trace, in priority order.
#[derive(Debug, Clone)]
pub struct TraceRow {
    /// Receiver index (0-based).
    pub receiver: usize,
    /// Smallest effective-set size over the candidate codes.
    pub eta: usize,
    pub role: StageRole,
    /// Pair count after this stage (0 while skipping).
    pub survivors: usize,
    /// The distance achieved/kept at this stage.
    pub delta: Option<f64>,
    pub gain_db: Option<f64>,
}

/// Summary of one cascade run.
#[derive(Debug, Clone)]
pub struct CascadeTrace {
    pub rows: Vec<TraceRow>,
    /// Receiver the pair set was seeded at, if any.
    pub seed_receiver: Option<usize>,
    /// Codes attaining the smallest effective-set size at the seed.
    pub seed_codes: usize,
    /// Optimal mappings per seed code.
    pub mappings_per_code: usize,
    /// True when every receiver saw the full constellation and one
    /// arbitrary pair was returned.
    pub arbitrary: bool,
}

/// All canonical mappings that are optimal for `icp`'s receiver
/// `receiver` under `code`: in every effective set the wanted-bit
/// halves sit on two diametrically opposite arcs of consecutive
/// points, and the arcs of all sets tile the constellation.
///
/// Fails when the receiver sees the full constellation (every mapping
/// is equivalent there) or the code is not decodable for it.
pub fn optimal_mappings_for(
    icp: &IndexCodingProblem,
    code: &IndexCode,
    receiver: usize,
) -> Result<Vec<PskMapping>> {
    let order = 1usize << code.len();
    let family = effective_sets(code, icp, receiver)?;
    let eta = family.sets[0].carrier.len();
    if eta == order {
        return Err(Error::FullConstellation(receiver));
    }
    let half = eta / 2; // points per arc
    let k = order / eta; // antipodal arc pairs (= effective sets)
    let zero_word = BitVec::zero(code.len())?;

    // Canonical mapping count: half * k! * 2^k * (half!)^(2k) / order.
    let fact = |x: usize| (1..=x).map(|i| i as f64).product::<f64>();
    let estimate =
        half as f64 * fact(k) * 2f64.powi(k as i32) * fact(half).powi(2 * k as i32)
            / order as f64;
    if !(estimate <= 50_000_000.0) {
        return Err(Error::ScaleGuard(format!(
            "{estimate:.3e} optimal mappings for receiver R{}",
            receiver + 1
        )));
    }

    // The set containing the all-zeros word, and its half holding it.
    // Families order sets by smallest member and parts[0] holds the
    // carrier minimum, so this is sets[0].parts[0].
    debug_assert!(family.sets[0].parts[0].contains(&zero_word));

    let mut out = Vec::new();
    let mut pos_of = vec![u16::MAX; order];
    // Arc grids are offset by p; arcs j and j+k are diametrically
    // opposite because order/2 is a multiple of the arc length.
    for p in 0..half {
        let starts: Vec<usize> = (0..2 * k).map(|j| (p + j * half) % order).collect();
        let zero_arc = starts
            .iter()
            .position(|&s| s == 0 || s > order - half)
            .expect("some arc covers position 0");
        for perm in (0..k).permutations(k) {
            for orient in 0..(1u32 << k) {
                // Slot j holds the words bound for the arc at starts[j].
                let mut slots: Vec<&[BitVec]> = vec![&[]; 2 * k];
                for (q, &set_idx) in perm.iter().enumerate() {
                    let flip = orient >> q & 1 == 1;
                    let parts = &family.sets[set_idx].parts;
                    slots[q] = &parts[usize::from(flip)];
                    slots[q + k] = &parts[usize::from(!flip)];
                }
                // Canonical rotation: the all-zeros word must land on
                // position 0, so its half must own the covering arc.
                if !(perm[zero_arc % k] == 0 && slots[zero_arc].contains(&zero_word)) {
                    continue;
                }
                fill_arcs(
                    &slots,
                    &starts,
                    order,
                    zero_arc,
                    &zero_word,
                    0,
                    &mut pos_of,
                    &mut out,
                );
            }
        }
    }
    out.sort_by_cached_key(|m| m.rendering_key());
    Ok(out)
}

/// Recursively places each slot's words onto its arc in every order,
/// keeping the all-zeros word pinned to position 0.
#[allow(clippy::too_many_arguments)]
fn fill_arcs(
    slots: &[&[BitVec]],
    starts: &[usize],
    order: usize,
    zero_arc: usize,
    zero_word: &BitVec,
    depth: usize,
    pos_of: &mut [u16],
    out: &mut Vec<PskMapping>,
) {
    if depth == slots.len() {
        let mapping = PskMapping::from_positions(pos_of.to_vec(), order.trailing_zeros() as usize)
            .expect("arc tiling is a bijection");
        debug_assert!(mapping.is_canonical());
        out.push(mapping);
        return;
    }
    let members = slots[depth];
    let len = members.len();
    let start = starts[depth];
    if depth == zero_arc {
        // Pin the zero word; permute the rest over the other offsets.
        let zero_offset = (order - start) % order;
        pos_of[zero_word.as_index()] = 0;
        let rest: Vec<&BitVec> = members.iter().filter(|w| *w != zero_word).collect();
        let offsets: Vec<usize> = (0..len).filter(|&s| s != zero_offset).collect();
        for perm in rest.iter().permutations(rest.len()) {
            for (w, &s) in perm.iter().zip(&offsets) {
                pos_of[w.as_index()] = ((start + s) % order) as u16;
            }
            fill_arcs(slots, starts, order, zero_arc, zero_word, depth + 1, pos_of, out);
        }
    } else {
        for perm in members.iter().permutations(len) {
            for (s, w) in perm.iter().enumerate() {
                pos_of[w.as_index()] = ((start + s) % order) as u16;
            }
            fill_arcs(slots, starts, order, zero_arc, zero_word, depth + 1, pos_of, out);
        }
    }
}

/// Word lists (as indices) of one receiver's effective sets, for fast
/// distance evaluation against a mapping.
struct CompactFamily {
    sets: Vec<(Vec<u16>, Vec<u16>)>,
}

impl CompactFamily {
    fn build(code: &IndexCode, icp: &IndexCodingProblem, receiver: usize) -> Result<Self> {
        let family = effective_sets(code, icp, receiver)?;
        let sets = family
            .sets
            .iter()
            .map(|s| {
                (
                    s.parts[0].iter().map(|w| w.as_index() as u16).collect(),
                    s.parts[1].iter().map(|w| w.as_index() as u16).collect(),
                )
            })
            .collect();
        Ok(Self { sets })
    }

    /// Minimum cross-pair chord over all sets.
    fn min_distance(&self, c: &Constellation, mapping: &PskMapping) -> f64 {
        let pos = mapping.positions();
        let mut best = f64::INFINITY;
        for (p0, p1) in &self.sets {
            for &a in p0 {
                for &b in p1 {
                    let d = c.chord(pos[a as usize] as usize, pos[b as usize] as usize);
                    if d < best {
                        best = d;
                    }
                }
            }
        }
        best
    }
}

/// Finds every optimal (code, mapping) pair for the problem's priority
/// order, following the cascade: seed at the first receiver with a
/// proper effective set using the codes minimizing its effective-set
/// size and their optimal mappings, then keep only the pairs
/// maximizing each later receiver's minimum inter-set distance.
///
/// When every receiver sees the full constellation, any mapping
/// performs identically; one arbitrary pair is returned and flagged.
pub fn find_optimal_pairs(
    icp: &IndexCodingProblem,
    codes: &[IndexCode],
) -> Result<(Vec<CandidatePair>, CascadeTrace)> {
    if codes.is_empty() {
        return Err(Error::EmptyCodeSet);
    }
    let mut codes: Vec<IndexCode> = codes.to_vec();
    codes.sort_unstable();
    codes.dedup();
    let n_code_len = codes[0].len();
    for c in &codes {
        if c.len() != n_code_len {
            return Err(Error::DimensionMismatch {
                expected: n_code_len,
                got: c.len(),
            });
        }
        c.check_decodable(icp)?;
    }
    let order = 1usize << n_code_len;
    let constellation = Constellation::for_code_len(n_code_len)?;

    // Smallest effective-set size per receiver over the code set.
    let sizes: Vec<Vec<usize>> = codes
        .iter()
        .map(|c| {
            (0..icp.m())
                .map(|i| effective_set_size(c, icp.receiver(i)))
                .collect()
        })
        .collect();
    let eta = |i: usize| sizes.iter().map(|row| row[i]).min().expect("nonempty");

    let priority = icp.priority();
    let mut rows = Vec::with_capacity(priority.len());
    let seed_at = priority.iter().position(|&i| eta(i) < order);

    let Some(seed_at) = seed_at else {
        // Every receiver sees the full constellation.
        for &i in priority {
            rows.push(TraceRow {
                receiver: i,
                eta: eta(i),
                role: StageRole::SkippedFullConstellation,
                survivors: 1,
                delta: Some(constellation.min_distance()),
                gain_db: Some(psk_icg(constellation.min_distance(), icp.n())?),
            });
        }
        let code = codes[0].clone();
        let mapping = PskMapping::identity(n_code_len)?;
        let profile = distance_profile(icp, &code, &mapping)?;
        let pair = CandidatePair {
            code,
            mapping,
            profile,
        };
        let trace = CascadeTrace {
            rows,
            seed_receiver: None,
            seed_codes: 0,
            mappings_per_code: 0,
            arbitrary: true,
        };
        return Ok((vec![pair], trace));
    };

    for &i in &priority[..seed_at] {
        rows.push(TraceRow {
            receiver: i,
            eta: eta(i),
            role: StageRole::SkippedFullConstellation,
            survivors: 0,
            delta: None,
            gain_db: None,
        });
    }

    // Seed: codes attaining the minimum, each with its optimal mappings.
    let seed_receiver = priority[seed_at];
    let seed_eta = eta(seed_receiver);
    let seed_codes: Vec<usize> = (0..codes.len())
        .filter(|&c| sizes[c][seed_receiver] == seed_eta)
        .collect();
    let per_code: Vec<Vec<PskMapping>> = seed_codes
        .par_iter()
        .map(|&c| optimal_mappings_for(icp, &codes[c], seed_receiver))
        .collect::<Result<_>>()?;
    let mappings_per_code = per_code.first().map_or(0, Vec::len);
    let mut pairs: Vec<(usize, PskMapping)> = Vec::new();
    for (&c, maps) in seed_codes.iter().zip(per_code) {
        for m in maps {
            pairs.push((c, m));
        }
    }
    // Every seed pair attains the same seed-receiver distance by
    // construction: two antipodal arcs of `half` points.
    let half = seed_eta / 2;
    let seed_delta = constellation.chord_at(order / 2 - half + 1);
    rows.push(TraceRow {
        receiver: seed_receiver,
        eta: seed_eta,
        role: StageRole::Seed,
        survivors: pairs.len(),
        delta: Some(seed_delta),
        gain_db: Some(psk_icg(seed_delta, icp.n())?),
    });

    // Filter stages for the remaining receivers in priority order.
    let mut compact: Vec<Option<CompactFamily>> = Vec::new();
    for &i in &priority[seed_at + 1..] {
        compact.clear();
        compact.resize_with(codes.len(), || None);
        for &(c, _) in &pairs {
            if compact[c].is_none() {
                compact[c] = Some(CompactFamily::build(&codes[c], icp, i)?);
            }
        }
        let dists: Vec<f64> = pairs
            .par_iter()
            .map(|(c, m)| {
                compact[*c]
                    .as_ref()
                    .expect("family built")
                    .min_distance(&constellation, m)
            })
            .collect();
        let delta = dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut kept = Vec::with_capacity(pairs.len());
        for (pair, d) in pairs.into_iter().zip(&dists) {
            if *d >= delta - DIST_TOL {
                kept.push(pair);
            }
        }
        pairs = kept;
        rows.push(TraceRow {
            receiver: i,
            eta: eta(i),
            role: StageRole::Filter,
            survivors: pairs.len(),
            delta: Some(delta),
            gain_db: Some(psk_icg(delta, icp.n())?),
        });
    }

    let out: Vec<CandidatePair> = pairs
        .into_par_iter()
        .map(|(c, mapping)| {
            let code = codes[c].clone();
            let profile = distance_profile(icp, &code, &mapping)?;
            Ok(CandidatePair {
                code,
                mapping,
                profile,
            })
        })
        .collect::<Result<_>>()?;
    let trace = CascadeTrace {
        rows,
        seed_receiver: Some(seed_receiver),
        seed_codes: seed_codes.len(),
        mappings_per_code,
        arbitrary: false,
    };
    Ok((out, trace))
}

/// Keeps the pairs maximizing receiver `receiver`'s minimum inter-set
/// distance (ties within tolerance kept); returns them with the
/// maximum.
pub fn filter_by_receiver(
    pairs: &[CandidatePair],
    receiver: usize,
) -> Result<(Vec<CandidatePair>, f64)> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairSet);
    }
    let delta = pairs
        .iter()
        .map(|p| p.profile.distances[receiver])
        .fold(f64::NEG_INFINITY, f64::max);
    let kept = pairs
        .iter()
        .filter(|p| p.profile.distances[receiver] >= delta - DIST_TOL)
        .cloned()
        .collect();
    Ok((kept, delta))
}

/// Result of exhaustively scoring every canonical mapping of every
/// code.
#[derive(Debug, Clone)]
pub struct ExhaustiveReport {
    pub pairs_evaluated: u64,
    /// For each priority-prefix length `j`, the lexicographically
    /// maximal achievable distance vector `(d_1, .., d_j)` (priority
    /// order).
    pub best_prefix_distances: Vec<Vec<f64>>,
    /// Pairs achieving the full-length best vector, as
    /// (code index, mapping).
    pub final_pairs: Vec<(usize, PskMapping)>,
}

/// Exhaustively evaluates ALL canonical mappings (not only arc-form
/// ones) for every code, cascading the maximum distance down the
/// priority order. This is the independent check that the cascade's
/// gains cannot be beaten; it is scale-guarded to small constellations.
pub fn exhaustive_search(
    icp: &IndexCodingProblem,
    codes: &[IndexCode],
) -> Result<ExhaustiveReport> {
    if codes.is_empty() {
        return Err(Error::EmptyCodeSet);
    }
    let n_code_len = codes[0].len();
    let order = 1usize << n_code_len;
    if order > 8 {
        return Err(Error::ScaleGuard(format!(
            "exhaustive mapping search supports order <= 8, got {order}"
        )));
    }
    let mapping_count: u64 = (1..order as u64).product();
    let total = mapping_count * codes.len() as u64;
    if total > 20_000_000 {
        return Err(Error::ScaleGuard(format!(
            "{total} (code, mapping) pairs to score"
        )));
    }
    for c in codes {
        if c.len() != n_code_len {
            return Err(Error::DimensionMismatch {
                expected: n_code_len,
                got: c.len(),
            });
        }
        c.check_decodable(icp)?;
    }
    let constellation = Constellation::for_code_len(n_code_len)?;

    // All canonical mappings: word 0 pinned to position 0, the rest
    // permuted freely.
    let mut mappings: Vec<PskMapping> = Vec::with_capacity(mapping_count as usize);
    for perm in (1..order as u16).permutations(order - 1) {
        let mut pos_of = vec![0u16; order];
        for (w, &p) in perm.iter().enumerate() {
            pos_of[w + 1] = p;
        }
        mappings.push(PskMapping::from_positions(pos_of, n_code_len)?);
    }

    let priority = icp.priority();
    let families: Vec<Vec<CompactFamily>> = codes
        .iter()
        .map(|c| {
            priority
                .iter()
                .map(|&i| CompactFamily::build(c, icp, i))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    // Cascade over all pairs, one priority receiver at a time.
    let mut survivors: Vec<(usize, usize)> = (0..codes.len())
        .flat_map(|c| (0..mappings.len()).map(move |m| (c, m)))
        .collect();
    let mut best_prefix: Vec<f64> = Vec::new();
    let mut best_prefix_distances = Vec::with_capacity(priority.len());
    for stage in 0..priority.len() {
        let dists: Vec<f64> = survivors
            .par_iter()
            .map(|&(c, m)| families[c][stage].min_distance(&constellation, &mappings[m]))
            .collect();
        let delta = dists.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut kept = Vec::new();
        for (pair, d) in survivors.into_iter().zip(&dists) {
            if *d >= delta - DIST_TOL {
                kept.push(pair);
            }
        }
        survivors = kept;
        best_prefix.push(delta);
        best_prefix_distances.push(best_prefix.clone());
    }

    Ok(ExhaustiveReport {
        pairs_evaluated: total,
        best_prefix_distances,
        final_pairs: survivors
            .into_iter()
            .map(|(c, m)| (c, mappings[m].clone()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{example1_code, example2_code, parse_code};
    use crate::enumerate::enumerate_codes;
    use crate::icp::{example1, example2, IndexCodingProblem};

    #[test]
    fn thirty_two_optimal_mappings_per_code() {
        let icp = example1();
        let code = parse_code("x1, x2+x3, x4+x5", 5).unwrap();
        let maps = optimal_mappings_for(&icp, &code, 0).unwrap();
        assert_eq!(maps.len(), 32);
        // All canonical, all distinct, all attaining the arc optimum.
        let distinct: std::collections::HashSet<_> =
            maps.iter().map(|m| m.rendering()).collect();
        assert_eq!(distinct.len(), 32);
        let c = Constellation::new(8).unwrap();
        let family = effective_sets(&code, &icp, 0).unwrap();
        for m in &maps {
            assert!(m.is_canonical());
            let d = crate::psk::min_inter_set_distance(&c, &family, m).unwrap();
            assert!((d - 1.8477590650225735).abs() < 1e-9);
        }
        // The identity mapping is one of them.
        assert!(maps.contains(&PskMapping::identity(3).unwrap()));
    }

    #[test]
    fn antipodal_mapping_count_for_singleton_halves() {
        // eta = 2 on 16-PSK: every pair of words maps to a diameter.
        let icp = example2();
        let code = example2_code();
        let maps = optimal_mappings_for(&icp, &code, 0).unwrap();
        assert_eq!(maps.len(), 645_120);
        let c = Constellation::new(16).unwrap();
        let family = effective_sets(&code, &icp, 0).unwrap();
        // Spot-check a deterministic sample rather than all 645k.
        for m in maps.iter().step_by(50_000) {
            let d = crate::psk::min_inter_set_distance(&c, &family, m).unwrap();
            assert!((d - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_constellation_receiver_rejected() {
        let icp = example1();
        let code = example1_code();
        // R_4 sees all eight points under this code.
        assert_eq!(
            optimal_mappings_for(&icp, &code, 3).unwrap_err(),
            Error::FullConstellation(3)
        );
    }

    #[test]
    fn cascade_on_worked_instance() {
        let icp = example1();
        let (codes, _) = enumerate_codes(&icp, 3).unwrap();
        let (pairs, trace) = find_optimal_pairs(&icp, &codes).unwrap();

        assert_eq!(trace.seed_receiver, Some(0));
        // 56 codes attain the smallest effective-set size for R_1 (two
        // of the six row spaces), each with 32 optimal mappings; the
        // R_2 filter keeps 4 mappings per code. Both counts are pinned
        // by the exhaustive all-mappings search in the test below.
        assert_eq!(trace.seed_codes, 56);
        assert_eq!(trace.mappings_per_code, 32);
        let survivors: Vec<usize> = trace.rows.iter().map(|r| r.survivors).collect();
        assert_eq!(survivors, vec![1792, 224, 224, 224, 224]);
        assert!((trace.rows[1].delta.unwrap() - 1.4142135623730951).abs() < 1e-9);
        assert_eq!(pairs.len(), 224);

        // The four pairs reported for this instance are all present.
        for (code_str, map_str) in [
            ("{x1, x2+x3, x4+x5}", "(0,1,2,3,4,5,6,7)"),
            ("{x1, x2+x3, x4+x5}", "(0,1,6,7,4,5,2,3)"),
            ("{x1, x2+x3, x1+x4+x5}", "(0,1,2,3,5,4,7,6)"),
            ("{x1, x1+x2+x3, x4+x5}", "(0,1,2,3,6,7,4,5)"),
        ] {
            let code = parse_code(code_str, 5).unwrap();
            let mapping = PskMapping::parse(map_str).unwrap();
            assert!(
                pairs
                    .iter()
                    .any(|p| p.code == code && p.mapping == mapping),
                "missing pair ({code_str}, {map_str})"
            );
        }

        // Output is sorted by (code, mapping rendering) and includes
        // the worked encoding matrix among the survivor codes.
        assert!(pairs
            .windows(2)
            .all(|w| (&w[0].code, w[0].mapping.rendering())
                <= (&w[1].code, w[1].mapping.rendering())));
        assert!(pairs.iter().any(|p| p.code == example1_code()));
    }

    #[test]
    fn cascade_on_given_single_code() {
        let icp = example2();
        let code = example2_code();
        let (pairs, trace) = find_optimal_pairs(&icp, &[code]).unwrap();
        let survivors: Vec<usize> = trace.rows.iter().map(|r| r.survivors).collect();
        assert_eq!(survivors, vec![645_120, 128, 24, 16, 16, 16]);
        let deltas: Vec<f64> = trace.rows.iter().map(|r| r.delta.unwrap()).collect();
        assert!((deltas[1] - 1.8477590650225735).abs() < 1e-9);
        assert!((deltas[2] - 0.7653668647301796).abs() < 1e-9);
        assert!((deltas[3] - 0.7653668647301796).abs() < 1e-9);
        assert_eq!(pairs.len(), 16);
    }

    #[test]
    fn arbitrary_pair_when_all_receivers_see_everything() {
        // No side information anywhere: every receiver sees the full
        // constellation for the identity code.
        let icp = IndexCodingProblem::single_unicast(2, &[&[], &[]]).unwrap();
        let code = parse_code("x1, x2", 2).unwrap();
        let (pairs, trace) = find_optimal_pairs(&icp, &[code]).unwrap();
        assert!(trace.arbitrary);
        assert_eq!(pairs.len(), 1);
        assert!(trace
            .rows
            .iter()
            .all(|r| r.role == StageRole::SkippedFullConstellation));
    }

    #[test]
    fn filter_keeps_argmax_with_ties() {
        let icp = example1();
        let (codes, _) = enumerate_codes(&icp, 3).unwrap();
        let (pairs, _) = find_optimal_pairs(&icp, &codes).unwrap();
        let (kept, delta) = filter_by_receiver(&pairs, 1).unwrap();
        assert_eq!(kept.len(), pairs.len());
        assert!((delta - 1.4142135623730951).abs() < 1e-9);

        let single = &pairs[..1];
        let (kept, delta) = filter_by_receiver(single, 2).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(delta, single[0].profile.distances[2]);

        assert_eq!(
            filter_by_receiver(&[], 0).unwrap_err(),
            Error::EmptyPairSet
        );
    }

    #[test]
    fn priority_reorder_never_helps_later_placement() {
        // Moving a receiver earlier in the priority order can only
        // raise (or keep) the distance it ends up with.
        let icp = example1();
        let (codes, _) = enumerate_codes(&icp, 3).unwrap();
        let base = example1();
        let (_, trace_base) = find_optimal_pairs(&base, &codes).unwrap();
        let delta_of = |trace: &CascadeTrace, r: usize| {
            trace
                .rows
                .iter()
                .find(|row| row.receiver == r)
                .and_then(|row| row.delta)
                .unwrap()
        };
        for moved in 1..5usize {
            let mut order: Vec<usize> = (0..5).collect();
            order.retain(|&x| x != moved);
            order.insert(1, moved);
            let reordered = icp.with_priority(order).unwrap();
            let (_, trace_new) = find_optimal_pairs(&reordered, &codes).unwrap();
            assert!(
                delta_of(&trace_new, moved) >= delta_of(&trace_base, moved) - DIST_TOL,
                "receiver {moved} lost distance when prioritized earlier"
            );
        }
    }

    #[test]
    fn exhaustive_search_confirms_cascade_on_worked_instance() {
        let icp = example1();
        let (codes, _) = enumerate_codes(&icp, 3).unwrap();
        let (pairs, trace) = find_optimal_pairs(&icp, &codes).unwrap();
        let report = exhaustive_search(&icp, &codes).unwrap();

        // The cascade's per-receiver distances equal the true maxima
        // over every canonical mapping of every code.
        let deltas: Vec<f64> = trace.rows.iter().map(|r| r.delta.unwrap()).collect();
        let best = report.best_prefix_distances.last().unwrap();
        assert_eq!(best.len(), deltas.len());
        for (a, b) in best.iter().zip(&deltas) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }

        // The survivor sets coincide exactly.
        let cascade_set: std::collections::HashSet<(IndexCode, Vec<u64>)> = pairs
            .iter()
            .map(|p| (p.code.clone(), p.mapping.rendering()))
            .collect();
        let oracle_set: std::collections::HashSet<(IndexCode, Vec<u64>)> = report
            .final_pairs
            .iter()
            .map(|(c, m)| (codes[*c].clone(), m.rendering()))
            .collect();
        assert_eq!(cascade_set, oracle_set);
    }

    #[test]
    fn exhaustive_matches_construction_for_tiny_instance() {
        // One code, one receiver on 4-PSK: the exhaustive survivor set
        // equals the arc-construction output.
        let icp = IndexCodingProblem::new(
            2,
            vec![crate::icp::Receiver::new(0, [1])],
            None,
        )
        .unwrap();
        let code = parse_code("x1, x2", 2).unwrap();
        let maps = optimal_mappings_for(&icp, &code, 0).unwrap();
        let report = exhaustive_search(&icp, &[code]).unwrap();
        let mut exhaustive: Vec<PskMapping> =
            report.final_pairs.iter().map(|(_, m)| m.clone()).collect();
        exhaustive.sort_by_cached_key(|m| m.rendering_key());
        assert_eq!(exhaustive, maps);
    }

    #[test]
    fn pair_notation_roundtrip() {
        let (code, mapping) =
            parse_pair("({x1, x2+x3, x4+x5}, (0,1,6,7,4,5,2,3))", 5).unwrap();
        assert_eq!(code, parse_code("x1, x2+x3, x4+x5", 5).unwrap());
        assert_eq!(mapping, PskMapping::parse("(0,1,6,7,4,5,2,3)").unwrap());
        let pair = CandidatePair {
            code,
            mapping,
            profile: crate::psk::distance_profile(
                &example1(),
                &parse_code("x1, x2+x3, x4+x5", 5).unwrap(),
                &PskMapping::parse("(0,1,6,7,4,5,2,3)").unwrap(),
            )
            .unwrap(),
        };
        assert_eq!(pair.render(), "({x1, x2+x3, x4+x5}, (0,1,6,7,4,5,2,3))");
        let (c2, m2) = parse_pair(&pair.render(), 5).unwrap();
        assert_eq!((c2, m2), (pair.code, pair.mapping));
        // Mapping size must match the code length.
        assert!(parse_pair("({x1, x2}, (0,1,2,3,4,5,6,7))", 5).is_err());
    }

    #[test]
    fn scale_guard_rejects_large_orders() {
        let icp = example2();
        let err = exhaustive_search(&icp, &[example2_code()]).unwrap_err();
        assert!(matches!(err, Error::ScaleGuard(_)));
    }

    #[test]
    fn scale_guard_rejects_huge_mapping_counts() {
        // One receiver with no side information on an 8-message,
        // length-6 identity-style code: eta = 2 with k = 32 arc pairs
        // is far beyond enumeration.
        let icp = IndexCodingProblem::new(
            8,
            vec![
                crate::icp::Receiver::new(0, 1..8),
                crate::icp::Receiver::new(1, [0]),
            ],
            None,
        )
        .unwrap();
        let code = parse_code("x1, x2, x3, x4, x5, x6", 8).unwrap();
        let err = optimal_mappings_for(&icp, &code, 0).unwrap_err();
        assert!(matches!(err, Error::ScaleGuard(_)), "{err:?}");
    }
}
