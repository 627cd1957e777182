//! AWGN broadcast simulation: transmit index-coded PSK symbols, decode
//! each receiver's wanted bit with the likelihood-sum rule (or a
//! nearest-point baseline), and estimate message error rates by Monte
//! Carlo with a deterministic per-trial substream RNG.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::code::IndexCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Subspace};
use crate::icp::IndexCodingProblem;
use crate::psk::{Constellation, PskMapping};

/// AWGN with per-dimension variance `N0/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    n0: f64,
}

impl NoiseModel {
    pub fn new(n0: f64) -> Result<Self> {
        if !(n0 > 0.0) {
            return Err(Error::NonPositiveDistance(n0));
        }
        Ok(Self { n0 })
    }

    /// From `Es/N0` in dB with unit symbol energy (`Es = 1`).
    pub fn from_es_n0_db(snr_db: f64) -> Result<Self> {
        Self::new(10f64.powf(-snr_db / 10.0))
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Per-dimension standard deviation.
    pub fn sigma(&self) -> f64 {
        (self.n0 / 2.0).sqrt()
    }
}

/// A received two-dimensional signal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedPoint {
    pub i: f64,
    pub q: f64,
}

impl ReceivedPoint {
    pub fn dist_sq(&self, p: (f64, f64)) -> f64 {
        let di = self.i - p.0;
        let dq = self.q - p.1;
        di * di + dq * dq
    }
}

/// The noiseless transmit point for message vector `x`.
pub fn transmit(
    x: &BitVec,
    code: &IndexCode,
    mapping: &PskMapping,
    c: &Constellation,
) -> Result<ReceivedPoint> {
    let y = code.encode(x)?;
    if mapping.order() != c.order() || mapping.width() != code.len() {
        return Err(Error::DimensionMismatch {
            expected: c.order(),
            got: mapping.order(),
        });
    }
    let (i, q) = c.point(mapping.position(&y));
    Ok(ReceivedPoint { i, q })
}

/// Likelihood-sum decision: bit 0 when the summed Gaussian likelihoods
/// over `s0` dominate those over `s1` (ties to 0). Exponents are
/// max-shifted so high-SNR terms do not underflow to a 0/0 tie.
pub fn ml_decode(
    r: &ReceivedPoint,
    c: &Constellation,
    s0: &[usize],
    s1: &[usize],
    noise: &NoiseModel,
) -> Result<bool> {
    check_sets(s0, s1)?;
    Ok(ml_decide(r, c, s0, s1, noise.n0))
}

fn ml_decide(r: &ReceivedPoint, c: &Constellation, s0: &[usize], s1: &[usize], n0: f64) -> bool {
    let mut min_sq = f64::INFINITY;
    for &k in s0.iter().chain(s1) {
        min_sq = min_sq.min(r.dist_sq(c.point(k)));
    }
    let sum = |set: &[usize]| -> f64 {
        set.iter()
            .map(|&k| (-(r.dist_sq(c.point(k)) - min_sq) / n0).exp())
            .sum()
    };
    sum(s0) < sum(s1)
}

/// Nearest-point decision: bit 0 when the globally closest point lies
/// in `s0` (ties to 0).
pub fn min_distance_decode(
    r: &ReceivedPoint,
    c: &Constellation,
    s0: &[usize],
    s1: &[usize],
) -> Result<bool> {
    check_sets(s0, s1)?;
    Ok(min_distance_decide(r, c, s0, s1))
}

fn min_distance_decide(r: &ReceivedPoint, c: &Constellation, s0: &[usize], s1: &[usize]) -> bool {
    let best = |set: &[usize]| -> f64 {
        set.iter()
            .map(|&k| r.dist_sq(c.point(k)))
            .fold(f64::INFINITY, f64::min)
    };
    !(best(s0) <= best(s1))
}

fn check_sets(s0: &[usize], s1: &[usize]) -> Result<()> {
    if s0.is_empty() || s1.is_empty() || s0.iter().any(|p| s1.contains(p)) {
        return Err(Error::BadSignalSets);
    }
    Ok(())
}

/// Which decision rule the simulator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Ml,
    MinDist,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderKind::Ml => write!(f, "ml"),
            DecoderKind::MinDist => write!(f, "mindist"),
        }
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(DecoderKind::Ml),
            "mindist" => Ok(DecoderKind::MinDist),
            other => Err(Error::Parse(format!(
                "unknown decoder {other:?} (expected ml or mindist)"
            ))),
        }
    }
}

/// Monte Carlo run parameters. `Es/N0` in dB, unit symbol energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Parse("SNR list is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Parse("trial count must be at least 1".into()));
        }
        Ok(())
    }
}

/// One (SNR, receiver) measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub snr_db: f64,
    /// Receiver index (0-based).
    pub receiver: usize,
    pub trials: u64,
    pub errors: u64,
}

impl CurvePoint {
    pub fn rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }

    /// 95% Wilson score interval; always brackets the point estimate.
    pub fn ci95(&self) -> (f64, f64) {
        let z = 1.959963984540054f64;
        let n = self.trials as f64;
        let p = self.rate();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        // Wilson brackets the estimate analytically; the clamps also
        // keep that true against rounding at p = 0 or 1.
        (
            (center - half).max(0.0).min(p),
            (center + half).min(1.0).max(p),
        )
    }
}

/// Message error rates per (receiver, SNR).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateCurve {
    pub points: Vec<CurvePoint>,
}

impl ErrorRateCurve {
    pub fn point(&self, receiver: usize, snr_db: f64) -> Option<&CurvePoint> {
        self.points
            .iter()
            .find(|p| p.receiver == receiver && p.snr_db == snr_db)
    }

    /// CSV with columns snr_db, receiver (1-based), trials, errors,
    /// rate, ci_lo, ci_hi.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,receiver,trials,errors,rate,ci_lo,ci_hi\n");
        for p in &self.points {
            let (lo, hi) = p.ci95();
            out.push_str(&format!(
                "{},{},{},{},{:.6e},{:.6e},{:.6e}\n",
                p.snr_db,
                p.receiver + 1,
                p.trials,
                p.errors,
                p.rate(),
                lo,
                hi
            ));
        }
        out
    }
}

/// Per-receiver decode tables: for every realizable side-information
/// offset, the labeled 0/1 signal point sets.
struct ReceiverTables {
    wants: usize,
    known: Vec<usize>,
    known_rows: Vec<BitVec>,
    /// Indexed by offset word; only span members are populated.
    by_offset: Vec<Option<(Vec<usize>, Vec<usize>)>>,
}

/// Splitmix64 step, used to derive independent per-trial seeds.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic substream seed for (master, SNR index, trial index).
pub fn substream_seed(master: u64, snr_index: u64, trial: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ snr_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(s ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Estimates each receiver's message error rate for one (code,
/// mapping) pair. Every receiver decodes the same transmitted symbol
/// per trial, and results are reproducible from the seed alone,
/// independent of thread count.
pub fn simulate(
    icp: &IndexCodingProblem,
    code: &IndexCode,
    mapping: &PskMapping,
    config: &SimConfig,
) -> Result<ErrorRateCurve> {
    config.validate()?;
    code.check_decodable(icp)?;
    let c = Constellation::for_code_len(code.len())?;
    if mapping.order() != c.order() {
        return Err(Error::DimensionMismatch {
            expected: c.order(),
            got: mapping.order(),
        });
    }
    let order = c.order();
    let n = icp.n();
    let m = icp.m();
    let rows = code.rows();

    // Transmit lookup: word (as index) -> point coordinates.
    let tx_point: Vec<(f64, f64)> = (0..order)
        .map(|w| {
            let word = BitVec::from_index(w, code.len()).expect("in range");
            c.point(mapping.position(&word))
        })
        .collect();

    // Labeled decode sets per receiver per realizable offset.
    let mut tables = Vec::with_capacity(m);
    for r in icp.receivers() {
        let known: Vec<usize> = r.knows().to_vec();
        let known_rows: Vec<BitVec> = known.iter().map(|&j| rows[j]).collect();
        let free_rows: Vec<BitVec> = (0..n)
            .filter(|&j| j != r.wants() && known.binary_search(&j).is_err())
            .map(|j| rows[j])
            .collect();
        let half = Subspace::from_vectors(&free_rows, code.len())?.enumerate();
        let wanted_row = rows[r.wants()];
        let mut by_offset: Vec<Option<(Vec<usize>, Vec<usize>)>> = vec![None; order];
        for o in Subspace::from_vectors(&known_rows, code.len())?.enumerate() {
            let s0: Vec<usize> = half
                .iter()
                .map(|w| mapping.position(&(*w ^ o)))
                .collect();
            let s1: Vec<usize> = half
                .iter()
                .map(|w| mapping.position(&(*w ^ o ^ wanted_row)))
                .collect();
            by_offset[o.as_index()] = Some((s0, s1));
        }
        tables.push(ReceiverTables {
            wants: r.wants(),
            known,
            known_rows,
            by_offset,
        });
    }

    let x_mask: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut points = Vec::with_capacity(config.snr_db.len() * m);
    for (snr_index, &snr_db) in config.snr_db.iter().enumerate() {
        let noise = NoiseModel::from_es_n0_db(snr_db)?;
        let sigma = noise.sigma();
        let n0 = noise.n0();
        let errors: Vec<u64> = (0..config.trials)
            .into_par_iter()
            .fold(
                || vec![0u64; m],
                |mut acc, trial| {
                    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(
                        config.seed,
                        snr_index as u64,
                        trial,
                    ));
                    let x_bits: u64 = rng.gen::<u64>() & x_mask;
                    let x = BitVec::new(x_bits, n).expect("masked");
                    let (px, py) = tx_point[code
                        .encode(&x)
                        .expect("dimensions checked")
                        .as_index()];
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    let r = ReceivedPoint {
                        i: px + sigma * z1,
                        q: py + sigma * z2,
                    };
                    for (ri, t) in tables.iter().enumerate() {
                        let mut offset = BitVec::zero(code.len()).expect("in range");
                        for (row, &j) in t.known_rows.iter().zip(&t.known) {
                            if x.bit(j) {
                                offset = offset ^ *row;
                            }
                        }
                        let (s0, s1) = t.by_offset[offset.as_index()]
                            .as_ref()
                            .expect("offset lies in the known-row span");
                        let bit = match config.decoder {
                            DecoderKind::Ml => ml_decide(&r, &c, s0, s1, n0),
                            DecoderKind::MinDist => min_distance_decide(&r, &c, s0, s1),
                        };
                        if bit != x.bit(t.wants) {
                            acc[ri] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; m],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        for (ri, &e) in errors.iter().enumerate() {
            points.push(CurvePoint {
                snr_db,
                receiver: ri,
                trials: config.trials,
                errors: e,
            });
        }
    }
    Ok(ErrorRateCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{example1_code, parse_code};
    use crate::icp::example1;
    use crate::psk::PskMapping;

    fn c8() -> Constellation {
        Constellation::new(8).unwrap()
    }

    #[test]
    fn noise_model_from_db() {
        let nm = NoiseModel::from_es_n0_db(10.0).unwrap();
        assert!((nm.n0() - 0.1).abs() < 1e-12);
        assert!((nm.sigma() - (0.05f64).sqrt()).abs() < 1e-12);
        assert!(NoiseModel::new(0.0).is_err());
    }

    #[test]
    fn transmit_maps_through_encoder() {
        let code = example1_code();
        let c = c8();
        let m = PskMapping::identity(3).unwrap();
        // x = 0 encodes to word 0, canonically on point 1 (angle 0).
        let p = transmit(&BitVec::zero(5).unwrap(), &code, &m, &c).unwrap();
        assert!((p.i - 1.0).abs() < 1e-12 && p.q.abs() < 1e-12);
        // x = (10000) encodes to (110), decimal 6, position 6.
        let p = transmit(&"10000".parse().unwrap(), &code, &m, &c).unwrap();
        let expect = c.point(6);
        assert!((p.i - expect.0).abs() < 1e-12 && (p.q - expect.1).abs() < 1e-12);
        // Unit energy always.
        for x in 0..32u64 {
            let p = transmit(&BitVec::new(x, 5).unwrap(), &code, &m, &c).unwrap();
            assert!((p.i * p.i + p.q * p.q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ml_decode_prefers_near_set() {
        let c = c8();
        let noise = NoiseModel::new(1e-3).unwrap();
        // r exactly on a point of S0, S1 antipodal: decide 0.
        let r = ReceivedPoint { i: 1.0, q: 0.0 };
        assert!(!ml_decode(&r, &c, &[0], &[4], &noise).unwrap());
        // r equidistant from an antipodal pair: tie resolves to 0.
        let r = ReceivedPoint { i: 0.0, q: 0.0 };
        assert!(!ml_decode(&r, &c, &[0], &[4], &NoiseModel::new(0.5).unwrap()).unwrap());
        assert!(!min_distance_decode(&r, &c, &[0], &[4]).unwrap());
        // Worked numeric case: s1 at (1,0), s5 at (-1,0), N0 = 1.
        let r = ReceivedPoint { i: 0.9, q: 0.1 };
        assert!(!ml_decode(&r, &c, &[0], &[4], &NoiseModel::new(1.0).unwrap()).unwrap());
        // Validation.
        assert!(ml_decode(&r, &c, &[], &[1], &noise).is_err());
        assert!(ml_decode(&r, &c, &[1], &[1, 2], &noise).is_err());
    }

    #[test]
    fn ml_survives_high_snr_without_underflow() {
        let c = c8();
        let noise = NoiseModel::from_es_n0_db(60.0).unwrap();
        let (i, q) = c.point(3);
        let r = ReceivedPoint {
            i: i + 1e-6,
            q: q - 1e-6,
        };
        assert!(ml_decode(&r, &c, &[0, 1], &[3, 4], &noise).unwrap());
    }

    #[test]
    fn min_distance_decode_basics() {
        let c = c8();
        let (i, q) = c.point(5);
        let r = ReceivedPoint { i, q };
        assert!(min_distance_decode(&r, &c, &[0, 1], &[4, 5]).unwrap());
        // Singleton sets agree with the likelihood rule.
        let noise = NoiseModel::new(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let r = ReceivedPoint {
                i: rng.gen_range(-2.0..2.0),
                q: rng.gen_range(-2.0..2.0),
            };
            assert_eq!(
                ml_decode(&r, &c, &[2], &[6], &noise).unwrap(),
                min_distance_decode(&r, &c, &[2], &[6]).unwrap()
            );
        }
    }

    #[test]
    fn ml_approaches_min_distance_as_noise_vanishes() {
        let c = c8();
        let noise = NoiseModel::new(1e-6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let r = ReceivedPoint {
                i: rng.gen_range(-1.5..1.5),
                q: rng.gen_range(-1.5..1.5),
            };
            let s0 = [0usize, 2];
            let s1 = [5usize, 6];
            assert_eq!(
                ml_decode(&r, &c, &s0, &s1, &noise).unwrap(),
                min_distance_decode(&r, &c, &s0, &s1).unwrap()
            );
        }
    }

    fn quick_config(snr_db: Vec<f64>, trials: u64) -> SimConfig {
        SimConfig {
            snr_db,
            trials,
            seed: 0xA5A5,
            decoder: DecoderKind::Ml,
        }
    }

    #[test]
    fn noiseless_limit_has_zero_errors() {
        let icp = example1();
        let code = example1_code();
        let m = PskMapping::parse("(0,7,2,5,6,1,4,3)").unwrap();
        let curve = simulate(&icp, &code, &m, &quick_config(vec![100.0], 2_000)).unwrap();
        assert!(curve.points.iter().all(|p| p.errors == 0));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let icp = example1();
        let code = example1_code();
        let m = PskMapping::parse("(0,7,2,5,6,1,4,3)").unwrap();
        let cfg = quick_config(vec![4.0, 8.0], 20_000);
        let base = simulate(&icp, &code, &m, &cfg).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate(&icp, &code, &m, &cfg).unwrap());
        assert_eq!(base, single);
        assert_eq!(base.to_csv(), single.to_csv());
    }

    #[test]
    fn rate_non_increasing_in_snr_within_noise() {
        let icp = example1();
        let code = example1_code();
        let m = PskMapping::parse("(0,7,2,5,6,1,4,3)").unwrap();
        let cfg = quick_config(vec![0.0, 6.0, 12.0], 40_000);
        let curve = simulate(&icp, &code, &m, &cfg).unwrap();
        for r in 0..icp.m() {
            let rates: Vec<(f64, f64)> = cfg
                .snr_db
                .iter()
                .map(|&s| {
                    let p = curve.point(r, s).unwrap();
                    let sigma =
                        (p.rate() * (1.0 - p.rate()) / p.trials as f64).sqrt();
                    (p.rate(), sigma)
                })
                .collect();
            for w in rates.windows(2) {
                let slack = 3.0 * (w[0].1 + w[1].1);
                assert!(
                    w[1].0 <= w[0].0 + slack,
                    "rate increased with SNR beyond noise for R{}",
                    r + 1
                );
            }
        }
    }

    #[test]
    fn rotated_mapping_statistically_equivalent() {
        let icp = example1();
        let code = example1_code();
        let m = PskMapping::parse("(0,7,2,5,6,1,4,3)").unwrap();
        let cfg = quick_config(vec![6.0], 60_000);
        let base = simulate(&icp, &code, &m, &cfg).unwrap();
        let rot = simulate(&icp, &code, &m.rotated(3), &cfg).unwrap();
        for r in 0..icp.m() {
            let a = base.point(r, 6.0).unwrap();
            let b = rot.point(r, 6.0).unwrap();
            let sd = |p: &CurvePoint| (p.rate() * (1.0 - p.rate()) / p.trials as f64).sqrt();
            let slack = 4.0 * (sd(a) + sd(b)).max(1e-4);
            assert!(
                (a.rate() - b.rate()).abs() <= slack,
                "R{}: {} vs {}",
                r + 1,
                a.rate(),
                b.rate()
            );
        }
    }

    #[test]
    fn wilson_interval_brackets_rate() {
        for (t, e) in [(100u64, 0u64), (100, 100), (1000, 3), (10, 5)] {
            let p = CurvePoint {
                snr_db: 0.0,
                receiver: 0,
                trials: t,
                errors: e,
            };
            let (lo, hi) = p.ci95();
            assert!(lo <= p.rate() && p.rate() <= hi);
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn undecodable_pair_rejected() {
        let icp = example1();
        let code = parse_code("x1, x2, x3", 5).unwrap();
        let m = PskMapping::identity(3).unwrap();
        let err = simulate(&icp, &code, &m, &quick_config(vec![4.0], 10)).unwrap_err();
        assert!(matches!(err, Error::Undecodable { .. }));
    }

    #[test]
    fn config_validation() {
        assert!(quick_config(vec![], 10).validate().is_err());
        assert!(quick_config(vec![4.0], 0).validate().is_err());
        assert!(quick_config(vec![4.0], 1).validate().is_ok());
        assert!("ml".parse::<DecoderKind>().is_ok());
        assert!("mindist".parse::<DecoderKind>().is_ok());
        assert!("viterbi".parse::<DecoderKind>().is_err());
    }
}
