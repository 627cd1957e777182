//! Python bindings: exposes the problem model, index codes, PSK
//! mappings, the enumeration and optimization pipeline, and the Monte
//! Carlo simulator as an `icpsk` extension module.
//!
//! Receiver arguments follow the R_1..R_m labeling (1-based), matching
//! the CLI and the printed tables. Broadcast vectors cross the
//! boundary as decimal words (first coded bit most significant).

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use icpsk_core::code::{parse_code, parse_codes_file};
use icpsk_core::effective::{effective_set_size, effective_sets, labeled_partition};
use icpsk_core::enumerate;
use icpsk_core::gf2::BitVec;
use icpsk_core::optimizer;
use icpsk_core::psk;
use icpsk_core::sim;
use icpsk_core::{IndexCode, IndexCodingProblem, PskMapping};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn receiver_index(icp: &IndexCodingProblem, one_based: usize) -> PyResult<usize> {
    if one_based == 0 || one_based > icp.m() {
        return Err(err(format!("receiver {one_based} outside 1..={}", icp.m())));
    }
    Ok(one_based - 1)
}

/// An index coding problem: messages, receivers with side information,
/// and a receiver priority order.
#[pyclass(name = "Problem", from_py_object)]
#[derive(Clone)]
struct PyProblem {
    inner: IndexCodingProblem,
}

#[pymethods]
impl PyProblem {
    /// Single-unicast problem: receiver i wants message i; `known`
    /// lists each receiver's side information as 1-based indices.
    #[staticmethod]
    fn single_unicast(n: usize, known: Vec<Vec<usize>>) -> PyResult<Self> {
        let refs: Vec<&[usize]> = known.iter().map(Vec::as_slice).collect();
        Ok(Self {
            inner: IndexCodingProblem::single_unicast(n, &refs).map_err(err)?,
        })
    }

    /// Parses the JSON problem document (same schema as the CLI).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: IndexCodingProblem::from_json(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: IndexCodingProblem::load(path).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    /// Priority order as 1-based receiver numbers, highest first.
    #[getter]
    fn priority(&self) -> Vec<usize> {
        self.inner.priority().iter().map(|&p| p + 1).collect()
    }

    /// Same problem with a different priority order (1-based).
    fn with_priority(&self, priority: Vec<usize>) -> PyResult<Self> {
        let zero: Vec<usize> = priority
            .iter()
            .map(|&p| p.checked_sub(1).ok_or_else(|| err("priority entries are 1-based")))
            .collect::<PyResult<_>>()?;
        Ok(Self {
            inner: self.inner.with_priority(zero).map_err(err)?,
        })
    }

    /// (wants, knows) per receiver, 1-based.
    fn receivers(&self) -> Vec<(usize, Vec<usize>)> {
        self.inner
            .receivers()
            .iter()
            .map(|r| {
                (
                    r.wants() + 1,
                    r.knows().iter().map(|&k| k + 1).collect(),
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Problem(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// A scalar linear index code, e.g. `Code("x1, x2+x3, x4+x5", 5)`.
#[pyclass(name = "Code", from_py_object)]
#[derive(Clone)]
struct PyCode {
    inner: IndexCode,
}

#[pymethods]
impl PyCode {
    #[new]
    fn new(symbols: &str, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: parse_code(symbols, n).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Code length N (bits per broadcast vector).
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Coded symbols in order, e.g. ["x1", "x2+x3"].
    fn symbols(&self) -> Vec<String> {
        (0..self.inner.len()).map(|k| self.inner.symbol(k)).collect()
    }

    /// Broadcast word (decimal) for a message vector given as bits
    /// (x1 first).
    fn encode(&self, x: Vec<u8>) -> PyResult<u64> {
        let mut v = BitVec::zero(x.len()).map_err(err)?;
        for (i, b) in x.iter().enumerate() {
            v = v.with_bit(i, *b != 0);
        }
        Ok(self.inner.encode(&v).map_err(err)?.decimal())
    }

    fn is_decodable(&self, problem: &PyProblem) -> bool {
        self.inner.check_decodable(&problem.inner).is_ok()
    }

    /// |S_L(a_i)| for receiver `i` (1-based).
    fn effective_set_size(&self, problem: &PyProblem, receiver: usize) -> PyResult<usize> {
        let i = receiver_index(&problem.inner, receiver)?;
        Ok(effective_set_size(&self.inner, problem.inner.receiver(i)))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Code({})", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// A bijection from broadcast vectors to PSK points, rendered as the
/// decimal word list in point order, e.g. `(0,1,2,3,4,5,6,7)`.
#[pyclass(name = "Mapping", from_py_object)]
#[derive(Clone)]
struct PyMapping {
    inner: PskMapping,
}

#[pymethods]
impl PyMapping {
    #[new]
    fn new(rendering: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: PskMapping::from_rendering(&rendering).map_err(err)?,
        })
    }

    /// Parses the list form "(0,1,2,3,4,5,6,7)".
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: PskMapping::parse(text).map_err(err)?,
        })
    }

    /// Natural-order mapping of the given width.
    #[staticmethod]
    fn identity(width: usize) -> PyResult<Self> {
        Ok(Self {
            inner: PskMapping::identity(width).map_err(err)?,
        })
    }

    fn rendering(&self) -> Vec<u64> {
        self.inner.rendering()
    }

    fn rotated(&self, steps: usize) -> Self {
        Self {
            inner: self.inner.rotated(steps),
        }
    }

    fn canonical(&self) -> Self {
        Self {
            inner: self.inner.canonical(),
        }
    }

    #[getter]
    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Mapping{}", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Enumerates all valid codes of length `n_code_len` for a
/// single-unicast problem. Returns (codes, stats).
#[pyfunction]
fn enumerate_codes(
    problem: &PyProblem,
    n_code_len: usize,
) -> PyResult<(Vec<PyCode>, HashMap<String, u64>)> {
    let (codes, stats) =
        enumerate::enumerate_codes(&problem.inner, n_code_len).map_err(err)?;
    let stats = HashMap::from([
        ("candidates".to_string(), stats.candidates),
        ("full_rank".to_string(), stats.full_rank),
        ("distinct_spaces".to_string(), stats.distinct_spaces as u64),
        ("codes_per_space".to_string(), stats.codes_per_space),
        ("total_codes".to_string(), stats.total_codes),
    ]);
    Ok((
        codes.into_iter().map(|inner| PyCode { inner }).collect(),
        stats,
    ))
}

/// Distinct effective sets of receiver `receiver` (1-based), each as
/// (carrier, part0, part1) in decimal words.
#[pyfunction]
fn effective_families(
    problem: &PyProblem,
    code: &PyCode,
    receiver: usize,
) -> PyResult<Vec<(Vec<u64>, Vec<u64>, Vec<u64>)>> {
    let i = receiver_index(&problem.inner, receiver)?;
    let family = effective_sets(&code.inner, &problem.inner, i).map_err(err)?;
    let dec = |v: &[BitVec]| {
        let mut d: Vec<u64> = v.iter().map(BitVec::decimal).collect();
        d.sort_unstable();
        d
    };
    Ok(family
        .sets
        .iter()
        .map(|s| (dec(&s.carrier), dec(&s.parts[0]), dec(&s.parts[1])))
        .collect())
}

/// The labeled (C0, C1) partition for one side-information realization
/// given as bits in the order of the receiver's sorted known set.
#[pyfunction]
fn labeled_sets(
    problem: &PyProblem,
    code: &PyCode,
    receiver: usize,
    realization: Vec<u8>,
) -> PyResult<(Vec<u64>, Vec<u64>)> {
    let i = receiver_index(&problem.inner, receiver)?;
    let r = problem.inner.receiver(i);
    let mut a = BitVec::zero(realization.len()).map_err(err)?;
    for (k, b) in realization.iter().enumerate() {
        a = a.with_bit(k, *b != 0);
    }
    let (c0, c1) = labeled_partition(&code.inner, r, &a).map_err(err)?;
    let dec = |v: Vec<BitVec>| v.iter().map(BitVec::decimal).collect();
    Ok((dec(c0), dec(c1)))
}

/// Per-receiver minimum inter-set distances and coding gains (dB).
#[pyfunction]
fn distance_profile(
    problem: &PyProblem,
    code: &PyCode,
    mapping: &PyMapping,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = psk::distance_profile(&problem.inner, &code.inner, &mapping.inner).map_err(err)?;
    Ok((p.distances, p.gains_db))
}

/// PSK index coding gain in dB for distance `d` and `n` messages.
#[pyfunction]
fn psk_icg(d: f64, n_messages: usize) -> PyResult<f64> {
    psk::psk_icg(d, n_messages).map_err(err)
}

/// Runs the priority cascade. Returns (pairs, trace): pairs as dicts
/// with code/mapping strings and the distance profile; trace rows as
/// dicts keyed by receiver (1-based), eta, stage, survivors, delta,
/// gain_db.
#[pyfunction]
fn optimize(
    py: Python<'_>,
    problem: &PyProblem,
    codes: Vec<PyCode>,
) -> PyResult<(Vec<Py<PyAny>>, Vec<Py<PyAny>>)> {
    use pyo3::types::PyDict;
    let inner: Vec<IndexCode> = codes.into_iter().map(|c| c.inner).collect();
    let (pairs, trace) = optimizer::find_optimal_pairs(&problem.inner, &inner).map_err(err)?;
    let mut out_pairs = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let d = PyDict::new(py);
        d.set_item("code", p.code.to_string())?;
        d.set_item("mapping", p.mapping.to_string())?;
        d.set_item("distances", p.profile.distances.clone())?;
        d.set_item("gains_db", p.profile.gains_db.clone())?;
        out_pairs.push(d.into_any().unbind());
    }
    let mut out_trace = Vec::with_capacity(trace.rows.len());
    for r in &trace.rows {
        let d = PyDict::new(py);
        d.set_item("receiver", r.receiver + 1)?;
        d.set_item("eta", r.eta)?;
        d.set_item(
            "stage",
            match r.role {
                optimizer::StageRole::SkippedFullConstellation => "skip",
                optimizer::StageRole::Seed => "seed",
                optimizer::StageRole::Filter => "filter",
            },
        )?;
        d.set_item("survivors", r.survivors)?;
        d.set_item("delta", r.delta)?;
        d.set_item("gain_db", r.gain_db)?;
        out_trace.push(d.into_any().unbind());
    }
    Ok((out_pairs, out_trace))
}

/// All optimal mappings of `code` for one receiver (1-based), as
/// rendering strings.
#[pyfunction]
fn optimal_mappings(
    problem: &PyProblem,
    code: &PyCode,
    receiver: usize,
) -> PyResult<Vec<PyMapping>> {
    let i = receiver_index(&problem.inner, receiver)?;
    let maps =
        optimizer::optimal_mappings_for(&problem.inner, &code.inner, i).map_err(err)?;
    Ok(maps.into_iter().map(|inner| PyMapping { inner }).collect())
}

/// Monte Carlo message error rates. Returns one dict per
/// (snr, receiver) with trials, errors, rate and the 95% interval.
#[pyfunction]
#[pyo3(signature = (problem, code, mapping, snr_db, trials, seed=1, decoder="ml"))]
fn simulate(
    py: Python<'_>,
    problem: &PyProblem,
    code: &PyCode,
    mapping: &PyMapping,
    snr_db: Vec<f64>,
    trials: u64,
    seed: u64,
    decoder: &str,
) -> PyResult<Vec<Py<PyAny>>> {
    use pyo3::types::PyDict;
    let config = sim::SimConfig {
        snr_db,
        trials,
        seed,
        decoder: decoder.parse().map_err(err)?,
    };
    let curve = sim::simulate(&problem.inner, &code.inner, &mapping.inner, &config)
        .map_err(err)?;
    let mut rows = Vec::with_capacity(curve.points.len());
    for p in &curve.points {
        let (lo, hi) = p.ci95();
        let d = PyDict::new(py);
        d.set_item("snr_db", p.snr_db)?;
        d.set_item("receiver", p.receiver + 1)?;
        d.set_item("trials", p.trials)?;
        d.set_item("errors", p.errors)?;
        d.set_item("rate", p.rate())?;
        d.set_item("ci_lo", lo)?;
        d.set_item("ci_hi", hi)?;
        rows.push(d.into_any().unbind());
    }
    Ok(rows)
}

/// Parses a codes document (one code per line, `#` comments).
#[pyfunction]
fn parse_codes(text: &str, n: usize) -> PyResult<Vec<PyCode>> {
    Ok(parse_codes_file(text, n)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyCode { inner })
        .collect())
}

/// Parses pair notation "({x1, x2+x3}, (0,1,2,3))".
#[pyfunction]
fn parse_pair(text: &str, n: usize) -> PyResult<(PyCode, PyMapping)> {
    let (code, mapping) = optimizer::parse_pair(text, n).map_err(err)?;
    Ok((PyCode { inner: code }, PyMapping { inner: mapping }))
}

#[pymodule]
fn icpsk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyCode>()?;
    m.add_class::<PyMapping>()?;
    m.add_function(wrap_pyfunction!(enumerate_codes, m)?)?;
    m.add_function(wrap_pyfunction!(effective_families, m)?)?;
    m.add_function(wrap_pyfunction!(labeled_sets, m)?)?;
    m.add_function(wrap_pyfunction!(distance_profile, m)?)?;
    m.add_function(wrap_pyfunction!(psk_icg, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_mappings, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_codes, m)?)?;
    m.add_function(wrap_pyfunction!(parse_pair, m)?)?;
    Ok(())
}
