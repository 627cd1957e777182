//! Crate-wide error type.

use thiserror::Error;

use crate::icp::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector width {0} exceeds the supported maximum of 64")]
    WidthTooLarge(usize),
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("encoding matrix does not have full column rank")]
    NotFullRank,
    #[error("invalid problem: {}", format_violations(.0))]
    InvalidProblem(Vec<Violation>),
    #[error("receiver has an empty want set")]
    EmptyWants,
    #[error(
        "fitting-matrix enumeration requires a single-unicast problem \
         (m = n, receiver i wanting message i)"
    )]
    NotSingleUnicast,
    #[error("code {code} is not decodable for receiver R{}", .receiver + 1)]
    Undecodable { code: String, receiver: usize },
    #[error("code {code} cannot always recover x{} from the broadcast and side information", .wants + 1)]
    UndecodableWant { code: String, wants: usize },
    #[error("code set is empty")]
    EmptyCodeSet,
    #[error("pair set is empty")]
    EmptyPairSet,
    #[error("signal sets must be nonempty and disjoint")]
    BadSignalSets,
    #[error("distance must be positive (got {0})")]
    NonPositiveDistance(f64),
    #[error("receiver R{} sees the full constellation; no mapping constraint applies", .0 + 1)]
    FullConstellation(usize),
    #[error("problem size exceeds the exhaustive-search guard: {0}")]
    ScaleGuard(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
