//! The index coding problem: messages, receivers with side information,
//! and a receiver priority order.
//!
//! Message indices are 1-based at the file/CLI boundary (matching the
//! usual `x_1 .. x_n` labels) and 0-based everywhere inside the crate.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A receiver before normalization: may demand several messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReceiver {
    /// Wanted message indices (0-based).
    pub wants: Vec<usize>,
    /// Known message indices (0-based), disjoint from `wants`.
    pub knows: Vec<usize>,
}

/// A normalized receiver: wants exactly one message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Receiver {
    wants: usize,
    knows: Vec<usize>,
}

impl Receiver {
    /// `wants` and `knows` are 0-based; `knows` is sorted and deduplicated.
    pub fn new(wants: usize, knows: impl IntoIterator<Item = usize>) -> Self {
        let mut knows: Vec<usize> = knows.into_iter().collect();
        knows.sort_unstable();
        knows.dedup();
        Self { wants, knows }
    }

    /// Index of the wanted message, `f(i)` (0-based).
    pub fn wants(&self) -> usize {
        self.wants
    }

    /// Sorted side-information index set `I_i` (0-based).
    pub fn knows(&self) -> &[usize] {
        &self.knows
    }
}

/// A single violation found by [`IndexCodingProblem::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoMessages,
    NoReceivers,
    IndexOutOfRange { receiver: usize, index: usize },
    WantedInSideInfo { receiver: usize },
    BadPriority { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoMessages => write!(f, "message count must be at least 1"),
            Violation::NoReceivers => write!(f, "at least one receiver is required"),
            Violation::IndexOutOfRange { receiver, index } => write!(
                f,
                "receiver R{} references message x{} outside 1..=n",
                receiver + 1,
                index + 1
            ),
            Violation::WantedInSideInfo { receiver } => write!(
                f,
                "receiver R{}: wanted message is in its side information",
                receiver + 1
            ),
            Violation::BadPriority { detail } => {
                write!(f, "priority is not a permutation of the receivers: {detail}")
            }
        }
    }
}

/// An index coding problem `(X, R)` with a receiver priority order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCodingProblem {
    n: usize,
    receivers: Vec<Receiver>,
    /// Receiver indices (0-based), highest priority first.
    priority: Vec<usize>,
}

impl IndexCodingProblem {
    /// Builds and validates a problem. `priority` defaults to the
    /// receiver listing order when `None`.
    pub fn new(
        n: usize,
        receivers: Vec<Receiver>,
        priority: Option<Vec<usize>>,
    ) -> Result<Self> {
        let priority = priority.unwrap_or_else(|| (0..receivers.len()).collect());
        let icp = Self {
            n,
            receivers,
            priority,
        };
        icp.validate().map_err(Error::InvalidProblem)?;
        Ok(icp)
    }

    /// Convenience constructor for single-unicast problems where
    /// receiver `i` wants `x_{i+1}`; `known` lists 1-based side
    /// information per receiver.
    pub fn single_unicast(n: usize, known: &[&[usize]]) -> Result<Self> {
        let receivers = known
            .iter()
            .enumerate()
            .map(|(i, ks)| Receiver::new(i, ks.iter().map(|&k| k - 1)))
            .collect();
        Self::new(n, receivers, None)
    }

    /// Expands multi-demand receivers into one receiver per wanted
    /// message (adjacent, in ascending wanted-index order).
    pub fn normalize(raw: &[RawReceiver]) -> Result<Vec<Receiver>> {
        let mut out = Vec::new();
        for r in raw {
            if r.wants.is_empty() {
                return Err(Error::EmptyWants);
            }
            let mut wants = r.wants.clone();
            wants.sort_unstable();
            wants.dedup();
            for w in wants {
                out.push(Receiver::new(w, r.knows.iter().copied()));
            }
        }
        Ok(out)
    }

    /// Checks every structural invariant, reporting all violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if self.n == 0 {
            violations.push(Violation::NoMessages);
        }
        if self.receivers.is_empty() {
            violations.push(Violation::NoReceivers);
        }
        for (i, r) in self.receivers.iter().enumerate() {
            if r.wants >= self.n {
                violations.push(Violation::IndexOutOfRange {
                    receiver: i,
                    index: r.wants,
                });
            }
            for &k in &r.knows {
                if k >= self.n {
                    violations.push(Violation::IndexOutOfRange {
                        receiver: i,
                        index: k,
                    });
                }
            }
            if r.knows.binary_search(&r.wants).is_ok() {
                violations.push(Violation::WantedInSideInfo { receiver: i });
            }
        }
        let m = self.receivers.len();
        if self.priority.len() != m {
            violations.push(Violation::BadPriority {
                detail: format!("expected {m} entries, got {}", self.priority.len()),
            });
        } else {
            let mut seen = vec![false; m];
            for &p in &self.priority {
                if p >= m || seen[p] {
                    violations.push(Violation::BadPriority {
                        detail: format!("entry {} repeated or out of range", p + 1),
                    });
                    break;
                }
                seen[p] = true;
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of (normalized) receivers.
    pub fn m(&self) -> usize {
        self.receivers.len()
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub fn receiver(&self, i: usize) -> &Receiver {
        &self.receivers[i]
    }

    /// Receiver indices in decreasing priority order (0-based).
    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    /// Same problem with a different priority order.
    pub fn with_priority(&self, priority: Vec<usize>) -> Result<Self> {
        Self::new(self.n, self.receivers.clone(), Some(priority))
    }

    /// True when `m == n` and receiver `i` wants message `i`.
    pub fn is_single_unicast(&self) -> bool {
        self.m() == self.n && self.receivers.iter().enumerate().all(|(i, r)| r.wants == i)
    }

    /// Parses the JSON problem document (1-based indices, see README).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_problem()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    /// Serializes back to the JSON document form (1-based indices).
    pub fn to_json(&self) -> String {
        let file = ProblemFile {
            n: self.n,
            receivers: self
                .receivers
                .iter()
                .map(|r| ReceiverFile {
                    wants: vec![r.wants + 1],
                    knows: r.knows.iter().map(|&k| k + 1).collect(),
                })
                .collect(),
            priority: Some(self.priority.iter().map(|&p| p + 1).collect()),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    receivers: Vec<ReceiverFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    priority: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReceiverFile {
    wants: Vec<usize>,
    knows: Vec<usize>,
}

impl ProblemFile {
    fn into_problem(self) -> Result<IndexCodingProblem> {
        let shift = |v: &[usize], what: &str| -> Result<Vec<usize>> {
            v.iter()
                .map(|&i| {
                    i.checked_sub(1)
                        .ok_or_else(|| Error::Parse(format!("{what} indices are 1-based; got 0")))
                })
                .collect()
        };
        let mut raw = Vec::with_capacity(self.receivers.len());
        for r in &self.receivers {
            raw.push(RawReceiver {
                wants: shift(&r.wants, "wants")?,
                knows: shift(&r.knows, "knows")?,
            });
        }
        let receivers = IndexCodingProblem::normalize(&raw)?;
        let priority = match self.priority {
            Some(p) => Some(shift(&p, "priority")?),
            None => None,
        };
        IndexCodingProblem::new(self.n, receivers, priority)
    }
}

/// The worked five-message instance (side information
/// `{2,3}, {3,4,5}, {2,4,5}, {5}, {4}`).
pub fn example1() -> IndexCodingProblem {
    IndexCodingProblem::single_unicast(5, &[&[2, 3], &[3, 4, 5], &[2, 4, 5], &[5], &[4]])
        .expect("valid problem")
}

/// The worked six-message instance (side information
/// `{2..6}, {1,3,4,5}, {2,4,6}, {1,6}, {3}, {}`).
pub fn example2() -> IndexCodingProblem {
    IndexCodingProblem::single_unicast(
        6,
        &[&[2, 3, 4, 5, 6], &[1, 3, 4, 5], &[2, 4, 6], &[1, 6], &[3], &[]],
    )
    .expect("valid problem")
}

/// The worked five-message instance with a specified length-4 code
/// (side information `{2,3,4,5}, {1,4,5}, {1,4}, {2}, {}`).
pub fn example3() -> IndexCodingProblem {
    IndexCodingProblem::single_unicast(5, &[&[2, 3, 4, 5], &[1, 4, 5], &[1, 4], &[2], &[]])
        .expect("valid problem")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_expands_multi_demand() {
        let raw = vec![RawReceiver {
            wants: vec![0, 1],
            knows: vec![2],
        }];
        let out = IndexCodingProblem::normalize(&raw).unwrap();
        assert_eq!(
            out,
            vec![Receiver::new(0, [2]), Receiver::new(1, [2])]
        );
    }

    #[test]
    fn normalize_passes_single_demand_through() {
        let raw: Vec<RawReceiver> = (0..5)
            .map(|i| RawReceiver {
                wants: vec![i],
                knows: vec![(i + 1) % 5],
            })
            .collect();
        let out = IndexCodingProblem::normalize(&raw).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().enumerate().all(|(i, r)| r.wants() == i));
        assert_eq!(IndexCodingProblem::normalize(&[]).unwrap(), vec![]);
    }

    #[test]
    fn normalize_rejects_empty_wants() {
        let raw = vec![RawReceiver {
            wants: vec![],
            knows: vec![0],
        }];
        assert_eq!(
            IndexCodingProblem::normalize(&raw),
            Err(Error::EmptyWants)
        );
    }

    #[test]
    fn example_problems_validate() {
        assert_eq!(example1().m(), 5);
        assert_eq!(example2().m(), 6);
        assert_eq!(example3().m(), 5);
        assert!(example1().is_single_unicast());
    }

    #[test]
    fn validate_reports_violations() {
        let bad = IndexCodingProblem::new(
            3,
            vec![Receiver::new(0, [0, 1])],
            Some(vec![0, 0]),
        );
        let Err(Error::InvalidProblem(vs)) = bad else {
            panic!("expected invalid problem");
        };
        assert!(vs.contains(&Violation::WantedInSideInfo { receiver: 0 }));
        assert!(vs
            .iter()
            .any(|v| matches!(v, Violation::BadPriority { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let icp = example1();
        let text = icp.to_json();
        let back = IndexCodingProblem::from_json(&text).unwrap();
        assert_eq!(back, icp);
    }

    #[test]
    fn json_multi_demand_and_default_priority() {
        let text = r#"{
            "n": 3,
            "receivers": [
                {"wants": [1, 2], "knows": [3]},
                {"wants": [3], "knows": [1]}
            ]
        }"#;
        let icp = IndexCodingProblem::from_json(text).unwrap();
        assert_eq!(icp.m(), 3);
        assert_eq!(icp.priority(), &[0, 1, 2]);
        assert_eq!(icp.receiver(0).wants(), 0);
        assert_eq!(icp.receiver(1).wants(), 1);
        assert_eq!(icp.receiver(1).knows(), &[2]);
    }
}
