//! Index-coded PSK modulation over an AWGN broadcast channel.
//!
//! Given an index coding problem, this crate enumerates the valid
//! scalar linear index codes of a chosen length, finds the (index
//! code, PSK mapping) pairs that maximize each receiver's minimum
//! inter-set distance in a given priority order, and verifies designs
//! with a likelihood-sum decoder Monte Carlo simulation.
//!
//! Modules follow the pipeline:
//!
//! - [`gf2`]: bit-packed GF(2) vectors, matrices, and subspaces.
//! - [`icp`]: the problem model (receivers, side information, priority).
//! - [`code`]: scalar linear index codes and decodability.
//! - [`effective`]: the broadcast-vector sets each receiver must
//!   distinguish, split by the wanted bit.
//! - [`enumerate`]: all valid codes of a given length via fitting
//!   matrices.
//! - [`psk`]: constellation geometry, mappings, inter-set distances,
//!   coding gain.
//! - [`optimizer`]: optimal mappings per receiver and the priority
//!   cascade.
//! - [`sim`]: AWGN Monte Carlo with ML and nearest-point decoders.

pub mod code;
pub mod effective;
pub mod enumerate;
mod error;
pub mod gf2;
pub mod icp;
pub mod optimizer;
pub mod psk;
pub mod sim;

pub use code::IndexCode;
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVec, Subspace};
pub use icp::{IndexCodingProblem, Receiver};
pub use optimizer::{CandidatePair, CascadeTrace};
pub use psk::{Constellation, DistanceProfile, PskMapping};
pub use sim::{ErrorRateCurve, SimConfig};
