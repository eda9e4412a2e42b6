//! Packing-sequence prediction from human demonstrations.
//!
//! The crate learns a first-order Markov chain over packable objects from
//! demonstrated packing orders, precomputes a level table of multi-hop
//! transitions and samples packing plans with a modified beam search that
//! only ever targets objects still left to pack. It also carries the exact
//! 2x2 statistics used to compare human judgments of generated sequences.
//!
//! Everything here is pure computation over in-memory data (`no_std` with
//! `alloc`). File formats, the evaluation service and the CLI live in the
//! `packseq` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod describe;
pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod levels;
pub mod markov;
pub mod planner;
pub mod scene;
pub mod stats;

pub use catalog::{
    BBox, ContainerSpec, Demonstration, ObjectCatalog, ObjectId, ObjectSpec, PlacementRecord,
};
pub use error::{Error, Result};
pub use levels::{LevelEntry, LevelTable};
pub use markov::{MarkovChain, MiningConfig, PairSupport, StateId};
pub use planner::{PackingPlan, SearchConfig};
