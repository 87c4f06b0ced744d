//! Attack-aware routing on small networks.
//!
//! The crate is the `no_std` (alloc) half of `netres`. It holds everything
//! that is pure computation:
//!
//! - [`netmodel`]: undirected topologies with per-node communication cost,
//!   simple-path enumeration, path-pair action spaces and the routing reward.
//! - [`nn`]: a small dense/graph neural-network substrate with hand-written
//!   backward rules, Adam, and a finite-difference checker.
//! - [`traffic`]: synthetic labeled traffic and byte-level packet graphs.
//! - [`detector`]: a two-layer GCN packet classifier and per-node attack tallies.
//! - [`sentinel`]: Beta-Bernoulli security scoring producing integer weights.
//! - [`agent`]: the DQN that picks a path pair for two routing demands.
//! - [`metrics`]: smoothing, interval tables and run aggregation.
//!
//! File formats, the CLI and the experiment runner live in the `netres` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod agent;
pub mod detector;
pub mod metrics;
pub mod netmodel;
pub mod nn;
pub mod sentinel;
pub mod traffic;

mod rng;

pub use rng::{seeded_rng, SimRng};
