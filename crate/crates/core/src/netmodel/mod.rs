//! Network graph, routing demands, path-pair actions and the routing reward.

mod action;
mod paths;
mod reward;
mod topology;

pub use action::{build_action_space, ActionSpace, PathPairAction};
pub use paths::{enumerate_simple_paths, EnumerationLimits, Path, DEFAULT_PATH_CAP};
pub use reward::{compute_reward, overlap_count, RewardSpec, DEFAULT_ALPHA};
pub use topology::{Demand, Topology, MAX_COST, MIN_COST};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("node {node} out of range for a {node_count}-node topology")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("cost {cost} of node {node} outside [1, 200]")]
    CostOutOfRange { node: usize, cost: i64 },
    #[error("expected {expected} costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("demand source and destination are both {0}")]
    DegenerateDemand(usize),
    #[error("demand {src}->{dst} has no simple path")]
    NoPath { src: usize, dst: usize },
    #[error("more than {cap} simple paths for demand {src}->{dst}")]
    TooManyPaths { src: usize, dst: usize, cap: usize },
    #[error("invalid reward spec: alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
}
