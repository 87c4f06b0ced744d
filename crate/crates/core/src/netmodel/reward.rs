use super::{NetError, Path, Topology};

/// Overlap penalty used when none is configured.
pub const DEFAULT_ALPHA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RewardSpec {
    /// Penalty per node shared by the two paths.
    pub alpha: f64,
}

impl RewardSpec {
    pub fn new(alpha: f64) -> Result<Self, NetError> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self { alpha })
        } else {
            Err(NetError::InvalidAlpha(alpha))
        }
    }
}

impl Default for RewardSpec {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA }
    }
}

/// Number of distinct nodes present on both paths, endpoints included.
pub fn overlap_count(p1: &Path, p2: &Path) -> usize {
    let mut shared = 0;
    for (i, n) in p1.nodes().iter().enumerate() {
        if !p1.nodes()[..i].contains(n) && p2.contains(*n) {
            shared += 1;
        }
    }
    shared
}

/// `R = -Σ_{n∈p1}(w_n + c_n) - Σ_{m∈p2}(w_m + c_m) - α·O`.
///
/// Both sums run over every node of the path including its endpoints.
/// `weights` is indexed by node id; pass all zeros for the cost-only reward.
pub fn compute_reward(
    topology: &Topology,
    weights: &[u32],
    p1: &Path,
    p2: &Path,
    spec: RewardSpec,
) -> f64 {
    debug_assert!(weights.len() >= topology.node_count());
    let node_sum = |p: &Path| -> u64 {
        p.nodes().iter().map(|&n| u64::from(weights[n]) + u64::from(topology.cost(n))).sum()
    };
    let total = node_sum(p1) + node_sum(p2);
    -(total as f64) - spec.alpha * overlap_count(p1, p2) as f64
}
