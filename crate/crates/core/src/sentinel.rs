//! Per-node security scoring.
//!
//! Each node carries a Beta(a, b) posterior over the probability that a
//! packet it receives is malicious. Observing `k` attack packets out of `n`
//! is the conjugate update `a += k`, `b += n - k`. The routing weight is the
//! posterior mean mapped affinely onto the integers 1..=200:
//!
//! `w = clamp(1 + round(199 · a / (a + b)), 1, 200)`, rounding half away from zero.

use alloc::vec::Vec;

use crate::netmodel::Topology;

pub const MIN_WEIGHT: u32 = 1;
pub const MAX_WEIGHT: u32 = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SentinelError {
    #[error("Beta parameters must be finite and positive, got ({0}, {1})")]
    BadPrior(f64, f64),
    #[error("attack count {attack} exceeds total {total}")]
    CountMismatch { attack: u64, total: u64 },
    #[error("node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPosterior {
    pub a: f64,
    pub b: f64,
}

impl BetaPosterior {
    pub fn new(a: f64, b: f64) -> Result<Self, SentinelError> {
        if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 {
            Ok(Self { a, b })
        } else {
            Err(SentinelError::BadPrior(a, b))
        }
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn weight(&self) -> u32 {
        weight_from_posterior(self.a, self.b)
    }
}

impl Default for BetaPosterior {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

pub fn weight_from_posterior(a: f64, b: f64) -> u32 {
    let mean = a / (a + b);
    let w = 1.0 + libm::round(199.0 * mean);
    if w.is_nan() {
        return MIN_WEIGHT;
    }
    (w as u32).clamp(MIN_WEIGHT, MAX_WEIGHT)
}

/// Posterior and weight for every node, plus the id of the last window
/// folded in.
///
/// Observations are kept as integer tallies on top of a base posterior, so
/// splitting a window into pieces gives bit-identical results.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityState {
    base: Vec<BetaPosterior>,
    /// `(attack, benign)` packets seen per node.
    tallies: Vec<(u64, u64)>,
    weights: Vec<u32>,
    window: u64,
}

impl SecurityState {
    pub fn init(topology: &Topology, prior: BetaPosterior) -> Result<Self, SentinelError> {
        Self::with_nodes(topology.node_count(), prior)
    }

    pub fn with_nodes(node_count: usize, prior: BetaPosterior) -> Result<Self, SentinelError> {
        let prior = BetaPosterior::new(prior.a, prior.b)?;
        Ok(Self {
            base: alloc::vec![prior; node_count],
            tallies: alloc::vec![(0, 0); node_count],
            weights: alloc::vec![prior.weight(); node_count],
            window: 0,
        })
    }

    /// Rebuilds a state from stored posteriors; weights are recomputed.
    pub fn from_posteriors(posteriors: Vec<BetaPosterior>, window: u64) -> Result<Self, SentinelError> {
        for p in &posteriors {
            BetaPosterior::new(p.a, p.b)?;
        }
        let weights = posteriors.iter().map(BetaPosterior::weight).collect();
        let tallies = alloc::vec![(0, 0); posteriors.len()];
        Ok(Self { base: posteriors, tallies, weights, window })
    }

    pub fn node_count(&self) -> usize {
        self.base.len()
    }

    pub fn posterior(&self, node: usize) -> BetaPosterior {
        let (attack, benign) = self.tallies[node];
        let base = self.base[node];
        BetaPosterior { a: base.a + attack as f64, b: base.b + benign as f64 }
    }

    pub fn posteriors(&self) -> Vec<BetaPosterior> {
        (0..self.node_count()).map(|n| self.posterior(n)).collect()
    }

    /// Security weight per node id, each in 1..=200.
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    /// Conjugate update of one node. The state is untouched on error.
    pub fn update_posterior(&mut self, node: usize, attack: u64, total: u64) -> Result<(), SentinelError> {
        if node >= self.node_count() {
            return Err(SentinelError::NodeOutOfRange { node, node_count: self.node_count() });
        }
        if attack > total {
            return Err(SentinelError::CountMismatch { attack, total });
        }
        let t = &mut self.tallies[node];
        t.0 += attack;
        t.1 += total - attack;
        self.weights[node] = self.posterior(node).weight();
        Ok(())
    }

    /// Folds one observation window (`(attack, total)` per node) into a new
    /// state. Either every node is updated or an error is returned and `self`
    /// remains the current state.
    pub fn observe_window(&self, counts: &[(u64, u64)]) -> Result<SecurityState, SentinelError> {
        if counts.len() != self.node_count() {
            return Err(SentinelError::NodeOutOfRange { node: counts.len(), node_count: self.node_count() });
        }
        let mut next = self.clone();
        for (node, &(attack, total)) in counts.iter().enumerate() {
            next.update_posterior(node, attack, total)?;
        }
        next.window += 1;
        Ok(next)
    }
}
