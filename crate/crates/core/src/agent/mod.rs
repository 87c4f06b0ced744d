//! DQN routing agent.
//!
//! Every episode is a single decision: observe the security state, pick a
//! path pair, receive the terminal reward. The Q-network scores
//! `(state, action)` pairs: a one-layer GCN over the topology with node
//! features `[c/200, w/200]` is mean-pooled into a state embedding, which is
//! concatenated with a fixed per-action feature vector and fed to a two-layer
//! dense head.
//!
//! In baseline mode (`attack_aware = false`) the `w` channel is zeroed and
//! the agent learns from the cost-only reward, while its logged rewards are
//! still computed under the real security weights.

mod model;
mod replay;
mod train;

pub use model::{encode_state, node_features, ActionFeatures, QModel, QModelShape, Sample, StateInput};
pub use replay::ReplayBuffer;
pub use train::{
    evaluate_greedy, select_action, train, train_with_clock, Agent, Clock, Environment, NoClock, StateProvider,
    Transition,
};

use crate::netmodel::{NetError, RewardSpec, DEFAULT_ALPHA};
use crate::nn::NnError;
use crate::sentinel::SentinelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("invalid agent configuration: {0}")]
    Config(&'static str),
    #[error("action space is empty")]
    EmptyActionSpace,
    #[error("epsilon {0} outside [0, 1]")]
    Epsilon(f64),
    #[error("security state covers {got} nodes, topology has {expected}")]
    StateSize { expected: usize, got: usize },
    #[error("model was built for {expected} nodes, environment has {got}")]
    ModelSize { expected: usize, got: usize },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sentinel(#[from] SentinelError),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AgentConfig {
    pub learning_rate: f64,
    /// Discount factor. Episodes are single-step, so targets never use it.
    pub gamma: f64,
    pub epsilon_start: f64,
    /// Multiplicative decay per episode.
    pub epsilon_decay: f64,
    pub epsilon_floor: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Optimizer updates between target-network copies.
    pub target_sync: usize,
    pub attack_aware: bool,
    pub alpha: f64,
    pub seed: u64,
    /// State-embedding width (GCN output columns).
    pub embed_width: usize,
    /// Hidden width of the scoring head.
    pub hidden_width: usize,
    /// The network regresses `reward / reward_scale`.
    pub reward_scale: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_decay: 0.995,
            epsilon_floor: 0.01,
            replay_capacity: 10_000,
            batch_size: 32,
            target_sync: 100,
            attack_aware: true,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            embed_width: 16,
            hidden_width: 64,
            reward_scale: 1000.0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.learning_rate) {
            return Err(AgentError::Config("learning_rate must be positive"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(AgentError::Config("gamma must lie in [0, 1]"));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay < 1.0) {
            return Err(AgentError::Config("epsilon_decay must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.epsilon_start)
            || !(0.0..=1.0).contains(&self.epsilon_floor)
            || self.epsilon_floor > self.epsilon_start
        {
            return Err(AgentError::Config("need 0 <= epsilon_floor <= epsilon_start <= 1"));
        }
        if self.batch_size == 0 || self.replay_capacity < self.batch_size {
            return Err(AgentError::Config("need 1 <= batch_size <= replay_capacity"));
        }
        if self.target_sync == 0 {
            return Err(AgentError::Config("target_sync must be at least 1"));
        }
        if self.embed_width == 0 || self.hidden_width == 0 {
            return Err(AgentError::Config("layer widths must be at least 1"));
        }
        if !positive(self.reward_scale) {
            return Err(AgentError::Config("reward_scale must be positive"));
        }
        RewardSpec::new(self.alpha)?;
        Ok(())
    }

    pub fn reward_spec(&self) -> RewardSpec {
        RewardSpec { alpha: self.alpha }
    }
}

/// `max(floor, start · decay^episode)`.
pub fn epsilon_at(config: &AgentConfig, episode: usize) -> f64 {
    let decayed = config.epsilon_start * libm::pow(config.epsilon_decay, episode as f64);
    decayed.max(config.epsilon_floor)
}

/// One training episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub episode: usize,
    pub epsilon: f64,
    pub action: usize,
    /// Reward under the real security weights, also for the baseline.
    pub reward: f64,
    /// Whether the action came from the argmax rather than exploration.
    pub greedy: bool,
    /// Wall-clock duration as reported by the training [`Clock`].
    pub millis: f64,
}
