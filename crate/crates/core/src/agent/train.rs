use alloc::rc::Rc;
use alloc::vec::Vec;

use rand::Rng;

use super::model::{ActionFeatures, QModel, QModelShape, Sample, StateInput};
use super::replay::ReplayBuffer;
use super::{epsilon_at, AgentConfig, AgentError, EpisodeLog};
use crate::netmodel::{compute_reward, ActionSpace, Topology};
use crate::nn::{adam_step, AdamConfig, AdamState, Matrix, NormalizedAdjacency, ParameterSet};
use crate::sentinel::SecurityState;
use crate::{seeded_rng, SimRng};

/// Supplies the security state observed at the start of each episode.
pub trait StateProvider {
    fn state(&mut self, episode: usize) -> Result<&SecurityState, AgentError>;
}

/// A fixed state, observed in every episode.
impl StateProvider for SecurityState {
    fn state(&mut self, _episode: usize) -> Result<&SecurityState, AgentError> {
        Ok(self)
    }
}

/// Millisecond time source for episode durations.
pub trait Clock {
    fn now_millis(&mut self) -> f64;
}

/// Reports zero for every duration.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_millis(&mut self) -> f64 {
        0.0
    }
}

/// Topology, action space, and the quantities derived from them once.
#[derive(Debug, Clone)]
pub struct Environment {
    topology: Topology,
    actions: ActionSpace,
    adjacency: NormalizedAdjacency,
    features: ActionFeatures,
}

impl Environment {
    pub fn new(topology: Topology, actions: ActionSpace) -> Result<Self, AgentError> {
        if actions.is_empty() {
            return Err(AgentError::EmptyActionSpace);
        }
        let adjacency = NormalizedAdjacency::from_topology(&topology);
        let features = ActionFeatures::new(&topology, &actions);
        Ok(Self { topology, actions, adjacency, features })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn actions(&self) -> &ActionSpace {
        &self.actions
    }

    pub fn adjacency(&self) -> &NormalizedAdjacency {
        &self.adjacency
    }

    pub fn action_features(&self) -> &ActionFeatures {
        &self.features
    }

    pub fn model_shape(&self, config: &AgentConfig) -> QModelShape {
        QModelShape { nodes: self.topology.node_count(), embed: config.embed_width, hidden: config.hidden_width }
    }

    /// Reward of `action` under `weights`.
    pub fn reward(&self, weights: &[u32], action: usize, config: &AgentConfig) -> f64 {
        let (p1, p2) = self.actions.paths(action);
        compute_reward(&self.topology, weights, p1, p2, config.reward_spec())
    }
}

/// Epsilon-greedy choice. Returns the action and whether it was greedy.
///
/// Q-values are only evaluated when the greedy branch is taken; ties go to
/// the lowest action index.
pub fn select_action<R: Rng + ?Sized>(
    model: &QModel,
    embedding: &Matrix,
    actions: &ActionFeatures,
    epsilon: f64,
    rng: &mut R,
) -> Result<(usize, bool), AgentError> {
    if actions.is_empty() {
        return Err(AgentError::EmptyActionSpace);
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(AgentError::Epsilon(epsilon));
    }
    let u: f64 = rng.gen();
    if u < epsilon {
        return Ok((rng.gen_range(0..actions.len()), false));
    }
    Ok((argmax(&model.q_values(embedding, actions)?), true))
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy action for `state` and its reward under the state's weights.
pub fn evaluate_greedy(
    model: &QModel,
    env: &Environment,
    state: &SecurityState,
    config: &AgentConfig,
) -> Result<(usize, f64), AgentError> {
    let input = StateInput::new(&env.adjacency, &env.topology, state, model.attack_aware())?;
    let q = model.q_values(&model.embed(&input)?, &env.features)?;
    let action = argmax(&q);
    Ok((action, env.reward(state.weights(), action, config)))
}

/// A stored experience. Single-step episodes are always terminal.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: Rc<StateInput>,
    pub action: usize,
    /// Reward the agent trains on (cost-only for the baseline).
    pub reward: f64,
}

/// Online and target networks, optimizer, replay memory and RNG of one
/// training run.
#[derive(Debug, Clone)]
pub struct Agent {
    config: AgentConfig,
    model: QModel,
    target: ParameterSet,
    optimizer: AdamState,
    buffer: ReplayBuffer<Transition>,
    rng: SimRng,
    episodes: usize,
    updates: usize,
    last_input: Option<Rc<StateInput>>,
}

impl Agent {
    pub fn new(env: &Environment, config: AgentConfig) -> Result<Self, AgentError> {
        config.validate()?;
        let mut rng = seeded_rng(config.seed);
        let model = QModel::new(env.model_shape(&config), config.attack_aware, &mut rng);
        let optimizer = AdamState::new(model.params(), AdamConfig::with_learning_rate(config.learning_rate));
        Ok(Self {
            target: model.params().clone(),
            buffer: ReplayBuffer::new(config.replay_capacity),
            config,
            model,
            optimizer,
            rng,
            episodes: 0,
            updates: 0,
            last_input: None,
        })
    }

    pub fn model(&self) -> &QModel {
        &self.model
    }

    pub fn into_model(self) -> QModel {
        self.model
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    /// Target-network parameters as of the last sync.
    pub fn target_params(&self) -> &ParameterSet {
        &self.target
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    /// Optimizer steps taken so far.
    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn buffer(&self) -> &ReplayBuffer<Transition> {
        &self.buffer
    }

    /// Runs one episode and, once the buffer holds a full batch, one update.
    pub fn run_episode<P, C>(&mut self, env: &Environment, provider: &mut P, clock: &mut C) -> Result<EpisodeLog, AgentError>
    where
        P: StateProvider + ?Sized,
        C: Clock + ?Sized,
    {
        if self.model.shape().nodes != env.topology.node_count() {
            return Err(AgentError::ModelSize { expected: self.model.shape().nodes, got: env.topology.node_count() });
        }
        let start = clock.now_millis();
        let episode = self.episodes;
        let state = provider.state(episode)?;
        let input = self.observe(env, state)?;
        let epsilon = epsilon_at(&self.config, episode);

        let embedding = self.model.embed(&input)?;
        let (action, greedy) = select_action(&self.model, &embedding, &env.features, epsilon, &mut self.rng)?;

        let weights = state.weights();
        let reward = env.reward(weights, action, &self.config);
        let train_reward = if self.config.attack_aware {
            reward
        } else {
            let zeros = alloc::vec![0u32; weights.len()];
            env.reward(&zeros, action, &self.config)
        };
        self.buffer.push(Transition { state: input, action, reward: train_reward });
        if self.buffer.len() >= self.config.batch_size {
            self.update(env)?;
        }
        self.episodes += 1;
        let millis = clock.now_millis() - start;
        Ok(EpisodeLog { episode, epsilon, action, reward, greedy, millis })
    }

    /// Encoder input for `state`, shared with the previous episode when the
    /// features are unchanged so replayed samples group by state.
    fn observe(&mut self, env: &Environment, state: &SecurityState) -> Result<Rc<StateInput>, AgentError> {
        if state.node_count() != env.topology.node_count() {
            return Err(AgentError::StateSize { expected: env.topology.node_count(), got: state.node_count() });
        }
        let features = super::node_features(&env.topology, state.weights(), self.config.attack_aware);
        if let Some(last) = &self.last_input {
            if last.features == features {
                return Ok(Rc::clone(last));
            }
        }
        let aggregated = env.adjacency.apply(&features)?;
        let input = Rc::new(StateInput { features, aggregated });
        self.last_input = Some(Rc::clone(&input));
        Ok(input)
    }

    fn update(&mut self, env: &Environment) -> Result<(), AgentError> {
        let batch = self.buffer.sample(&mut self.rng, self.config.batch_size);
        let scale = self.config.reward_scale;
        // Terminal transitions: the target is the reward itself and the
        // target network is never consulted.
        let samples: Vec<Sample<'_>> = batch
            .iter()
            .map(|t| Sample { state: &t.state, action: env.features.row(t.action), target: t.reward / scale })
            .collect();
        self.model.params_mut().zero_grads();
        self.model.accumulate_gradients(&samples)?;
        adam_step(self.model.params_mut(), &mut self.optimizer)?;
        self.updates += 1;
        if self.updates % self.config.target_sync == 0 {
            self.target.copy_values_from(self.model.params())?;
        }
        Ok(())
    }
}

/// Trains a fresh agent for `episodes` episodes without timing.
pub fn train<P: StateProvider + ?Sized>(
    env: &Environment,
    provider: &mut P,
    config: &AgentConfig,
    episodes: usize,
) -> Result<(QModel, Vec<EpisodeLog>), AgentError> {
    train_with_clock(env, provider, config, episodes, &mut NoClock)
}

pub fn train_with_clock<P, C>(
    env: &Environment,
    provider: &mut P,
    config: &AgentConfig,
    episodes: usize,
    clock: &mut C,
) -> Result<(QModel, Vec<EpisodeLog>), AgentError>
where
    P: StateProvider + ?Sized,
    C: Clock + ?Sized,
{
    if episodes == 0 {
        return Err(AgentError::Config("episodes must be at least 1"));
    }
    let mut agent = Agent::new(env, config.clone())?;
    let mut logs = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        logs.push(agent.run_episode(env, provider, clock)?);
    }
    Ok((agent.into_model(), logs))
}
