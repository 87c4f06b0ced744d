use alloc::vec::Vec;

use rand::Rng;

use super::AgentError;
use crate::netmodel::{overlap_count, ActionSpace, Topology, MAX_COST};
use crate::nn::{
    dense_backward, dense_forward, mean_pool, mean_pool_backward, xavier_uniform, Activation, Matrix,
    NormalizedAdjacency, ParamId, ParameterSet,
};
use crate::sentinel::{SecurityState, MAX_WEIGHT};

/// Node feature columns: communication cost and security weight.
const NODE_FEATURES: usize = 2;

const NAMES: [&str; 5] = ["encoder.weight", "head1.weight", "head1.bias", "head2.weight", "head2.bias"];

/// `[c/200, w/200]` per node; the `w` column is zero when not `attack_aware`.
pub fn node_features(topology: &Topology, weights: &[u32], attack_aware: bool) -> Matrix {
    let n = topology.node_count();
    let mut x = Matrix::zeros(n, NODE_FEATURES);
    for i in 0..n {
        x[(i, 0)] = f64::from(topology.cost(i)) / f64::from(MAX_COST);
        if attack_aware {
            x[(i, 1)] = f64::from(weights[i]) / f64::from(MAX_WEIGHT);
        }
    }
    x
}

/// Node features of one observed state and their normalized one-hop
/// aggregate `Â·X`, which is all the encoder needs.
#[derive(Debug, Clone, PartialEq)]
pub struct StateInput {
    pub features: Matrix,
    pub aggregated: Matrix,
}

impl StateInput {
    pub fn new(
        adj: &NormalizedAdjacency,
        topology: &Topology,
        state: &SecurityState,
        attack_aware: bool,
    ) -> Result<Self, AgentError> {
        if state.node_count() != topology.node_count() {
            return Err(AgentError::StateSize { expected: topology.node_count(), got: state.node_count() });
        }
        let features = node_features(topology, state.weights(), attack_aware);
        let aggregated = adj.apply(&features)?;
        Ok(Self { features, aggregated })
    }
}

/// Fixed per-action inputs: membership indicators of both paths over the
/// topology nodes, then `len1/N`, `len2/N` and `overlap/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionFeatures {
    matrix: Matrix,
}

impl ActionFeatures {
    pub fn width(node_count: usize) -> usize {
        2 * node_count + 3
    }

    pub fn new(topology: &Topology, space: &ActionSpace) -> Self {
        let n = topology.node_count();
        let nf = n as f64;
        let mut matrix = Matrix::zeros(space.len(), Self::width(n));
        for a in 0..space.len() {
            let (p1, p2) = space.paths(a);
            let row = matrix.row_mut(a);
            for &v in p1.nodes() {
                row[v] = 1.0;
            }
            for &v in p2.nodes() {
                row[n + v] = 1.0;
            }
            row[2 * n] = p1.len() as f64 / nf;
            row[2 * n + 1] = p2.len() as f64 / nf;
            row[2 * n + 2] = overlap_count(p1, p2) as f64 / nf;
        }
        Self { matrix }
    }

    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.rows() == 0
    }

    pub fn row(&self, action: usize) -> &[f64] {
        self.matrix.row(action)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QModelShape {
    pub nodes: usize,
    pub embed: usize,
    pub hidden: usize,
}

impl QModelShape {
    fn head_input(&self) -> usize {
        self.embed + ActionFeatures::width(self.nodes)
    }
}

/// One regression example: the state it was observed in, the action's
/// feature row and the target value.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub state: &'a StateInput,
    pub action: &'a [f64],
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QModel {
    shape: QModelShape,
    attack_aware: bool,
    params: ParameterSet,
    ids: [ParamId; 5],
}

struct BatchForward {
    /// Per distinct state: indices of its samples and `relu(Â·X·W)`.
    groups: Vec<(Vec<usize>, Matrix)>,
    input: Matrix,
    hidden: Matrix,
    q: Matrix,
}

impl QModel {
    /// Glorot-uniform weights, zero biases.
    pub fn new<R: Rng + ?Sized>(shape: QModelShape, attack_aware: bool, rng: &mut R) -> Self {
        let QModelShape { embed, hidden, .. } = shape;
        let mats = [
            xavier_uniform(NODE_FEATURES, embed, rng),
            xavier_uniform(shape.head_input(), hidden, rng),
            Matrix::zeros(1, hidden),
            xavier_uniform(hidden, 1, rng),
            Matrix::zeros(1, 1),
        ];
        Self::assemble(shape, attack_aware, mats)
    }

    /// All parameters zero: every Q-value equals the (zero) output bias.
    pub fn zeroed(shape: QModelShape, attack_aware: bool) -> Self {
        let QModelShape { embed, hidden, .. } = shape;
        let mats = [
            Matrix::zeros(NODE_FEATURES, embed),
            Matrix::zeros(shape.head_input(), hidden),
            Matrix::zeros(1, hidden),
            Matrix::zeros(hidden, 1),
            Matrix::zeros(1, 1),
        ];
        Self::assemble(shape, attack_aware, mats)
    }

    /// Rebuilds a model from stored parameters, checking names and shapes.
    pub fn from_params(params: ParameterSet, nodes: usize, attack_aware: bool) -> Result<Self, AgentError> {
        let get = |name: &str| -> Result<Matrix, AgentError> {
            let id = params.find(name).ok_or(AgentError::Config("missing Q-model parameter"))?;
            Ok(params.value(id).clone())
        };
        let mats = [get(NAMES[0])?, get(NAMES[1])?, get(NAMES[2])?, get(NAMES[3])?, get(NAMES[4])?];
        let shape = QModelShape { nodes, embed: mats[0].cols(), hidden: mats[1].cols() };
        let expected = [
            (NODE_FEATURES, shape.embed),
            (shape.head_input(), shape.hidden),
            (1, shape.hidden),
            (shape.hidden, 1),
            (1, 1),
        ];
        if mats.iter().zip(expected).any(|(m, e)| m.shape() != e) {
            return Err(AgentError::Config("Q-model parameter shapes do not match"));
        }
        Ok(Self::assemble(shape, attack_aware, mats))
    }

    fn assemble(shape: QModelShape, attack_aware: bool, mats: [Matrix; 5]) -> Self {
        let mut params = ParameterSet::new();
        let mut ids = [ParamId(0); 5];
        for (i, m) in mats.into_iter().enumerate() {
            ids[i] = params.add(NAMES[i], m).expect("unique names");
        }
        Self { shape, attack_aware, params, ids }
    }

    pub fn shape(&self) -> QModelShape {
        self.shape
    }

    pub fn attack_aware(&self) -> bool {
        self.attack_aware
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParameterSet {
        &mut self.params
    }

    fn value(&self, k: usize) -> &Matrix {
        self.params.value(self.ids[k])
    }

    /// Node embeddings `relu(Â·X·W)` of one state.
    fn node_embeddings(&self, state: &StateInput) -> Result<Matrix, AgentError> {
        let mut z = state.aggregated.matmul(self.value(0))?;
        Activation::Relu.apply(&mut z);
        Ok(z)
    }

    /// Mean-pooled state embedding, `1 × embed`.
    pub fn embed(&self, state: &StateInput) -> Result<Matrix, AgentError> {
        if state.features.rows() != self.shape.nodes {
            return Err(AgentError::ModelSize { expected: self.shape.nodes, got: state.features.rows() });
        }
        Ok(mean_pool(&self.node_embeddings(state)?))
    }

    /// Q for every action in `actions` given a state embedding.
    pub fn q_values(&self, embedding: &Matrix, actions: &ActionFeatures) -> Result<Vec<f64>, AgentError> {
        let e = self.shape.embed;
        let width = ActionFeatures::width(self.shape.nodes);
        if embedding.shape() != (1, e) {
            return Err(crate::nn::NnError::shape("q_values", (1, e), embedding.shape()).into());
        }
        if actions.matrix.cols() != width {
            return Err(AgentError::ModelSize { expected: self.shape.nodes, got: (actions.matrix.cols() - 3) / 2 });
        }
        let (w1, b1, w2, b2) = (self.value(1), self.value(2), self.value(3), self.value(4));
        let h = self.shape.hidden;
        // State part of the first layer is shared by every action.
        let mut base = b1.data().to_vec();
        for (k, &x) in embedding.data().iter().enumerate() {
            for (o, w) in base.iter_mut().zip(w1.row(k)) {
                *o += x * w;
            }
        }
        let mut pre = alloc::vec![0.0; h];
        let mut out = Vec::with_capacity(actions.len());
        for a in 0..actions.len() {
            pre.copy_from_slice(&base);
            for (k, &x) in actions.row(a).iter().enumerate() {
                if x != 0.0 {
                    for (o, w) in pre.iter_mut().zip(w1.row(e + k)) {
                        *o += x * w;
                    }
                }
            }
            let q: f64 = pre.iter().zip(w2.data()).map(|(&p, w)| p.max(0.0) * w).sum();
            out.push(q + b2.data()[0]);
        }
        Ok(out)
    }

    fn forward_batch(&self, samples: &[Sample<'_>]) -> Result<BatchForward, AgentError> {
        let e = self.shape.embed;
        let width = self.shape.head_input();
        let mut groups: Vec<(&StateInput, Vec<usize>, Matrix)> = Vec::new();
        for (i, s) in samples.iter().enumerate() {
            if s.action.len() != width - e {
                return Err(crate::nn::NnError::shape("q sample", (1, width - e), (1, s.action.len())).into());
            }
            match groups.iter_mut().find(|g| core::ptr::eq(g.0, s.state)) {
                Some(g) => g.1.push(i),
                None => {
                    if s.state.features.rows() != self.shape.nodes {
                        return Err(AgentError::ModelSize {
                            expected: self.shape.nodes,
                            got: s.state.features.rows(),
                        });
                    }
                    let z = self.node_embeddings(s.state)?;
                    groups.push((s.state, alloc::vec![i], z));
                }
            }
        }
        let mut input = Matrix::zeros(samples.len(), width);
        for (_, members, z) in &groups {
            let emb = mean_pool(z);
            for &i in members {
                let row = input.row_mut(i);
                row[..e].copy_from_slice(emb.data());
                row[e..].copy_from_slice(samples[i].action);
            }
        }
        let hidden = dense_forward(&input, self.value(1), self.value(2), Activation::Relu)?;
        let q = dense_forward(&hidden, self.value(3), self.value(4), Activation::Identity)?;
        Ok(BatchForward { groups: groups.into_iter().map(|(_, m, z)| (m, z)).collect(), input, hidden, q })
    }

    /// Q of each sample, batched.
    pub fn predict(&self, samples: &[Sample<'_>]) -> Result<Vec<f64>, AgentError> {
        Ok(self.forward_batch(samples)?.q.into_data())
    }

    /// `½·mean((q - target)²)` over `samples`.
    pub fn regression_loss(&self, samples: &[Sample<'_>]) -> Result<f64, AgentError> {
        let q = self.predict(samples)?;
        Ok(half_mse(&q, samples))
    }

    /// Adds the gradient of [`Self::regression_loss`] to the parameter
    /// gradients and returns the loss.
    pub fn accumulate_gradients(&mut self, samples: &[Sample<'_>]) -> Result<f64, AgentError> {
        if samples.is_empty() {
            return Ok(0.0);
        }
        let fwd = self.forward_batch(samples)?;
        let loss = half_mse(fwd.q.data(), samples);
        let b = samples.len() as f64;
        let mut grad_q = Matrix::zeros(samples.len(), 1);
        for (i, s) in samples.iter().enumerate() {
            grad_q[(i, 0)] = (fwd.q[(i, 0)] - s.target) / b;
        }
        let (grad_hidden, gw2, gb2) =
            dense_backward(&fwd.hidden, self.value(3), &fwd.q, Activation::Identity, &grad_q)?;
        let (grad_input, gw1, gb1) =
            dense_backward(&fwd.input, self.value(1), &fwd.hidden, Activation::Relu, &grad_hidden)?;
        let e = self.shape.embed;
        let mut gw0 = Matrix::zeros(NODE_FEATURES, e);
        for ((members, z), state) in fwd.groups.iter().zip(group_states(samples, &fwd.groups)) {
            let mut grad_emb = Matrix::zeros(1, e);
            for &i in members {
                for (g, v) in grad_emb.data_mut().iter_mut().zip(&grad_input.row(i)[..e]) {
                    *g += v;
                }
            }
            let mut grad_z = mean_pool_backward(&grad_emb, z.rows());
            Activation::Relu.backprop(z, &mut grad_z);
            gw0.add_assign(&state.aggregated.transpose_matmul(&grad_z)?)?;
        }
        for (k, g) in [gw0, gw1, gb1, gw2, gb2].iter().enumerate() {
            self.params.grad_mut(self.ids[k]).add_assign(g)?;
        }
        Ok(loss)
    }
}

fn group_states<'a>(samples: &[Sample<'a>], groups: &[(Vec<usize>, Matrix)]) -> Vec<&'a StateInput> {
    groups.iter().map(|(m, _)| samples[m[0]].state).collect()
}

fn half_mse(q: &[f64], samples: &[Sample<'_>]) -> f64 {
    let n = samples.len().max(1) as f64;
    q.iter().zip(samples).map(|(q, s)| 0.5 * (q - s.target) * (q - s.target)).sum::<f64>() / n
}

/// State embedding of `state` under `model`.
pub fn encode_state(
    model: &QModel,
    adj: &NormalizedAdjacency,
    topology: &Topology,
    state: &SecurityState,
) -> Result<Matrix, AgentError> {
    model.embed(&StateInput::new(adj, topology, state, model.attack_aware())?)
}
