//! Two-layer GCN packet classifier and per-node attack tallies.

use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;

use crate::nn::{
    adam_step, softmax, softmax_cross_entropy, AdamConfig, AdamState, GcnClassifier, GcnClassifierShape, Matrix,
    NnError, NormalizedAdjacency,
};
use crate::seeded_rng;
use crate::traffic::{packet_to_graph, ClassId, ClassSet, PacketGraph, TrafficRecord};

/// Node features produced by [`packet_to_graph`].
pub const INPUT_FEATURES: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectorError {
    #[error("no training records")]
    Empty,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("label {0} outside the configured class set")]
    LabelOutOfRange(usize),
    #[error("record for node {node} but the topology has {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("invalid detector config: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DetectorConfig {
    pub hidden: usize,
    pub classes: ClassSet,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub weight_decay: f64,
    pub epochs: usize,
    /// Epochs in which neither validation accuracy nor validation loss
    /// improved before training stops.
    pub patience: usize,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            classes: ClassSet::default(),
            learning_rate: 0.005,
            batch_size: 128,
            weight_decay: 0.0,
            epochs: 20,
            patience: 3,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectorError> {
        if self.hidden == 0 {
            return Err(DetectorError::Config("hidden width must be >= 1"));
        }
        if self.classes.len() < 2 {
            return Err(DetectorError::Config("need at least two classes"));
        }
        if self.batch_size == 0 {
            return Err(DetectorError::Config("batch size must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(DetectorError::Config("validation fraction must be in [0, 1)"));
        }
        if !(self.learning_rate > 0.0) || !(self.weight_decay >= 0.0) {
            return Err(DetectorError::Config("learning rate must be > 0 and weight decay >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Mean training cross-entropy over the epoch.
    pub loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    pub network: GcnClassifier,
    pub classes: ClassSet,
    pub seed: u64,
    /// Epochs actually run (early stopping may cut the budget short).
    pub epochs_run: usize,
}

impl DetectorModel {
    pub fn new(config: &DetectorConfig) -> Self {
        let shape = GcnClassifierShape { input: INPUT_FEATURES, hidden: config.hidden, classes: config.classes.len() };
        Self {
            network: GcnClassifier::new(shape, &mut seeded_rng(config.seed)),
            classes: config.classes.clone(),
            seed: config.seed,
            epochs_run: 0,
        }
    }

    pub fn zeroed(config: &DetectorConfig) -> Self {
        let shape = GcnClassifierShape { input: INPUT_FEATURES, hidden: config.hidden, classes: config.classes.len() };
        Self { network: GcnClassifier::zeroed(shape), classes: config.classes.clone(), seed: config.seed, epochs_run: 0 }
    }
}

struct Prepared {
    adj: NormalizedAdjacency,
    features: Matrix,
    label: usize,
}

fn prepare(graph: &PacketGraph, label: usize) -> Prepared {
    Prepared { adj: graph.adjacency(), features: graph.features.clone(), label }
}

/// Mini-batch Adam training with a stratified, seeded validation split.
///
/// The returned model holds the parameters of the epoch with the best
/// validation accuracy, ties broken by validation loss (the initialization
/// if `epochs == 0`).
pub fn train_detector(
    records: &[TrafficRecord],
    config: &DetectorConfig,
) -> Result<(DetectorModel, Vec<EpochMetrics>), DetectorError> {
    config.validate()?;
    if records.is_empty() {
        return Err(DetectorError::Empty);
    }
    let classes = config.classes.len();
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); classes];
    for (i, r) in records.iter().enumerate() {
        by_class.get_mut(r.label.0).ok_or(DetectorError::LabelOutOfRange(r.label.0))?.push(i);
    }
    if by_class.iter().filter(|c| !c.is_empty()).count() < 2 {
        return Err(DetectorError::SingleClass);
    }

    let mut model = DetectorModel::new(config);
    let mut rng = seeded_rng(config.seed.wrapping_add(1));

    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    for members in &mut by_class {
        members.shuffle(&mut rng);
        let n_val = libm::round(members.len() as f64 * config.validation_fraction) as usize;
        val_idx.extend_from_slice(&members[..n_val]);
        train_idx.extend_from_slice(&members[n_val..]);
    }
    train_idx.sort_unstable();
    val_idx.sort_unstable();
    let graphs: Vec<Prepared> = records.iter().map(|r| prepare(&packet_to_graph(r), r.label.0)).collect();
    if val_idx.is_empty() {
        val_idx = train_idx.clone();
    }

    let adam = AdamConfig {
        learning_rate: config.learning_rate,
        weight_decay: config.weight_decay,
        ..AdamConfig::default()
    };
    let mut opt = AdamState::new(model.network.params(), adam);
    let mut metrics = Vec::new();
    let mut best_net = model.network.clone();
    let mut best_accuracy = f64::NEG_INFINITY;
    let mut best_loss = f64::INFINITY;
    let mut stale = 0;

    for epoch in 0..config.epochs {
        train_idx.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in train_idx.chunks(config.batch_size) {
            model.network.params_mut().zero_grads();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let g = &graphs[i];
                let tape = model.network.forward(&g.adj, &g.features)?;
                let (loss, mut grad) = softmax_cross_entropy(tape.output(), &[g.label])?;
                loss_sum += loss;
                grad.scale(scale);
                model.network.backward(&tape, &grad)?;
            }
            adam_step(model.network.params_mut(), &mut opt)?;
        }
        let (val_accuracy, val_loss) = evaluate(&model.network, &graphs, &val_idx)?;
        metrics.push(EpochMetrics { epoch, loss: loss_sum / train_idx.len() as f64, val_accuracy });
        model.epochs_run = epoch + 1;
        // A plateau means neither validation accuracy nor validation loss improved.
        let better_accuracy = val_accuracy > best_accuracy;
        let better_loss = val_loss < best_loss;
        if better_accuracy || (val_accuracy == best_accuracy && better_loss) {
            best_net = model.network.clone();
        }
        if better_accuracy || better_loss {
            stale = 0;
        } else {
            stale += 1;
        }
        best_accuracy = best_accuracy.max(val_accuracy);
        best_loss = best_loss.min(val_loss);
        if stale >= config.patience {
            break;
        }
    }
    if !metrics.is_empty() {
        model.network = best_net;
    }
    Ok((model, metrics))
}

/// Accuracy and mean cross-entropy over `idx`.
fn evaluate(net: &GcnClassifier, graphs: &[Prepared], idx: &[usize]) -> Result<(f64, f64), NnError> {
    let mut correct = 0usize;
    let mut loss = 0.0;
    for &i in idx {
        let g = &graphs[i];
        let logits = net.logits(&g.adj, &g.features)?;
        if argmax(logits.data()) == g.label {
            correct += 1;
        }
        loss += softmax_cross_entropy(&logits, &[g.label])?.0;
    }
    let n = idx.len().max(1) as f64;
    Ok((correct as f64 / n, loss / n))
}

/// Index of the largest value; the lowest index wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Class probabilities for one packet graph.
pub fn classify(model: &DetectorModel, graph: &PacketGraph) -> Result<Vec<f64>, DetectorError> {
    let logits = model.network.logits(&graph.adjacency(), &graph.features)?;
    Ok(softmax(&logits).into_data())
}

/// Most probable class for one packet graph.
pub fn predict(model: &DetectorModel, graph: &PacketGraph) -> Result<ClassId, DetectorError> {
    Ok(ClassId(argmax(&classify(model, graph)?)))
}

/// Per-node `(attack_count, total_count)` over records with timestamps in
/// `window`. A packet counts as an attack when its predicted class is not
/// the benign class.
pub fn node_attack_ratio(
    model: &DetectorModel,
    records: &[TrafficRecord],
    window: Range<u64>,
    node_count: usize,
) -> Result<Vec<(u64, u64)>, DetectorError> {
    let mut counts = alloc::vec![(0u64, 0u64); node_count];
    for r in records.iter().filter(|r| window.contains(&r.timestamp)) {
        let slot = counts
            .get_mut(r.node_id)
            .ok_or(DetectorError::NodeOutOfRange { node: r.node_id, node_count })?;
        slot.1 += 1;
        if model.classes.is_attack(predict(model, &packet_to_graph(r))?) {
            slot.0 += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{generate_dataset, ClassMix, PayloadBounds};
    use alloc::vec;

    fn small_config() -> DetectorConfig {
        DetectorConfig { hidden: 8, epochs: 3, seed: 4, ..Default::default() }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let recs = generate_dataset(30, ClassMix::BALANCED, PayloadBounds::default(), 1).unwrap();
        let cfg = DetectorConfig { epochs: 0, ..small_config() };
        let (model, metrics) = train_detector(&recs, &cfg).unwrap();
        assert!(metrics.is_empty());
        assert_eq!(model, DetectorModel::new(&cfg));
    }

    #[test]
    fn rejects_empty_and_single_class() {
        assert_eq!(train_detector(&[], &small_config()), Err(DetectorError::Empty));
        let recs = generate_dataset(10, ClassMix::BENIGN, PayloadBounds::default(), 1).unwrap();
        assert_eq!(train_detector(&recs, &small_config()), Err(DetectorError::SingleClass));
        let mut bad = recs.clone();
        bad[0].label = ClassId(7);
        assert_eq!(train_detector(&bad, &small_config()), Err(DetectorError::LabelOutOfRange(7)));
    }

    #[test]
    fn zero_model_is_uniform() {
        let model = DetectorModel::zeroed(&DetectorConfig::default());
        let rec = TrafficRecord::new(0, vec![1, 2, 3, 1], ClassSet::BENIGN, 0).unwrap();
        let p = classify(&model, &packet_to_graph(&rec)).unwrap();
        assert!(p.iter().all(|&v| v == 1.0 / 3.0));
        assert_eq!(predict(&model, &packet_to_graph(&rec)).unwrap(), ClassId(0));
    }

    #[test]
    fn empty_window_counts_nothing() {
        let model = DetectorModel::zeroed(&DetectorConfig::default());
        let recs = generate_dataset(5, ClassMix::BALANCED, PayloadBounds::default(), 2).unwrap();
        assert_eq!(node_attack_ratio(&model, &recs, 100..200, 3).unwrap(), vec![(0, 0); 3]);
        assert!(matches!(
            node_attack_ratio(&model, &recs, 0..10, 0),
            Err(DetectorError::NodeOutOfRange { node: 0, node_count: 0 })
        ));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }
}
