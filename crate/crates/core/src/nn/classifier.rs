use rand::Rng;

use super::{xavier_uniform, Activation, Matrix, NnError, NormalizedAdjacency, ParamId, ParameterSet, Tape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcnClassifierShape {
    pub input: usize,
    pub hidden: usize,
    pub classes: usize,
}

/// Graph classifier: GCN(relu) → GCN(relu) → mean-pool → dense → logits.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnClassifier {
    shape: GcnClassifierShape,
    params: ParameterSet,
    gcn1: ParamId,
    gcn2: ParamId,
    head_w: ParamId,
    head_b: ParamId,
}

const NAMES: [&str; 4] = ["gcn1.weight", "gcn2.weight", "head.weight", "head.bias"];

impl GcnClassifier {
    /// Glorot-uniform weights, zero bias.
    pub fn new<R: Rng + ?Sized>(shape: GcnClassifierShape, rng: &mut R) -> Self {
        let GcnClassifierShape { input, hidden, classes } = shape;
        Self::assemble(
            shape,
            [
                xavier_uniform(input, hidden, rng),
                xavier_uniform(hidden, hidden, rng),
                xavier_uniform(hidden, classes, rng),
                Matrix::zeros(1, classes),
            ],
        )
    }

    /// Every weight and bias zero; predicts the uniform distribution.
    pub fn zeroed(shape: GcnClassifierShape) -> Self {
        let GcnClassifierShape { input, hidden, classes } = shape;
        Self::assemble(
            shape,
            [
                Matrix::zeros(input, hidden),
                Matrix::zeros(hidden, hidden),
                Matrix::zeros(hidden, classes),
                Matrix::zeros(1, classes),
            ],
        )
    }

    /// Rebuilds a classifier from stored parameters, checking names and shapes.
    pub fn from_params(params: ParameterSet) -> Result<Self, NnError> {
        let mut mats = [Matrix::zeros(0, 0), Matrix::zeros(0, 0), Matrix::zeros(0, 0), Matrix::zeros(0, 0)];
        for (slot, name) in mats.iter_mut().zip(NAMES) {
            let id = params.find(name).ok_or(NnError::OptimizerMismatch)?;
            *slot = params.value(id).clone();
        }
        let shape = GcnClassifierShape { input: mats[0].rows(), hidden: mats[0].cols(), classes: mats[2].cols() };
        let expected = [
            (shape.input, shape.hidden),
            (shape.hidden, shape.hidden),
            (shape.hidden, shape.classes),
            (1, shape.classes),
        ];
        for (m, e) in mats.iter().zip(expected) {
            if m.shape() != e {
                return Err(NnError::shape("classifier parameters", e, m.shape()));
            }
        }
        Ok(Self::assemble(shape, mats))
    }

    fn assemble(shape: GcnClassifierShape, mats: [Matrix; 4]) -> Self {
        let mut params = ParameterSet::new();
        let [a, b, c, d] = mats;
        let gcn1 = params.add(NAMES[0], a).expect("unique");
        let gcn2 = params.add(NAMES[1], b).expect("unique");
        let head_w = params.add(NAMES[2], c).expect("unique");
        let head_b = params.add(NAMES[3], d).expect("unique");
        Self { shape, params, gcn1, gcn2, head_w, head_b }
    }

    pub fn shape(&self) -> GcnClassifierShape {
        self.shape
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParameterSet {
        &mut self.params
    }

    /// Runs the network and keeps the tape for [`GcnClassifier::backward`].
    /// The tape's output is the `1 × classes` logit row.
    pub fn forward<'a>(&self, adj: &'a NormalizedAdjacency, features: &Matrix) -> Result<Tape<'a>, NnError> {
        Self::forward_with(&self.params, [self.gcn1, self.gcn2, self.head_w, self.head_b], adj, features)
    }

    fn forward_with<'a>(
        params: &ParameterSet,
        [gcn1, gcn2, head_w, head_b]: [ParamId; 4],
        adj: &'a NormalizedAdjacency,
        features: &Matrix,
    ) -> Result<Tape<'a>, NnError> {
        let mut tape = Tape::new(features.clone());
        tape.gcn(params, gcn1, adj, Activation::Relu)?;
        tape.gcn(params, gcn2, adj, Activation::Relu)?;
        tape.mean_pool();
        tape.dense(params, head_w, head_b, Activation::Identity)?;
        Ok(tape)
    }

    /// Logits computed against an arbitrary parameter set of the same layout;
    /// used by finite-difference checks.
    pub fn logits_with(
        &self,
        params: &ParameterSet,
        adj: &NormalizedAdjacency,
        features: &Matrix,
    ) -> Result<Matrix, NnError> {
        let tape = Self::forward_with(params, [self.gcn1, self.gcn2, self.head_w, self.head_b], adj, features)?;
        Ok(tape.output().clone())
    }

    pub fn logits(&self, adj: &NormalizedAdjacency, features: &Matrix) -> Result<Matrix, NnError> {
        self.logits_with(&self.params, adj, features)
    }

    /// Accumulates parameter gradients for upstream `grad_logits`.
    pub fn backward(&mut self, tape: &Tape<'_>, grad_logits: &Matrix) -> Result<(), NnError> {
        tape.backward(grad_logits, &mut self.params).map(|_| ())
    }
}
