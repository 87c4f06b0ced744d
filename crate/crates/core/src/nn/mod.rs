//! Small neural-network substrate with explicit gradients.
//!
//! Everything is `f64`. Layers record what their backward rule needs on a
//! [`Tape`]; there is no general autodiff. [`finite_difference_check`]
//! verifies any model built from these pieces against central differences.

mod adam;
mod adjacency;
mod classifier;
mod gradcheck;
mod layers;
mod loss;
mod matrix;
mod params;
mod tape;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use adjacency::NormalizedAdjacency;
pub use classifier::{GcnClassifier, GcnClassifierShape};
pub use gradcheck::{finite_difference_check, relative_error, GradCheckReport, FD_STEP};
pub use layers::{
    dense_backward, dense_forward, gcn_backward, gcn_layer_forward, mean_pool, mean_pool_backward,
    Activation,
};
pub use loss::{softmax, softmax_cross_entropy};
pub use matrix::Matrix;
pub use params::{xavier_uniform, Param, ParamId, ParameterSet};
pub use tape::Tape;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnError {
    #[error("{op}: incompatible shapes {lhs:?} and {rhs:?}")]
    Shape { op: &'static str, lhs: (usize, usize), rhs: (usize, usize) },
    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite value")]
    NonFinite,
    #[error("duplicate parameter name `{0}`")]
    DuplicateParam(String),
    #[error("no recorded forward pass")]
    NoForwardPass,
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("optimizer state does not match the parameter set")]
    OptimizerMismatch,
}

impl NnError {
    pub(crate) fn shape(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Self {
        Self::Shape { op, lhs, rhs }
    }
}
