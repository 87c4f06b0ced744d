use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::{Matrix, NnError};

/// Handle into a [`ParameterSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: Matrix,
    pub grad: Matrix,
}

/// Named parameters, each with a gradient buffer of the same shape.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParameterSet {
    params: Vec<Param>,
}

impl ParameterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Matrix) -> Result<ParamId, NnError> {
        let name = name.into();
        if self.find(&name).is_some() {
            return Err(NnError::DuplicateParam(name));
        }
        let grad = Matrix::zeros(value.rows(), value.cols());
        self.params.push(Param { name, value, grad });
        Ok(ParamId(self.params.len() - 1))
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p.name == name).map(ParamId)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.params.iter().map(|p| p.value.data().len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Param> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Param> {
        self.params.iter_mut()
    }

    pub fn value(&self, id: ParamId) -> &Matrix {
        &self.params[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Matrix {
        &mut self.params[id.0].value
    }

    pub fn grad(&self, id: ParamId) -> &Matrix {
        &self.params[id.0].grad
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut Matrix {
        &mut self.params[id.0].grad
    }

    pub(crate) fn value_and_grad_mut(&mut self, id: ParamId) -> (&Matrix, &mut Matrix) {
        let p = &mut self.params[id.0];
        (&p.value, &mut p.grad)
    }

    pub fn zero_grads(&mut self) {
        for p in &mut self.params {
            p.grad.fill(0.0);
        }
    }

    pub fn scale_grads(&mut self, factor: f64) {
        for p in &mut self.params {
            p.grad.scale(factor);
        }
    }

    /// Overwrites every value with the matching value of `other`.
    pub fn copy_values_from(&mut self, other: &ParameterSet) -> Result<(), NnError> {
        if !self.same_layout(other) {
            return Err(NnError::OptimizerMismatch);
        }
        for (p, q) in self.params.iter_mut().zip(&other.params) {
            p.value.clone_from(&q.value);
        }
        Ok(())
    }

    /// Same names and shapes, in the same order.
    pub fn same_layout(&self, other: &ParameterSet) -> bool {
        self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(p, q)| p.name == q.name && p.value.shape() == q.value.shape())
    }
}

/// Uniform draw in `±sqrt(6 / (fan_in + fan_out))` for a `fan_in × fan_out` weight.
pub fn xavier_uniform<R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Matrix {
    let bound = libm::sqrt(6.0 / (fan_in + fan_out).max(1) as f64);
    let data = (0..fan_in * fan_out).map(|_| rng.gen_range(-bound..=bound)).collect();
    Matrix::new(fan_in, fan_out, data).expect("finite draws")
}
