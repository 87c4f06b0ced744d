use alloc::vec::Vec;

use super::layers::{dense_backward, gcn_backward, gcn_forward_parts, mean_pool, mean_pool_backward};
use super::{dense_forward, Activation, Matrix, NnError, NormalizedAdjacency, ParamId, ParameterSet};

enum Step<'a> {
    Gcn {
        adj: &'a NormalizedAdjacency,
        weight: ParamId,
        activation: Activation,
        aggregated: Matrix,
    },
    Dense {
        weight: ParamId,
        bias: ParamId,
        activation: Activation,
    },
    MeanPool,
    /// Constant columns appended on the right; they receive no gradient.
    Concat {
        width: usize,
    },
}

/// Record of a chain of layers, each consuming the previous output.
///
/// The tape keeps every intermediate output so [`Tape::backward`] can apply
/// the per-layer rules in reverse and accumulate parameter gradients.
pub struct Tape<'a> {
    input: Matrix,
    steps: Vec<Step<'a>>,
    outputs: Vec<Matrix>,
}

impl<'a> Tape<'a> {
    pub fn new(input: Matrix) -> Self {
        Self { input, steps: Vec::new(), outputs: Vec::new() }
    }

    /// Output of the last recorded step, or the input if nothing ran yet.
    pub fn output(&self) -> &Matrix {
        self.outputs.last().unwrap_or(&self.input)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn gcn(
        &mut self,
        params: &ParameterSet,
        weight: ParamId,
        adj: &'a NormalizedAdjacency,
        activation: Activation,
    ) -> Result<&Matrix, NnError> {
        let (aggregated, out) = gcn_forward_parts(adj, self.output(), params.value(weight), activation)?;
        self.push(Step::Gcn { adj, weight, activation, aggregated }, out)
    }

    pub fn dense(
        &mut self,
        params: &ParameterSet,
        weight: ParamId,
        bias: ParamId,
        activation: Activation,
    ) -> Result<&Matrix, NnError> {
        let out = dense_forward(self.output(), params.value(weight), params.value(bias), activation)?;
        self.push(Step::Dense { weight, bias, activation }, out)
    }

    pub fn mean_pool(&mut self) -> &Matrix {
        let out = mean_pool(self.output());
        self.push(Step::MeanPool, out).expect("pooling cannot fail")
    }

    pub fn concat(&mut self, extra: &Matrix) -> Result<&Matrix, NnError> {
        let out = self.output().hconcat(extra)?;
        self.push(Step::Concat { width: extra.cols() }, out)
    }

    fn push(&mut self, step: Step<'a>, out: Matrix) -> Result<&Matrix, NnError> {
        self.steps.push(step);
        self.outputs.push(out);
        Ok(self.outputs.last().expect("just pushed"))
    }

    /// Back-propagates `grad_out` (gradient of the loss with respect to the
    /// final output) and adds each parameter's gradient into `params`.
    /// Returns the gradient with respect to the tape's input.
    pub fn backward(&self, grad_out: &Matrix, params: &mut ParameterSet) -> Result<Matrix, NnError> {
        if self.steps.is_empty() {
            return Err(NnError::NoForwardPass);
        }
        if grad_out.shape() != self.output().shape() {
            return Err(NnError::shape("backward", self.output().shape(), grad_out.shape()));
        }
        let mut grad = grad_out.clone();
        for (k, step) in self.steps.iter().enumerate().rev() {
            let input = if k == 0 { &self.input } else { &self.outputs[k - 1] };
            let output = &self.outputs[k];
            grad = match step {
                Step::Gcn { adj, weight, activation, aggregated } => {
                    let (value, grad_buf) = params.value_and_grad_mut(*weight);
                    let (g_in, g_w) = gcn_backward(adj, value, aggregated, output, *activation, &grad)?;
                    grad_buf.add_assign(&g_w)?;
                    g_in
                }
                Step::Dense { weight, bias, activation } => {
                    let (value, grad_buf) = params.value_and_grad_mut(*weight);
                    let (g_in, g_w, g_b) = dense_backward(input, value, output, *activation, &grad)?;
                    grad_buf.add_assign(&g_w)?;
                    params.grad_mut(*bias).add_assign(&g_b)?;
                    g_in
                }
                Step::MeanPool => mean_pool_backward(&grad, input.rows()),
                Step::Concat { width } => grad.columns(0, grad.cols() - width),
            };
        }
        Ok(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tape_has_no_forward_pass() {
        let mut params = ParameterSet::new();
        let tape = Tape::new(Matrix::zeros(1, 1));
        assert_eq!(tape.backward(&Matrix::zeros(1, 1), &mut params), Err(NnError::NoForwardPass));
    }

    #[test]
    fn concat_passes_through_leading_columns() {
        let mut params = ParameterSet::new();
        let w = params.add("w", Matrix::from_rows(&[[1.0], [2.0], [3.0]])).unwrap();
        let b = params.add("b", Matrix::zeros(1, 1)).unwrap();
        let mut tape = Tape::new(Matrix::from_rows(&[[1.0, 1.0]]));
        tape.concat(&Matrix::from_rows(&[[5.0]])).unwrap();
        tape.dense(&params, w, b, Activation::Identity).unwrap();
        assert_eq!(tape.output(), &Matrix::from_rows(&[[18.0]]));
        let g_in = tape.backward(&Matrix::from_rows(&[[1.0]]), &mut params).unwrap();
        assert_eq!(g_in, Matrix::from_rows(&[[1.0, 2.0]]));
        assert_eq!(params.grad(w), &Matrix::from_rows(&[[1.0], [1.0], [5.0]]));
    }
}
