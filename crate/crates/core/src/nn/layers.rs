use super::{Matrix, NnError, NormalizedAdjacency};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    pub(crate) fn apply(self, m: &mut Matrix) {
        if self == Activation::Relu {
            for v in m.data_mut() {
                *v = v.max(0.0);
            }
        }
    }

    /// Masks `grad` in place given the layer's activated output.
    pub(crate) fn backprop(self, output: &Matrix, grad: &mut Matrix) {
        if self == Activation::Relu {
            for (g, &o) in grad.data_mut().iter_mut().zip(output.data()) {
                if o <= 0.0 {
                    *g = 0.0;
                }
            }
        }
    }
}

/// `activation(Â · H · W)`.
pub fn gcn_layer_forward(
    adj: &NormalizedAdjacency,
    features: &Matrix,
    weights: &Matrix,
    activation: Activation,
) -> Result<Matrix, NnError> {
    Ok(gcn_forward_parts(adj, features, weights, activation)?.1)
}

/// Returns `(Â·H, activation(Â·H·W))`; the first is kept for the weight gradient.
pub(crate) fn gcn_forward_parts(
    adj: &NormalizedAdjacency,
    features: &Matrix,
    weights: &Matrix,
    activation: Activation,
) -> Result<(Matrix, Matrix), NnError> {
    if features.cols() != weights.rows() {
        return Err(NnError::shape("gcn", features.shape(), weights.shape()));
    }
    let aggregated = adj.apply(features)?;
    let mut out = aggregated.matmul(weights)?;
    activation.apply(&mut out);
    Ok((aggregated, out))
}

/// Backward rule of a GCN layer.
///
/// Given `Â·H` and the layer output from the forward pass, returns
/// `(∂L/∂H, ∂L/∂W)` for upstream gradient `grad_out`.
pub fn gcn_backward(
    adj: &NormalizedAdjacency,
    weights: &Matrix,
    aggregated: &Matrix,
    output: &Matrix,
    activation: Activation,
    grad_out: &Matrix,
) -> Result<(Matrix, Matrix), NnError> {
    if grad_out.shape() != output.shape() {
        return Err(NnError::shape("gcn backward", output.shape(), grad_out.shape()));
    }
    let mut grad_pre = grad_out.clone();
    activation.backprop(output, &mut grad_pre);
    let grad_w = aggregated.transpose_matmul(&grad_pre)?;
    let grad_agg = grad_pre.matmul_transpose(weights)?;
    let grad_in = adj.apply(&grad_agg)?;
    Ok((grad_in, grad_w))
}

/// `activation(X · W + b)` with `b` (`1 × out`) broadcast over rows.
pub fn dense_forward(
    input: &Matrix,
    weights: &Matrix,
    bias: &Matrix,
    activation: Activation,
) -> Result<Matrix, NnError> {
    if bias.rows() != 1 || bias.cols() != weights.cols() {
        return Err(NnError::shape("dense bias", weights.shape(), bias.shape()));
    }
    let mut out = input.matmul(weights)?;
    for r in 0..out.rows() {
        for (o, b) in out.row_mut(r).iter_mut().zip(bias.data()) {
            *o += b;
        }
    }
    activation.apply(&mut out);
    Ok(out)
}

/// Backward rule of a dense layer: returns `(∂L/∂X, ∂L/∂W, ∂L/∂b)`.
pub fn dense_backward(
    input: &Matrix,
    weights: &Matrix,
    output: &Matrix,
    activation: Activation,
    grad_out: &Matrix,
) -> Result<(Matrix, Matrix, Matrix), NnError> {
    if grad_out.shape() != output.shape() {
        return Err(NnError::shape("dense backward", output.shape(), grad_out.shape()));
    }
    let mut grad_pre = grad_out.clone();
    activation.backprop(output, &mut grad_pre);
    let grad_w = input.transpose_matmul(&grad_pre)?;
    let grad_b = grad_pre.column_sum();
    let grad_in = grad_pre.matmul_transpose(weights)?;
    Ok((grad_in, grad_w, grad_b))
}

/// Mean over rows, `N × F → 1 × F`.
pub fn mean_pool(x: &Matrix) -> Matrix {
    x.column_mean()
}

/// Spreads a `1 × F` gradient evenly over `rows` rows.
pub fn mean_pool_backward(grad: &Matrix, rows: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, grad.cols());
    let share = 1.0 / rows.max(1) as f64;
    for r in 0..rows {
        for (o, g) in out.row_mut(r).iter_mut().zip(grad.data()) {
            *o = g * share;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcn_identity_case() {
        let adj = NormalizedAdjacency::new(3, []).unwrap();
        let h = Matrix::from_rows(&[[1.0, 2.0], [3.0, -4.0], [0.5, 0.0]]);
        let out = gcn_layer_forward(&adj, &h, &Matrix::identity(2), Activation::Identity).unwrap();
        assert_eq!(out, h);
    }

    #[test]
    fn gcn_two_nodes() {
        let adj = NormalizedAdjacency::new(2, [(0, 1)]).unwrap();
        let h = Matrix::from_rows(&[[1.0], [3.0]]);
        let out = gcn_layer_forward(&adj, &h, &Matrix::from_rows(&[[1.0]]), Activation::Identity).unwrap();
        assert_eq!(out, Matrix::from_rows(&[[2.0], [2.0]]));
    }

    #[test]
    fn gcn_relu_nonnegative_and_shape_errors() {
        let adj = NormalizedAdjacency::new(3, [(0, 1), (1, 2)]).unwrap();
        let h = Matrix::from_rows(&[[1.0, -2.0], [-3.0, 4.0], [0.5, -7.0]]);
        let w = Matrix::from_rows(&[[1.0, -1.0, 0.3], [-0.2, 0.5, -2.0]]);
        let out = gcn_layer_forward(&adj, &h, &w, Activation::Relu).unwrap();
        assert!(out.data().iter().all(|&v| v >= 0.0));
        assert!(gcn_layer_forward(&adj, &h, &Matrix::identity(3), Activation::Relu).is_err());
        assert!(gcn_layer_forward(&adj, &Matrix::zeros(2, 2), &w, Activation::Relu).is_err());
    }

    #[test]
    fn dense_examples() {
        let x = Matrix::from_rows(&[[1.0, 2.0]]);
        let same = dense_forward(&x, &Matrix::identity(2), &Matrix::zeros(1, 2), Activation::Identity).unwrap();
        assert_eq!(same, x);
        let sum = dense_forward(
            &x,
            &Matrix::from_rows(&[[1.0], [1.0]]),
            &Matrix::row_vector(&[1.0]),
            Activation::Identity,
        )
        .unwrap();
        assert_eq!(sum, Matrix::from_rows(&[[4.0]]));
        let relu = dense_forward(
            &Matrix::from_rows(&[[-1.0, 2.0]]),
            &Matrix::identity(2),
            &Matrix::zeros(1, 2),
            Activation::Relu,
        )
        .unwrap();
        assert_eq!(relu, Matrix::from_rows(&[[0.0, 2.0]]));
        assert!(dense_forward(&x, &Matrix::identity(3), &Matrix::zeros(1, 3), Activation::Relu).is_err());
        assert!(dense_forward(&x, &Matrix::identity(2), &Matrix::zeros(1, 3), Activation::Relu).is_err());
    }

    #[test]
    fn dense_squared_error_by_hand() {
        // y = x·w + b with x = [2, 3], w = [0.5, -1]ᵀ, b = 1 → y = -1.
        // L = ½(y - t)² with t = 1 → ∂L/∂y = -2,
        // ∂L/∂w = x·(-2) = [-4, -6], ∂L/∂b = -2, ∂L/∂x = w·(-2) = [-1, 2].
        let x = Matrix::from_rows(&[[2.0, 3.0]]);
        let w = Matrix::from_rows(&[[0.5], [-1.0]]);
        let b = Matrix::row_vector(&[1.0]);
        let y = dense_forward(&x, &w, &b, Activation::Identity).unwrap();
        assert_eq!(y[(0, 0)], -1.0);
        let g = Matrix::from_rows(&[[y[(0, 0)] - 1.0]]);
        let (gx, gw, gb) = dense_backward(&x, &w, &y, Activation::Identity, &g).unwrap();
        assert_eq!(gw, Matrix::from_rows(&[[-4.0], [-6.0]]));
        assert_eq!(gb, Matrix::row_vector(&[-2.0]));
        assert_eq!(gx, Matrix::from_rows(&[[-1.0, 2.0]]));
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let adj = NormalizedAdjacency::new(3, [(0, 1), (1, 2)]).unwrap();
        let h = Matrix::from_rows(&[[1.0, -2.0], [-3.0, 4.0], [0.5, -7.0]]);
        let w = Matrix::from_rows(&[[1.0, -1.0], [-0.2, 0.5]]);
        let (agg, out) = gcn_forward_parts(&adj, &h, &w, Activation::Relu).unwrap();
        let (gh, gw) = gcn_backward(&adj, &w, &agg, &out, Activation::Relu, &Matrix::zeros(3, 2)).unwrap();
        assert!(gh.data().iter().chain(gw.data()).all(|&v| v == 0.0));
    }

    #[test]
    fn mean_pool_round_trip() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(mean_pool(&x), Matrix::row_vector(&[2.0, 3.0]));
        let g = mean_pool_backward(&Matrix::row_vector(&[2.0, -4.0]), 2);
        assert_eq!(g, Matrix::from_rows(&[[1.0, -2.0], [1.0, -2.0]]));
    }
}
