use alloc::vec::Vec;

use super::{Matrix, NnError};

/// Row-wise softmax computed with the max-shift for stability.
pub fn softmax(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = libm::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Mean cross-entropy over rows and its gradient with respect to the logits,
/// `(softmax - onehot) / batch`.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix), NnError> {
    if labels.len() != logits.rows() {
        return Err(NnError::shape("cross entropy", logits.shape(), (labels.len(), 1)));
    }
    let classes = logits.cols();
    if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
        return Err(NnError::LabelOutOfRange { label, classes });
    }
    let batch = logits.rows().max(1) as f64;
    let mut grad = softmax(logits);
    let mut losses = Vec::with_capacity(labels.len());
    for (r, &label) in labels.iter().enumerate() {
        let row = logits.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + libm::log(row.iter().map(|v| libm::exp(v - max)).sum::<f64>());
        losses.push(lse - row[label]);
        grad[(r, label)] -= 1.0;
    }
    grad.scale(1.0 / batch);
    Ok((losses.iter().sum::<f64>() / batch, grad))
}
