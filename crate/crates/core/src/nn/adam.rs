use alloc::vec::Vec;

use super::{Matrix, NnError, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// L2 coefficient added to the gradient before the moment updates.
    pub weight_decay: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self { learning_rate, ..Self::default() }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8, weight_decay: 0.0 }
    }
}

/// First and second moment estimates for every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first: Vec<Matrix>,
    second: Vec<Matrix>,
}

impl AdamState {
    pub fn new(params: &ParameterSet, config: AdamConfig) -> Self {
        let zeros = || params.iter().map(|p| Matrix::zeros(p.value.rows(), p.value.cols())).collect();
        Self { config, step: 0, first: zeros(), second: zeros() }
    }
}

/// One bias-corrected Adam update using the gradients stored in `params`.
pub fn adam_step(params: &mut ParameterSet, state: &mut AdamState) -> Result<(), NnError> {
    if state.first.len() != params.len()
        || params.iter().zip(&state.first).any(|(p, m)| p.value.shape() != m.shape())
    {
        return Err(NnError::OptimizerMismatch);
    }
    let AdamConfig { learning_rate, beta1, beta2, epsilon, weight_decay } = state.config;
    state.step += 1;
    let t = state.step as f64;
    let correction1 = 1.0 - libm::pow(beta1, t);
    let correction2 = 1.0 - libm::pow(beta2, t);
    for ((p, m), v) in params.iter_mut().zip(&mut state.first).zip(&mut state.second) {
        let values = p.value.data_mut();
        for (i, &g) in p.grad.data().iter().enumerate() {
            let g = g + weight_decay * values[i];
            let mi = &mut m.data_mut()[i];
            *mi = beta1 * *mi + (1.0 - beta1) * g;
            let m_hat = *mi / correction1;
            let vi = &mut v.data_mut()[i];
            *vi = beta2 * *vi + (1.0 - beta2) * g * g;
            let v_hat = *vi / correction2;
            values[i] -= learning_rate * m_hat / (libm::sqrt(v_hat) + epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(theta: f64) -> ParameterSet {
        let mut ps = ParameterSet::new();
        ps.add("theta", Matrix::from_rows(&[[theta]])).unwrap();
        ps
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut ps = scalar(0.0);
        ps.grad_mut(super::super::ParamId(0)).fill(1.0);
        let mut st = AdamState::new(&ps, AdamConfig::with_learning_rate(0.001));
        adam_step(&mut ps, &mut st).unwrap();
        // m̂ = 1, v̂ = 1 → Δ = -0.001 / (1 + 1e-8)
        let theta = ps.iter().next().unwrap().value[(0, 0)];
        assert!((theta + 0.001 / (1.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_identity() {
        let mut ps = scalar(0.7);
        let mut st = AdamState::new(&ps, AdamConfig::default());
        for _ in 0..5 {
            adam_step(&mut ps, &mut st).unwrap();
        }
        assert_eq!(ps.iter().next().unwrap().value[(0, 0)], 0.7);
    }

    #[test]
    fn descends_a_parabola() {
        let mut ps = scalar(1.0);
        let mut st = AdamState::new(&ps, AdamConfig::with_learning_rate(0.1));
        let id = super::super::ParamId(0);
        let mut last = 1.0;
        for _ in 0..10 {
            let theta = ps.value(id)[(0, 0)];
            ps.grad_mut(id).fill(2.0 * theta);
            adam_step(&mut ps, &mut st).unwrap();
            let theta = ps.value(id)[(0, 0)];
            assert!(theta * theta < last);
            last = theta * theta;
        }
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let mut ps = scalar(1.0);
        let mut st = AdamState::new(&ParameterSet::new(), AdamConfig::default());
        assert_eq!(adam_step(&mut ps, &mut st), Err(NnError::OptimizerMismatch));
    }
}
