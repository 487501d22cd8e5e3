use super::network::Parameters;
use crate::error::check_dim;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.004,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates, flattened in [`Parameters::tensors`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first: Vec<f64>,
    second: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        Self {
            first: vec![0.0; n_params],
            second: vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn for_params(params: &Parameters) -> Self {
        Self::new(params.len())
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update applied in place to flat slices.
    pub fn update_flat(&mut self, params: &mut [f64], grads: &[f64], config: &AdamConfig) -> Result<()> {
        check_dim("adam parameter count", self.first.len(), params.len())?;
        check_dim("adam gradient count", params.len(), grads.len())?;
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - config.beta1.powi(t);
        let c2 = 1.0 - config.beta2.powi(t);
        for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut self.first).zip(&mut self.second) {
            *m = config.beta1 * *m + (1.0 - config.beta1) * g;
            *v = config.beta2 * *v + (1.0 - config.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
        }
        Ok(())
    }
}

/// Applies one Adam step to every network tensor.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut Parameters,
    grads: &Parameters,
    config: &AdamConfig,
) -> Result<()> {
    let mut flat: Vec<f64> = params.tensors().concat();
    let flat_grads: Vec<f64> = grads.tensors().concat();
    state.update_flat(&mut flat, &flat_grads, config)?;
    let mut offset = 0;
    for tensor in params.tensors_mut() {
        let len = tensor.len();
        tensor.copy_from_slice(&flat[offset..offset + len]);
        offset += len;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut state = AdamState::new(1);
        let mut p = [1.0];
        state.update_flat(&mut p, &[2.0], &AdamConfig::default()).unwrap();
        assert!((p[0] - 1.0 + 0.004).abs() < 1e-6);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut state = AdamState::new(3);
        let mut p = [0.5, -1.0, 2.0];
        state.update_flat(&mut p, &[0.0; 3], &AdamConfig::default()).unwrap();
        assert_eq!(p, [0.5, -1.0, 2.0]);
    }

    #[test]
    fn repeated_gradient_does_not_grow_the_step() {
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(1);
        let mut p = [0.0];
        state.update_flat(&mut p, &[0.7], &cfg).unwrap();
        let first = p[0];
        state.update_flat(&mut p, &[0.7], &cfg).unwrap();
        let second = p[0] - first;
        assert!(second.abs() <= first.abs() + 1e-9);
        assert_eq!(state.step_count(), 2);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let mut state = AdamState::new(2);
        let mut p = [0.0; 3];
        assert!(state.update_flat(&mut p, &[0.0; 3], &AdamConfig::default()).is_err());
    }
}
