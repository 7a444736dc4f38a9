use alloc::vec::Vec;

use super::ModelParams;
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdadeltaConfig {
    /// Decay of both running averages.
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for AdadeltaConfig {
    fn default() -> Self {
        AdadeltaConfig {
            rho: 0.95,
            epsilon: 1e-6,
        }
    }
}

/// Running averages of squared gradients and squared updates, one buffer per
/// parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdadeltaState {
    pub config: AdadeltaConfig,
    sq_grad: Vec<Vec<f64>>,
    sq_update: Vec<Vec<f64>>,
}

impl AdadeltaState {
    pub fn new(config: AdadeltaConfig, params: &ModelParams) -> Self {
        let zeros: Vec<Vec<f64>> = params
            .tensors()
            .iter()
            .map(|t| alloc::vec![0.0; t.len()])
            .collect();
        AdadeltaState {
            config,
            sq_grad: zeros.clone(),
            sq_update: zeros,
        }
    }

    pub fn sq_grad(&self) -> &[Vec<f64>] {
        &self.sq_grad
    }

    pub fn sq_update(&self) -> &[Vec<f64>] {
        &self.sq_update
    }

    /// One Adadelta step:
    ///
    /// ```text
    /// E[g²] ← ρ E[g²] + (1-ρ) g²
    /// Δ     = -sqrt(E[Δ²] + ε) / sqrt(E[g²] + ε) · g
    /// E[Δ²] ← ρ E[Δ²] + (1-ρ) Δ²
    /// θ     ← θ + Δ
    /// ```
    pub fn update(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        let AdadeltaConfig { rho, epsilon } = self.config;
        for (((p, g), eg), ed) in params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(&mut self.sq_grad)
            .zip(&mut self.sq_update)
        {
            for (((theta, &grad), eg), ed) in
                p.data_mut().iter_mut().zip(g.data()).zip(eg).zip(ed)
            {
                *eg = rho * *eg + (1.0 - rho) * grad * grad;
                let delta = -sqrt(*ed + epsilon) / sqrt(*eg + epsilon) * grad;
                *ed = rho * *ed + (1.0 - rho) * delta * delta;
                *theta += delta;
            }
        }
    }
}

/// Rescales `grads` so their global norm is at most `threshold`; returns the
/// norm before rescaling.
pub fn clip_global_norm(grads: &mut ModelParams, threshold: f64) -> f64 {
    let norm = grads.global_norm();
    if norm > threshold && norm.is_finite() {
        grads.scale(threshold / norm);
    }
    norm
}
