use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

/// Plain (non-centred, no momentum) RMSprop with per-group learning rates:
///
/// ```text
/// v ← α v + (1 − α) g²
/// p ← p − lr_group · g / (√v + ε)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct RmsProp {
    pub alpha: f64,
    pub eps: f64,
    lrs: Vec<f64>,
    group_of: Vec<usize>,
    sq_avg: Vec<f64>,
}

impl RmsProp {
    pub const DEFAULT_ALPHA: f64 = 0.99;
    pub const DEFAULT_EPS: f64 = 1e-8;

    /// `group_of[i]` indexes into `lrs` for parameter `i`.
    pub fn new(group_of: Vec<usize>, lrs: Vec<f64>, alpha: f64, eps: f64) -> Result<Self> {
        if group_of.iter().any(|&g| g >= lrs.len()) {
            return Err(invalid("parameter assigned to an unknown learning-rate group"));
        }
        if lrs.iter().any(|&lr| !(lr > 0.0)) {
            return Err(invalid("learning rates must be positive"));
        }
        if !(0.0..1.0).contains(&alpha) || !(eps > 0.0) {
            return Err(invalid("RMSprop needs 0 ≤ alpha < 1 and eps > 0"));
        }
        let n = group_of.len();
        Ok(Self { alpha, eps, lrs, group_of, sq_avg: vec![0.0; n] })
    }

    /// Single group.
    pub fn uniform(n: usize, lr: f64) -> Result<Self> {
        Self::new(vec![0; n], vec![lr], Self::DEFAULT_ALPHA, Self::DEFAULT_EPS)
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.sq_avg
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.sq_avg.len() || grads.len() != params.len() {
            return Err(invalid(alloc::format!(
                "RMSprop shape mismatch: {} state, {} params, {} grads",
                self.sq_avg.len(),
                params.len(),
                grads.len()
            )));
        }
        for i in 0..params.len() {
            let g = grads[i];
            let v = self.alpha * self.sq_avg[i] + (1.0 - self.alpha) * g * g;
            self.sq_avg[i] = v;
            params[i] -= self.lrs[self.group_of[i]] * g / (math::sqrt(v) + self.eps);
        }
        Ok(())
    }
}

/// `p ← p − lr·g`.
pub fn sgd_step(params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
    if params.len() != grads.len() {
        return Err(invalid("SGD shape mismatch"));
    }
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= lr * g;
    }
    Ok(())
}

/// Rescales `grads` in place so their L2 norm is at most `max_norm`; returns
/// the norm before clipping.
pub fn clip_global_norm(grads: &mut [f64], max_norm: f64) -> f64 {
    let norm = math::sqrt(grads.iter().map(|g| g * g).sum());
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        grads.iter_mut().for_each(|g| *g *= s);
    }
    norm
}
