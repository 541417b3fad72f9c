use alloc::vec;
use alloc::vec::Vec;

use crate::math::{pow, sqrt, Real};
use crate::rae::RaeParams;
use crate::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moments, one entry per parameter in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(param_count: usize) -> Self {
        Self {
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            step_count: 0,
            beta1: BETA1,
            beta2: BETA2,
            epsilon: EPSILON,
        }
    }

    pub fn validate(&self, param_count: usize) -> Result<()> {
        if self.m.len() != param_count || self.v.len() != param_count {
            return Err(Error::Shape(alloc::format!(
                "optimizer state holds {}/{} moments for {param_count} parameters",
                self.m.len(),
                self.v.len()
            )));
        }
        if let Some(i) = self.v.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }
}

fn layer_of<T: Real>(params: &RaeParams<T>, index: usize) -> usize {
    let mut end = 0;
    for (i, l) in params.layers().iter().enumerate() {
        end += l.param_count();
        if index < end {
            return i;
        }
    }
    params.layers().len()
}

/// One Adam update with bias correction. Non-finite gradients are rejected
/// before anything is modified.
pub fn adam_step<T: Real>(
    params: &mut RaeParams<T>,
    grads: &[f64],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    let n = params.param_count();
    state.validate(n)?;
    if grads.len() != n {
        return Err(Error::LengthMismatch {
            left: grads.len(),
            right: n,
        });
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient {
            layer: layer_of(params, i),
        });
    }
    state.step_count += 1;
    let t = state.step_count as f64;
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = 1.0 - pow(b1, t);
    let c2 = 1.0 - pow(b2, t);
    for (((p, &g), m), v) in params
        .values_mut()
        .zip(grads)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let step = lr * (*m / c1) / (sqrt(*v / c2) + state.epsilon);
        *p = T::from_f64(p.to_f64() - step);
    }
    Ok(())
}
