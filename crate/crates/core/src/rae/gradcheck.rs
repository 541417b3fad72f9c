use alloc::vec::Vec;

use rand::Rng as _;

use super::{backward, init_params_shaped, rae_forward, RaeParams, RaeShape};
use crate::rng::rng_from;
use crate::tensor::FeatureMap;
use crate::Result;

/// Worst disagreement between analytic and central-difference gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub checked: usize,
    pub max_rel_error: f64,
    /// Canonical parameter index of the worst case; `None` for the input.
    pub worst_param: Option<usize>,
    pub max_rel_error_input: f64,
}

/// `|a - n| / max(|a|, |n|, floor)`; the floor keeps exact zeros (dead ReLU
/// paths) from dividing by zero.
pub fn rel_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

pub const REL_FLOOR: f64 = 1e-8;

/// Checks every parameter and input gradient of a randomly initialized
/// `shape` network in `f64` against central differences of
/// `loss = <y, r>` with a random probe `r`.
pub fn finite_difference_check(shape: RaeShape, len: usize, h: f64, seed: u64) -> Result<GradCheck> {
    let mut params: RaeParams<f64> = init_params_shaped(shape, seed);
    let mut rng = rng_from(seed, &[99]);
    // nonzero biases so every bias gradient is exercised through live units
    for layer in &mut params.layers {
        for b in &mut layer.bias {
            *b = rng.random_range(-0.1..0.1);
        }
    }
    let x: Vec<f64> = (0..len).map(|_| rng.random_range(-0.9..0.9)).collect();
    let probe: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    let xm = FeatureMap::from_signal(&x)?;
    let probe_map = FeatureMap::from_signal(&probe)?;

    let loss = |p: &RaeParams<f64>, x: &FeatureMap<f64>| -> Result<f64> {
        let (y, _) = rae_forward(x, p)?;
        Ok(y.values().iter().zip(&probe).map(|(a, b)| a * b).sum())
    };

    let (_, cache) = rae_forward(&xm, &params)?;
    let grads = backward(&cache, &params, &probe_map, true)?;
    let analytic: Vec<f64> = grads.values().collect();

    let mut report = GradCheck {
        checked: analytic.len(),
        max_rel_error: 0.0,
        worst_param: None,
        max_rel_error_input: 0.0,
    };
    for (i, &a) in analytic.iter().enumerate() {
        let orig = params.values().nth(i).expect("index in range");
        let set = |p: &mut RaeParams<f64>, v: f64| {
            *p.values_mut().nth(i).expect("index in range") = v;
        };
        set(&mut params, orig + h);
        let up = loss(&params, &xm)?;
        set(&mut params, orig - h);
        let down = loss(&params, &xm)?;
        set(&mut params, orig);
        let e = rel_error(a, (up - down) / (2.0 * h), REL_FLOOR);
        if e > report.max_rel_error {
            report.max_rel_error = e;
            report.worst_param = Some(i);
        }
    }
    let gx = grads.input.expect("requested");
    for i in 0..len {
        let mut xp = x.clone();
        xp[i] += h;
        let up = loss(&params, &FeatureMap::from_signal(&xp)?)?;
        xp[i] -= 2.0 * h;
        let down = loss(&params, &FeatureMap::from_signal(&xp)?)?;
        let e = rel_error(gx.values()[i], (up - down) / (2.0 * h), REL_FLOOR);
        report.max_rel_error_input = report.max_rel_error_input.max(e);
    }
    Ok(report)
}
