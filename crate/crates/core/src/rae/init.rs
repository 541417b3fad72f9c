use rand::Rng as _;

use super::{RaeParams, RaeShape};
use crate::math::{sqrt, Real};
use crate::rng::{rng_from, stream};
use crate::tensor::LayerKind;

/// Full-width network in `f32`, seeded.
pub fn init_params(seed: u64) -> RaeParams<f32> {
    init_params_shaped(RaeShape::TABLE, seed)
}

/// Uniform fan-in scaled weights: He bounds `sqrt(6 / fan_in)` before ReLU,
/// Glorot bounds `sqrt(6 / (fan_in + fan_out))` before Tanh. Biases zero.
/// Each layer draws from its own stream.
pub fn init_params_shaped<T: Real>(shape: RaeShape, seed: u64) -> RaeParams<T> {
    let mut params = RaeParams::zeros(shape);
    for (i, layer) in params.layers.iter_mut().enumerate() {
        let k = layer.kernel_width as f64;
        let fan_in = layer.in_channels as f64 * k;
        let fan_out = layer.out_channels as f64 * k;
        let limit = match layer.kind {
            LayerKind::Conv => sqrt(6.0 / fan_in),
            LayerKind::Transposed => sqrt(6.0 / (fan_in + fan_out)),
        };
        let mut rng = rng_from(seed, &[stream::INIT, i as u64]);
        for w in &mut layer.weights {
            *w = T::from_f64(rng.random_range(-limit..limit));
        }
    }
    params
}
