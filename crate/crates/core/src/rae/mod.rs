//! Residual convolutional autoencoder.
//!
//! Five strided convolutions (ReLU) compress a `1 × L` record to a 44-channel
//! bottleneck at `L/16`; four transposed convolutions (Tanh) expand it back
//! to a single-channel residual `r`, and the output is `y = x + r`.

mod gradcheck;
mod init;

use alloc::format;
use alloc::vec::Vec;

pub use gradcheck::{finite_difference_check, rel_error, GradCheck, REL_FLOOR};
pub use init::{init_params, init_params_shaped};

use crate::math::Real;
use crate::tensor::{
    conv1d_same, conv1d_transpose_same, relu, relu_grad, tanh_act, tanh_grad, ConvLayerParams,
    FeatureMap, LayerKind,
};
use crate::tensor::{conv_backward, transpose_backward};
use crate::{Error, Result};

pub const NUM_LAYERS: usize = 9;
pub const NUM_CONV: usize = 5;
/// Index of the bottleneck in the activation chain (output of the last conv).
pub const BOTTLENECK: usize = NUM_CONV;
pub const KERNELS: [usize; NUM_LAYERS] = [5, 5, 3, 3, 3, 5, 5, 5, 7];
pub const STRIDES: [usize; NUM_LAYERS] = [2, 2, 2, 2, 1, 2, 2, 2, 2];
/// Total downsampling; record lengths must be a multiple of this.
pub const LENGTH_MULTIPLE: usize = 16;
/// Weights plus biases of the full-width network.
pub const PARAM_COUNT: usize = 41_081;

/// Channel widths: outputs of the five convolutions, then outputs of the
/// first three transposed convolutions. Input and output are one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RaeShape {
    pub conv: [usize; NUM_CONV],
    pub deconv: [usize; 3],
}

impl RaeShape {
    pub const TABLE: RaeShape = RaeShape {
        conv: [32, 34, 38, 44, 44],
        deconv: [38, 34, 32],
    };

    /// Every hidden layer `width` channels wide (gradient-check scale).
    pub const fn uniform(width: usize) -> Self {
        Self {
            conv: [width; NUM_CONV],
            deconv: [width; 3],
        }
    }

    /// `(in, out)` channels of each layer in order.
    pub fn channels(&self) -> [(usize, usize); NUM_LAYERS] {
        let mut widths = [1usize; NUM_LAYERS + 1];
        widths[1..=NUM_CONV].copy_from_slice(&self.conv);
        widths[NUM_CONV + 1..NUM_LAYERS].copy_from_slice(&self.deconv);
        core::array::from_fn(|i| (widths[i], widths[i + 1]))
    }

    pub fn kind(layer: usize) -> LayerKind {
        if layer < NUM_CONV {
            LayerKind::Conv
        } else {
            LayerKind::Transposed
        }
    }

    pub fn bottleneck_channels(&self) -> usize {
        self.conv[NUM_CONV - 1]
    }

    pub fn param_count(&self) -> usize {
        self.channels()
            .iter()
            .zip(KERNELS)
            .map(|(&(i, o), k)| i * o * k + o)
            .sum()
    }

    /// Length of every activation for input length `len`, input first.
    pub fn lengths(len: usize) -> [usize; NUM_LAYERS + 1] {
        let mut out = [len; NUM_LAYERS + 1];
        for i in 0..NUM_LAYERS {
            out[i + 1] = match Self::kind(i) {
                LayerKind::Conv => out[i].div_ceil(STRIDES[i]),
                LayerKind::Transposed => out[i] * STRIDES[i],
            };
        }
        out
    }
}

/// The nine layers in order. Construction checks every layer against a
/// [`RaeShape`].
#[derive(Debug, Clone, PartialEq)]
pub struct RaeParams<T> {
    shape: RaeShape,
    layers: Vec<ConvLayerParams<T>>,
}

impl<T: Real> RaeParams<T> {
    pub fn zeros(shape: RaeShape) -> Self {
        let layers = shape
            .channels()
            .iter()
            .enumerate()
            .map(|(i, &(cin, cout))| {
                ConvLayerParams::zeros(RaeShape::kind(i), cin, cout, KERNELS[i], STRIDES[i])
            })
            .collect();
        Self { shape, layers }
    }

    pub fn from_layers(shape: RaeShape, layers: Vec<ConvLayerParams<T>>) -> Result<Self> {
        if layers.len() != NUM_LAYERS {
            return Err(Error::Shape(format!(
                "expected {NUM_LAYERS} layers, got {}",
                layers.len()
            )));
        }
        for (i, (layer, &(cin, cout))) in layers.iter().zip(&shape.channels()).enumerate() {
            let expected = (RaeShape::kind(i), cin, cout, KERNELS[i], STRIDES[i]);
            let got = (
                layer.kind,
                layer.in_channels,
                layer.out_channels,
                layer.kernel_width,
                layer.stride,
            );
            if got != expected {
                return Err(Error::Shape(format!(
                    "layer {i}: expected {expected:?}, got {got:?}"
                )));
            }
            layer
                .validate()
                .map_err(|e| Error::Shape(format!("layer {i}: {e}")))?;
        }
        Ok(Self { shape, layers })
    }

    pub fn shape(&self) -> RaeShape {
        self.shape
    }

    pub fn layers(&self) -> &[ConvLayerParams<T>] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<ConvLayerParams<T>> {
        self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    /// Every parameter in canonical order: layer by layer, weights then bias.
    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
    }

    pub(crate) fn values_mut(&mut self) -> impl Iterator<Item = &mut T> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    /// FNV-1a over the bit patterns of every parameter.
    pub fn checksum(&self) -> u64 {
        self.values().fold(0xcbf2_9ce4_8422_2325, |h, v| {
            (h ^ v.to_bits_u64()).wrapping_mul(0x0100_0000_01b3)
        })
    }

    pub fn convert<U: Real>(&self) -> RaeParams<U> {
        let layers = self
            .layers
            .iter()
            .map(|l| ConvLayerParams {
                kind: l.kind,
                in_channels: l.in_channels,
                out_channels: l.out_channels,
                kernel_width: l.kernel_width,
                stride: l.stride,
                weights: l.weights.iter().map(|v| U::from_f64(v.to_f64())).collect(),
                bias: l.bias.iter().map(|v| U::from_f64(v.to_f64())).collect(),
            })
            .collect();
        RaeParams {
            shape: self.shape,
            layers,
        }
    }
}

/// Activations of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    /// Input first, then the post-activation output of each layer.
    activations: Vec<FeatureMap<T>>,
    params_checksum: u64,
}

impl<T: Real> ForwardCache<T> {
    pub fn input(&self) -> &FeatureMap<T> {
        &self.activations[0]
    }

    /// Post-activation output of layer `i`.
    pub fn layer_output(&self, i: usize) -> &FeatureMap<T> {
        &self.activations[i + 1]
    }

    /// The ReLU output of the last convolution.
    pub fn bottleneck(&self) -> &FeatureMap<T> {
        &self.activations[BOTTLENECK]
    }

    /// The Tanh residual added to the input.
    pub fn residual(&self) -> &FeatureMap<T> {
        &self.activations[NUM_LAYERS]
    }
}

pub fn check_length(len: usize) -> Result<()> {
    if len == 0 || len % LENGTH_MULTIPLE != 0 {
        return Err(Error::LengthNotMultipleOf16 { len });
    }
    Ok(())
}

/// Runs the network on a `1 × L` input, `L` a positive multiple of 16.
pub fn rae_forward<T: Real>(
    x: &FeatureMap<T>,
    params: &RaeParams<T>,
) -> Result<(FeatureMap<T>, ForwardCache<T>)> {
    if x.channels() != 1 {
        return Err(Error::Shape(format!(
            "input must have one channel, got {}",
            x.channels()
        )));
    }
    check_length(x.length())?;
    let mut activations = Vec::with_capacity(NUM_LAYERS + 1);
    activations.push(x.clone());
    for (i, layer) in params.layers.iter().enumerate() {
        let prev = &activations[i];
        let next = match layer.kind {
            LayerKind::Conv => relu(&conv1d_same(prev, layer)?),
            LayerKind::Transposed => tanh_act(&conv1d_transpose_same(prev, layer)?),
        };
        activations.push(next);
    }
    let r = &activations[NUM_LAYERS];
    let y: Vec<T> = x
        .values()
        .iter()
        .zip(r.values())
        .map(|(&a, &b)| T::from_f64(a.to_f64() + b.to_f64()))
        .collect();
    let cache = ForwardCache {
        activations,
        params_checksum: params.checksum(),
    };
    Ok((FeatureMap::new(1, x.length(), y)?, cache))
}

/// Forward pass without keeping the cache.
pub fn rae_infer<T: Real>(samples: &[T], params: &RaeParams<T>) -> Result<Vec<T>> {
    check_length(samples.len())?;
    let x = FeatureMap::from_signal(samples)?;
    Ok(rae_forward(&x, params)?.0.into_values())
}

/// Mean absolute error and its gradient `sign(y - y_ref) / L`, with
/// `sign(0) = 0`.
pub fn mae_loss<T: Real>(y: &[T], y_ref: &[T]) -> Result<(f64, FeatureMap<T>)> {
    if y.len() != y_ref.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_ref.len(),
        });
    }
    let n = y.len() as f64;
    let mut sum = 0.0;
    let grad: Vec<T> = y
        .iter()
        .zip(y_ref)
        .map(|(&a, &b)| {
            let d = a.to_f64() - b.to_f64();
            sum += d.abs();
            let s = if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            };
            T::from_f64(s / n)
        })
        .collect();
    Ok((sum / n, FeatureMap::from_signal(&grad)?))
}

/// Gradients for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<T> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

/// Gradients of the loss with respect to every parameter and the input.
#[derive(Debug, Clone, PartialEq)]
pub struct RaeGrads<T> {
    pub layers: Vec<LayerGrads<T>>,
    /// `None` when the caller skipped it.
    pub input: Option<FeatureMap<T>>,
}

impl<T: Real> RaeGrads<T> {
    /// Same canonical order as [`RaeParams::values`].
    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
    }
}

/// Backpropagates `loss_grad` (gradient with respect to `y`) through the
/// network, including the skip path to the input.
pub fn rae_backward<T: Real>(
    cache: &ForwardCache<T>,
    params: &RaeParams<T>,
    loss_grad: &FeatureMap<T>,
) -> Result<RaeGrads<T>> {
    backward(cache, params, loss_grad, true)
}

pub(crate) fn backward<T: Real>(
    cache: &ForwardCache<T>,
    params: &RaeParams<T>,
    loss_grad: &FeatureMap<T>,
    input_grad: bool,
) -> Result<RaeGrads<T>> {
    if cache.params_checksum != params.checksum() {
        return Err(Error::StaleCache);
    }
    if loss_grad.shape() != cache.input().shape() {
        return Err(Error::Shape(format!(
            "loss gradient {:?} for output {:?}",
            loss_grad.shape(),
            cache.input().shape()
        )));
    }
    let acts = &cache.activations;
    let mut layers = Vec::with_capacity(NUM_LAYERS);
    let mut g = loss_grad.clone();
    for (i, layer) in params.layers.iter().enumerate().rev() {
        let pre = match layer.kind {
            LayerKind::Conv => relu_grad(&acts[i + 1], &g)?,
            LayerKind::Transposed => tanh_grad(&acts[i + 1], &g)?,
        };
        let need_x = i > 0 || input_grad;
        let cg = match layer.kind {
            LayerKind::Conv => conv_backward(&acts[i], layer, &pre, need_x)?,
            LayerKind::Transposed => transpose_backward(&acts[i], layer, &pre, need_x)?,
        };
        layers.push(LayerGrads {
            weights: cg.grad_w,
            bias: cg.grad_b,
        });
        if let Some(gx) = cg.grad_x {
            g = gx;
        }
    }
    layers.reverse();
    let input = input_grad.then(|| {
        let v = g
            .values()
            .iter()
            .zip(loss_grad.values())
            .map(|(&a, &b)| T::from_f64(a.to_f64() + b.to_f64()))
            .collect();
        FeatureMap::new(1, g.length(), v).expect("shape checked above")
    });
    Ok(RaeGrads { layers, input })
}
