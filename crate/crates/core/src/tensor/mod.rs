//! 1D feature maps, strided "SAME" convolution, its exact adjoint
//! (transposed convolution) and elementwise activations, each with an
//! analytic backward pass.
//!
//! Storage is generic over [`Real`]; every dot product accumulates in `f64`
//! in a fixed order, so a given input always produces bit-identical output.

mod activation;
mod conv;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use activation::{relu, relu_grad, tanh_act, tanh_grad};
pub(crate) use conv::{conv_backward, transpose_backward};
pub use conv::{
    conv1d_same, conv1d_same_grad, conv1d_transpose_same, conv1d_transpose_same_grad, ConvGrads,
};

use crate::math::Real;
use crate::{Error, Result};

/// A `channels × length` tensor, row-major by channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap<T> {
    channels: usize,
    length: usize,
    values: Vec<T>,
}

impl<T: Real> FeatureMap<T> {
    pub fn new(channels: usize, length: usize, values: Vec<T>) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(Error::Shape(format!(
                "feature map must be non-empty, got {channels}x{length}"
            )));
        }
        if values.len() != channels * length {
            return Err(Error::Shape(format!(
                "{} values for a {channels}x{length} map",
                values.len()
            )));
        }
        Ok(Self {
            channels,
            length,
            values,
        })
    }

    pub fn zeros(channels: usize, length: usize) -> Self {
        Self {
            channels,
            length,
            values: vec![T::ZERO; channels * length],
        }
    }

    /// Single-channel map holding a signal.
    pub fn from_signal(samples: &[T]) -> Result<Self> {
        Self::new(1, samples.len(), samples.to_vec())
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.channels, self.length)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.values[c * self.length..(c + 1) * self.length]
    }

    /// Values at one time step across all channels.
    pub fn column(&self, t: usize) -> Vec<T> {
        (0..self.channels).map(|c| self.values[c * self.length + t]).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            channels: self.channels,
            length: self.length,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }
}

/// Whether a layer downsamples (convolution) or upsamples (its adjoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Conv,
    Transposed,
}

/// Weights and geometry of one convolutional layer.
///
/// Weights are stored `[a][b][k]` where `a` indexes channels on the
/// short (downsampled) side and `b` on the long side. For a convolution
/// that is `[out][in][k]`; for a transposed convolution `[in][out][k]`.
/// The same tensor therefore defines a convolution and its exact adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayerParams<T> {
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel_width: usize,
    pub stride: usize,
    pub weights: Vec<T>,
    /// One entry per output channel.
    pub bias: Vec<T>,
}

impl<T: Real> ConvLayerParams<T> {
    /// Zero-initialized layer.
    pub fn zeros(
        kind: LayerKind,
        in_channels: usize,
        out_channels: usize,
        kernel_width: usize,
        stride: usize,
    ) -> Self {
        Self {
            kind,
            in_channels,
            out_channels,
            kernel_width,
            stride,
            weights: vec![T::ZERO; in_channels * out_channels * kernel_width],
            bias: vec![T::ZERO; out_channels],
        }
    }

    /// Channel count on the downsampled side.
    pub fn short_channels(&self) -> usize {
        match self.kind {
            LayerKind::Conv => self.out_channels,
            LayerKind::Transposed => self.in_channels,
        }
    }

    /// Channel count on the full-rate side.
    pub fn long_channels(&self) -> usize {
        match self.kind {
            LayerKind::Conv => self.in_channels,
            LayerKind::Transposed => self.out_channels,
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// The adjoint layer: same weight tensor, kind and channel roles swapped,
    /// zero bias.
    pub fn adjoint(&self) -> Self {
        Self {
            kind: match self.kind {
                LayerKind::Conv => LayerKind::Transposed,
                LayerKind::Transposed => LayerKind::Conv,
            },
            in_channels: self.out_channels,
            out_channels: self.in_channels,
            kernel_width: self.kernel_width,
            stride: self.stride,
            weights: self.weights.clone(),
            bias: vec![T::ZERO; self.in_channels],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stride == 0 || self.kernel_width == 0 {
            return Err(Error::Shape("stride and kernel width must be positive".into()));
        }
        if self.in_channels == 0 || self.out_channels == 0 {
            return Err(Error::Shape("channel counts must be positive".into()));
        }
        if self.weights.len() != self.in_channels * self.out_channels * self.kernel_width {
            return Err(Error::Shape(format!(
                "{} weights for {}x{}x{}",
                self.weights.len(),
                self.short_channels(),
                self.long_channels(),
                self.kernel_width
            )));
        }
        if self.bias.len() != self.out_channels {
            return Err(Error::Shape(format!(
                "{} biases for {} output channels",
                self.bias.len(),
                self.out_channels
            )));
        }
        if let Some(i) = self.weights.iter().chain(&self.bias).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(())
    }
}

/// Geometry of a "SAME" strided convolution over `long_len` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamePadding {
    pub long_len: usize,
    /// `ceil(long_len / stride)`.
    pub short_len: usize,
    pub pad_left: usize,
    pub pad_right: usize,
}

impl SamePadding {
    pub fn new(long_len: usize, kernel_width: usize, stride: usize) -> Self {
        let short_len = long_len.div_ceil(stride);
        let span = (short_len - 1) * stride + kernel_width;
        let total = span.saturating_sub(long_len);
        let pad_left = total / 2;
        Self {
            long_len,
            short_len,
            pad_left,
            pad_right: total - pad_left,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_padding_arithmetic() {
        let p = SamePadding::new(4, 3, 2);
        assert_eq!((p.short_len, p.pad_left, p.pad_right), (2, 0, 1));
        let p = SamePadding::new(4096, 5, 2);
        assert_eq!((p.short_len, p.pad_left, p.pad_right), (2048, 1, 2));
        let p = SamePadding::new(7, 3, 1);
        assert_eq!((p.short_len, p.pad_left, p.pad_right), (7, 1, 1));
        let p = SamePadding::new(4, 1, 2);
        assert_eq!((p.short_len, p.pad_left, p.pad_right), (2, 0, 0));
    }

    #[test]
    fn feature_map_shape_checks() {
        assert!(FeatureMap::<f64>::new(2, 3, vec![0.0; 5]).is_err());
        assert!(FeatureMap::<f64>::new(0, 3, vec![]).is_err());
        let m = FeatureMap::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.channel(1), &[4.0, 5.0, 6.0]);
        assert_eq!(m.column(2), vec![3.0, 6.0]);
    }
}
