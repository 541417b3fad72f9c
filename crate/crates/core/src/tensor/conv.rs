use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{ConvLayerParams, FeatureMap, LayerKind, SamePadding};
use crate::math::{dot, Real};
use crate::{Error, Result};

/// Long-side signal, zero-padded and split into `stride` polyphase rows so
/// that `padded[t * stride + k]` is `phases[k % stride][t + k / stride]`.
struct Polyphase {
    stride: usize,
    row_len: usize,
    data: Vec<f64>,
}

impl Polyphase {
    fn new<T: Real>(x: &[T], geo: &SamePadding, kernel_width: usize, stride: usize) -> Self {
        let row_len = geo.short_len + (kernel_width - 1) / stride + 1;
        let mut data = vec![0.0; stride * row_len];
        for (j, &v) in x.iter().enumerate() {
            let i = j + geo.pad_left;
            let (m, r) = (i / stride, i % stride);
            if m < row_len {
                data[r * row_len + m] = v.to_f64();
            }
        }
        Self {
            stride,
            row_len,
            data,
        }
    }

    /// The `len` padded samples `padded[t * stride + k]`, `t = 0..len`.
    #[inline]
    fn tap(&self, k: usize, len: usize) -> &[f64] {
        let start = (k % self.stride) * self.row_len + k / self.stride;
        &self.data[start..start + len]
    }
}

fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.to_f64()).collect()
}

/// Output samples computed together so their accumulators stay in
/// registers.
const CHUNK: usize = 64;

/// `acc[i] += Σ_j w[j] · src[j][i]` for `i < CHUNK`, `j` in order.
#[inline(always)]
fn fma_chunk(acc: &mut [f64; CHUNK], w: f64, src: &[f64]) {
    let src: &[f64; CHUNK] = src[..CHUNK].try_into().expect("chunk");
    for i in 0..CHUNK {
        acc[i] += w * src[i];
    }
}

/// `y[a][t] = Σ_{b,k} W[a][b][k] · x_pad[b][t·s + k]`, accumulated over
/// `(b, k)` in order, then `bias[a]` added.
fn down<T: Real>(
    x: &FeatureMap<T>,
    weights: &[T],
    bias: Option<&[T]>,
    short_ch: usize,
    kernel_width: usize,
    stride: usize,
) -> FeatureMap<T> {
    let long_ch = x.channels();
    let geo = SamePadding::new(x.length(), kernel_width, stride);
    let n = geo.short_len;
    let phases: Vec<Polyphase> = (0..long_ch)
        .map(|b| Polyphase::new(x.channel(b), &geo, kernel_width, stride))
        .collect();
    let mut out = Vec::with_capacity(short_ch * n);
    let mut row = vec![0.0f64; n];
    for a in 0..short_ch {
        let w = to_f64(&weights[a * long_ch * kernel_width..][..long_ch * kernel_width]);
        let mut t0 = 0;
        while t0 + CHUNK <= n {
            let mut acc = [0.0f64; CHUNK];
            for (b, ph) in phases.iter().enumerate() {
                for k in 0..kernel_width {
                    fma_chunk(&mut acc, w[b * kernel_width + k], &ph.tap(k, n)[t0..]);
                }
            }
            row[t0..t0 + CHUNK].copy_from_slice(&acc);
            t0 += CHUNK;
        }
        for (t, dst) in row.iter_mut().enumerate().skip(t0) {
            let mut acc = 0.0;
            for (b, ph) in phases.iter().enumerate() {
                for k in 0..kernel_width {
                    acc += w[b * kernel_width + k] * ph.tap(k, n)[t];
                }
            }
            *dst = acc;
        }
        let b0 = bias.map_or(0.0, |b| b[a].to_f64());
        out.extend(row.iter().map(|&v| T::from_f64(v + b0)));
    }
    FeatureMap {
        channels: short_ch,
        length: n,
        values: out,
    }
}

/// Adjoint of [`down`]. Works per polyphase row of the padded long side:
/// `row_r[m] = Σ_{a, k ≡ r mod s} W[a][b][k] · x[a][m − ⌊k/s⌋]`, summed over
/// `(a, k)` in order, then `bias[b]` added.
fn up<T: Real>(
    x: &FeatureMap<T>,
    weights: &[T],
    bias: Option<&[T]>,
    long_ch: usize,
    long_len: usize,
    kernel_width: usize,
    stride: usize,
) -> FeatureMap<T> {
    let short_ch = x.channels();
    let n = x.length();
    let geo = SamePadding::new(long_len, kernel_width, stride);
    debug_assert_eq!(geo.short_len, n);
    let row_len = (long_len + geo.pad_left).div_ceil(stride);
    // x[a][m - q] lives at padded[a][m - q + lead]
    let lead = (kernel_width - 1) / stride;
    let padded_len = lead + row_len.max(n) + CHUNK;
    let inputs: Vec<Vec<f64>> = (0..short_ch)
        .map(|a| {
            let mut v = vec![0.0f64; padded_len];
            for (dst, src) in v[lead..].iter_mut().zip(x.channel(a)) {
                *dst = src.to_f64();
            }
            v
        })
        .collect();
    let mut rows = vec![0.0f64; stride * row_len];
    let mut w = vec![0.0f64; short_ch * kernel_width];
    let mut out = Vec::with_capacity(long_ch * long_len);
    for b in 0..long_ch {
        for a in 0..short_ch {
            for k in 0..kernel_width {
                w[a * kernel_width + k] = weights[(a * long_ch + b) * kernel_width + k].to_f64();
            }
        }
        for r in 0..stride {
            let row = &mut rows[r * row_len..(r + 1) * row_len];
            let mut m0 = 0;
            while m0 + CHUNK <= row_len {
                let mut acc = [0.0f64; CHUNK];
                for (a, input) in inputs.iter().enumerate() {
                    for k in (r..kernel_width).step_by(stride) {
                        fma_chunk(&mut acc, w[a * kernel_width + k], &input[m0 + lead - k / stride..]);
                    }
                }
                row[m0..m0 + CHUNK].copy_from_slice(&acc);
                m0 += CHUNK;
            }
            for (m, dst) in row.iter_mut().enumerate().skip(m0) {
                let mut acc = 0.0;
                for (a, input) in inputs.iter().enumerate() {
                    for k in (r..kernel_width).step_by(stride) {
                        acc += w[a * kernel_width + k] * input[m + lead - k / stride];
                    }
                }
                *dst = acc;
            }
        }
        let b0 = bias.map_or(0.0, |bias| bias[b].to_f64());
        out.extend((0..long_len).map(|j| {
            let i = j + geo.pad_left;
            T::from_f64(rows[(i % stride) * row_len + i / stride] + b0)
        }));
    }
    FeatureMap {
        channels: long_ch,
        length: long_len,
        values: out,
    }
}

/// `K` dot products sharing one operand, each reduced like [`dot`].
fn dots<const K: usize>(s: &[f64], ph: &Polyphase, n: usize, out: &mut Vec<f64>) {
    let taps: [&[f64]; K] = core::array::from_fn(|k| ph.tap(k, n));
    let mut acc = [[0.0f64; 8]; K];
    let whole = n - n % 8;
    for t0 in (0..whole).step_by(8) {
        let sv: &[f64; 8] = s[t0..t0 + 8].try_into().expect("chunk");
        for k in 0..K {
            let xv: &[f64; 8] = taps[k][t0..t0 + 8].try_into().expect("chunk");
            for i in 0..8 {
                acc[k][i] += sv[i] * xv[i];
            }
        }
    }
    for k in 0..K {
        let mut tail = 0.0;
        for t in whole..n {
            tail += s[t] * taps[k][t];
        }
        let a = &acc[k];
        out.push(((a[0] + a[4]) + (a[1] + a[5])) + ((a[2] + a[6]) + (a[3] + a[7])) + tail);
    }
}

/// `G[a][b][k] = Σ_t short[a][t] · long_pad[b][t·s + k]`.
fn weight_grad<T: Real>(
    short: &FeatureMap<T>,
    long: &FeatureMap<T>,
    kernel_width: usize,
    stride: usize,
) -> Vec<T> {
    let geo = SamePadding::new(long.length(), kernel_width, stride);
    let n = geo.short_len;
    let shorts: Vec<Vec<f64>> = (0..short.channels()).map(|a| to_f64(short.channel(a))).collect();
    let phases: Vec<Polyphase> = (0..long.channels())
        .map(|b| Polyphase::new(long.channel(b), &geo, kernel_width, stride))
        .collect();
    let mut g = Vec::with_capacity(shorts.len() * phases.len() * kernel_width);
    for s in &shorts {
        for ph in &phases {
            match kernel_width {
                3 => dots::<3>(s, ph, n, &mut g),
                5 => dots::<5>(s, ph, n, &mut g),
                7 => dots::<7>(s, ph, n, &mut g),
                _ => g.extend((0..kernel_width).map(|k| dot(s, ph.tap(k, n)))),
            }
        }
    }
    g.into_iter().map(T::from_f64).collect()
}

fn channel_sums<T: Real>(g: &FeatureMap<T>) -> Vec<T> {
    (0..g.channels())
        .map(|c| T::from_f64(g.channel(c).iter().map(|v| v.to_f64()).sum()))
        .collect()
}

fn check<T: Real>(x: &FeatureMap<T>, p: &ConvLayerParams<T>, kind: LayerKind) -> Result<()> {
    p.validate()?;
    if p.kind != kind {
        return Err(Error::Shape(format!("expected a {kind:?} layer, got {:?}", p.kind)));
    }
    if x.channels() != p.in_channels {
        return Err(Error::Shape(format!(
            "input has {} channels, layer expects {}",
            x.channels(),
            p.in_channels
        )));
    }
    Ok(())
}

/// Strided convolution with "SAME" zero padding: output length is
/// `ceil(L / stride)`, total padding `max((out - 1)·stride + K - L, 0)` with
/// the smaller half on the left.
pub fn conv1d_same<T: Real>(x: &FeatureMap<T>, p: &ConvLayerParams<T>) -> Result<FeatureMap<T>> {
    check(x, p, LayerKind::Conv)?;
    Ok(down(
        x,
        &p.weights,
        Some(&p.bias),
        p.out_channels,
        p.kernel_width,
        p.stride,
    ))
}

/// Transposed convolution, defined as the exact adjoint of [`conv1d_same`]
/// on the same weight tensor; output length is `L · stride`. The bias is
/// added per output channel after the scatter.
pub fn conv1d_transpose_same<T: Real>(
    x: &FeatureMap<T>,
    p: &ConvLayerParams<T>,
) -> Result<FeatureMap<T>> {
    check(x, p, LayerKind::Transposed)?;
    Ok(up(
        x,
        &p.weights,
        Some(&p.bias),
        p.out_channels,
        x.length() * p.stride,
        p.kernel_width,
        p.stride,
    ))
}

/// Gradients of a layer with respect to its input, weights and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvGrads<T> {
    /// `None` when the caller asked to skip it.
    pub grad_x: Option<FeatureMap<T>>,
    pub grad_w: Vec<T>,
    pub grad_b: Vec<T>,
}

fn check_upstream<T: Real>(upstream: &FeatureMap<T>, expected: (usize, usize)) -> Result<()> {
    if upstream.shape() != expected {
        return Err(Error::Shape(format!(
            "upstream gradient {:?}, forward output {:?}",
            upstream.shape(),
            expected
        )));
    }
    Ok(())
}

pub(crate) fn conv_backward<T: Real>(
    x: &FeatureMap<T>,
    p: &ConvLayerParams<T>,
    upstream: &FeatureMap<T>,
    need_input_grad: bool,
) -> Result<ConvGrads<T>> {
    check(x, p, LayerKind::Conv)?;
    let geo = SamePadding::new(x.length(), p.kernel_width, p.stride);
    check_upstream(upstream, (p.out_channels, geo.short_len))?;
    let grad_x = need_input_grad.then(|| {
        up(
            upstream,
            &p.weights,
            None,
            p.in_channels,
            x.length(),
            p.kernel_width,
            p.stride,
        )
    });
    Ok(ConvGrads {
        grad_x,
        grad_w: weight_grad(upstream, x, p.kernel_width, p.stride),
        grad_b: channel_sums(upstream),
    })
}

pub(crate) fn transpose_backward<T: Real>(
    x: &FeatureMap<T>,
    p: &ConvLayerParams<T>,
    upstream: &FeatureMap<T>,
    need_input_grad: bool,
) -> Result<ConvGrads<T>> {
    check(x, p, LayerKind::Transposed)?;
    check_upstream(upstream, (p.out_channels, x.length() * p.stride))?;
    let grad_x = need_input_grad.then(|| {
        down(
            upstream,
            &p.weights,
            None,
            p.in_channels,
            p.kernel_width,
            p.stride,
        )
    });
    Ok(ConvGrads {
        grad_x,
        grad_w: weight_grad(x, upstream, p.kernel_width, p.stride),
        grad_b: channel_sums(upstream),
    })
}

/// Backward pass of [`conv1d_same`] for upstream gradient `upstream`.
pub fn conv1d_same_grad<T: Real>(
    x: &FeatureMap<T>,
    p: &ConvLayerParams<T>,
    upstream: &FeatureMap<T>,
) -> Result<ConvGrads<T>> {
    conv_backward(x, p, upstream, true)
}

/// Backward pass of [`conv1d_transpose_same`].
pub fn conv1d_transpose_same_grad<T: Real>(
    x: &FeatureMap<T>,
    p: &ConvLayerParams<T>,
    upstream: &FeatureMap<T>,
) -> Result<ConvGrads<T>> {
    transpose_backward(x, p, upstream, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_kernel_is_identity() {
        let x = FeatureMap::new(1, 5, vec![1.0, -2.0, 3.0, 0.5, 4.0]).unwrap();
        let mut p = ConvLayerParams::<f64>::zeros(LayerKind::Conv, 1, 1, 1, 1);
        p.weights[0] = 1.0;
        assert_eq!(conv1d_same(&x, &p).unwrap(), x);
        let mut t = ConvLayerParams::<f64>::zeros(LayerKind::Transposed, 1, 1, 1, 1);
        t.weights[0] = 1.0;
        assert_eq!(conv1d_transpose_same(&x, &t).unwrap(), x);
    }

    #[test]
    fn small_strided_case() {
        // L=4, K=3, s=2: out 2, total pad 1, left 0 -> windows [1,2,3], [3,4,0].
        let x = FeatureMap::new(1, 4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut p = ConvLayerParams::<f64>::zeros(LayerKind::Conv, 1, 1, 3, 2);
        p.weights.iter_mut().for_each(|w| *w = 1.0);
        assert_eq!(conv1d_same(&x, &p).unwrap().values(), &[6.0, 7.0]);
    }

    #[test]
    fn output_lengths() {
        let x = FeatureMap::<f32>::zeros(1, 4096);
        let p = ConvLayerParams::zeros(LayerKind::Conv, 1, 2, 5, 2);
        assert_eq!(conv1d_same(&x, &p).unwrap().length(), 2048);
        let x = FeatureMap::<f32>::zeros(3, 256);
        let p = ConvLayerParams::zeros(LayerKind::Transposed, 3, 2, 5, 2);
        assert_eq!(conv1d_transpose_same(&x, &p).unwrap().shape(), (2, 512));
    }

    #[test]
    fn channel_mismatch_rejected() {
        let x = FeatureMap::<f64>::zeros(2, 8);
        let p = ConvLayerParams::zeros(LayerKind::Conv, 3, 1, 3, 1);
        assert!(matches!(conv1d_same(&x, &p), Err(Error::Shape(_))));
        let p = ConvLayerParams::zeros(LayerKind::Transposed, 3, 1, 3, 1);
        assert!(conv1d_transpose_same(&x, &p).is_err());
        let p = ConvLayerParams::zeros(LayerKind::Transposed, 2, 1, 3, 1);
        assert!(conv1d_same(&x, &p).is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let x = FeatureMap::new(2, 6, (0..12).map(|i| i as f64 * 0.1).collect()).unwrap();
        let mut p = ConvLayerParams::<f64>::zeros(LayerKind::Conv, 2, 3, 3, 2);
        p.weights.iter_mut().enumerate().for_each(|(i, w)| *w = i as f64);
        let g = conv1d_same_grad(&x, &p, &FeatureMap::zeros(3, 3)).unwrap();
        assert!(g.grad_w.iter().chain(&g.grad_b).all(|&v| v == 0.0));
        assert!(g.grad_x.unwrap().values().iter().all(|&v| v == 0.0));
        assert!(conv1d_same_grad(&x, &p, &FeatureMap::zeros(3, 4)).is_err());
    }
}
