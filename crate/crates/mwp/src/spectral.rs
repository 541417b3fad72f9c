//! Short-time spectra and the analytic signal.

use std::f64::consts::PI;

use mwp_core::Error;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub const DEFAULT_WINDOW: usize = 256;
pub const DEFAULT_HOP: usize = 64;

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect()
}

pub fn frame_count(len: usize, window_len: usize, hop: usize) -> usize {
    (len - window_len) / hop + 1
}

/// One-sided bin centres `k·fs/N` for `k = 0..=N/2`.
pub fn bin_frequencies(window_len: usize, sample_rate: f64) -> Vec<f64> {
    (0..=window_len / 2)
        .map(|k| k as f64 * sample_rate / window_len as f64)
        .collect()
}

/// Hann-windowed DFT magnitudes, frames × `window_len/2 + 1` bins.
pub fn stft(x: &[f64], window_len: usize, hop: usize) -> Result<Vec<Vec<f64>>, Error> {
    if window_len == 0 || window_len > x.len() {
        return Err(Error::InvalidParameter {
            name: "window_len",
            reason: format!("must be between 1 and the record length {}", x.len()),
        });
    }
    if hop == 0 {
        return Err(Error::InvalidParameter {
            name: "hop",
            reason: "must be at least 1".into(),
        });
    }
    let w = hann(window_len);
    let fft = FftPlanner::new().plan_fft_forward(window_len);
    let mut buf = vec![Complex::default(); window_len];
    Ok((0..frame_count(x.len(), window_len, hop))
        .map(|f| {
            let seg = &x[f * hop..f * hop + window_len];
            for ((b, &s), &wi) in buf.iter_mut().zip(seg).zip(&w) {
                *b = Complex::new(s * wi, 0.0);
            }
            fft.process(&mut buf);
            buf[..=window_len / 2].iter().map(|c| c.norm()).collect()
        })
        .collect())
}

/// Energy of one frame recovered from its one-sided magnitudes.
pub fn frame_energy(mags: &[f64], window_len: usize) -> f64 {
    let sq = |v: f64| v * v;
    let mut e = sq(mags[0]);
    let last = mags.len() - 1;
    for (k, &m) in mags.iter().enumerate().skip(1) {
        e += if window_len % 2 == 0 && k == last { sq(m) } else { 2.0 * sq(m) };
    }
    e / window_len as f64
}

/// `x + j·H{x}` via the FFT: negative frequencies removed, positive doubled.
pub fn analytic(x: &[f64]) -> Vec<Complex<f64>> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let scale = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *b *= scale / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}
