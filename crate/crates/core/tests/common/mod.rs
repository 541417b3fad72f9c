//! FFT oracles shared by the integration tests.
#![allow(dead_code)]

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub fn spectrum(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

/// Analytic signal by zeroing negative frequencies.
pub fn analytic(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let w = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *c *= w / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Instantaneous frequency (Hz) from phase differences of the analytic signal.
pub fn inst_freq(x: &[f64], fs: f64) -> Vec<f64> {
    let z = analytic(x);
    z.windows(2)
        .map(|w| (w[1] * w[0].conj()).arg() * fs / (2.0 * std::f64::consts::PI))
        .collect()
}

pub fn db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

/// Bessel function of the first kind by its power series.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    for m in 0..40 {
        sum += term;
        term *= -(x / 2.0).powi(2) / ((m + 1) as f64 * (m + 1 + n) as f64);
    }
    sum
}
