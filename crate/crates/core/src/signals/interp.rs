//! Band-limited fractional-delay interpolation (33-tap Kaiser-windowed sinc).

use alloc::vec::Vec;

use crate::math::{bessel_i0, floor, sin, sqrt, PI};

/// Number of taps in the interpolation kernel.
pub const TAPS: usize = 33;
const HALF: i64 = (TAPS as i64 - 1) / 2;
const KAISER_BETA: f64 = 8.0;
// Slightly wider than HALF so the outermost tap keeps a nonzero weight for
// every fractional offset.
const WINDOW_HALF_WIDTH: f64 = HALF as f64 + 1.0;

/// Interpolation weights for one fractional position.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    /// Index of the sample weighted by `weights[0]`.
    first: i64,
    weights: [f64; TAPS],
    /// Set when the position falls exactly on a sample.
    exact: Option<i64>,
}

impl Kernel {
    /// Kernel that reconstructs the signal at fractional sample index `u`.
    pub fn at(u: f64) -> Self {
        let base = floor(u);
        let frac = u - base;
        let base = base as i64;
        if frac == 0.0 {
            return Self {
                first: base,
                weights: [0.0; TAPS],
                exact: Some(base),
            };
        }
        let s = sin(PI * frac);
        let norm = 1.0 / bessel_i0(KAISER_BETA);
        let mut weights = [0.0; TAPS];
        for (i, w) in weights.iter_mut().enumerate() {
            let m = i as i64 - HALF;
            let d = frac - m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let sinc = sign * s / (PI * d);
            let r = d / WINDOW_HALF_WIDTH;
            let window = bessel_i0(KAISER_BETA * sqrt(1.0 - r * r)) * norm;
            *w = sinc * window;
        }
        Self {
            first: base - HALF,
            weights,
            exact: None,
        }
    }

    /// Applies the kernel; samples outside `x` count as zero.
    pub fn apply(&self, x: &[f64]) -> f64 {
        let n = x.len() as i64;
        if let Some(k) = self.exact {
            return if (0..n).contains(&k) { x[k as usize] } else { 0.0 };
        }
        let lo = self.first.max(0);
        let hi = (self.first + TAPS as i64).min(n);
        let mut acc = 0.0;
        for k in lo..hi {
            acc += self.weights[(k - self.first) as usize] * x[k as usize];
        }
        acc
    }
}

/// Value of the band-limited reconstruction of `x` at fractional index `u`.
pub fn sample_at(x: &[f64], u: f64) -> f64 {
    Kernel::at(u).apply(x)
}

/// `y[n] = x(n - delay)` for a constant (possibly fractional) delay in samples.
pub fn delay(x: &[f64], delay: f64) -> Vec<f64> {
    let whole = floor(delay);
    let kernel = Kernel::at(-(delay - whole));
    let shift = whole as i64;
    // The kernel was built for position -frac; offset it by n - whole.
    (0..x.len() as i64)
        .map(|n| {
            let mut k = kernel;
            k.first += n - shift;
            if let Some(e) = k.exact.as_mut() {
                *e += n - shift;
            }
            k.apply(x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::cos;

    #[test]
    fn integer_positions_are_exact() {
        let x = [1.0, -2.0, 3.5];
        assert_eq!(sample_at(&x, 1.0), -2.0);
        assert_eq!(sample_at(&x, 5.0), 0.0);
        assert_eq!(delay(&x, 0.0), x.to_vec());
        assert_eq!(delay(&x, 1.0), [0.0, 1.0, -2.0].to_vec());
    }

    #[test]
    fn reconstructs_in_band_tone() {
        // 0.3 cycles/sample is well inside the kernel's passband.
        let f = 0.3;
        let x: Vec<f64> = (0..400).map(|n| cos(2.0 * PI * f * n as f64)).collect();
        for &u in &[100.25, 200.5, 250.9] {
            let want = cos(2.0 * PI * f * u);
            assert!((sample_at(&x, u) - want).abs() < 2e-3, "u={u}");
        }
        let d = delay(&x, 0.4);
        for n in 50..350 {
            let want = cos(2.0 * PI * f * (n as f64 - 0.4));
            assert!((d[n] - want).abs() < 2e-3);
        }
    }
}
