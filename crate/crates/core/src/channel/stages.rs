use alloc::vec::Vec;

use crate::math::{sin, PI};
use crate::signals::{interp, Waveform};
use crate::{Error, Result};

use super::InterleaveMismatch;

/// Memoryless sine transfer `y = sin(βx) / sin(β)`.
///
/// Odd-symmetric, unit gain at full scale, expanding below it. Produces odd
/// harmonics whose levels follow the Jacobi-Anger expansion.
pub fn apply_nonlinearity(w: &Waveform, beta: f64) -> Result<Waveform> {
    check_beta(beta)?;
    let norm = sin(beta);
    w.with_samples(w.samples().iter().map(|&x| sin(beta * x) / norm).collect())
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= PI / 2.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "nonlinearity_beta",
            "must lie in (0, π/2] (monotone region of the transfer)",
        ))
    }
}

/// Linear convolution with "same" alignment: output length equals input
/// length and the tap at index `(len - 1) / 2` is the zero-lag tap.
pub fn apply_fir(w: &Waveform, taps: &[f64]) -> Result<Waveform> {
    check_taps(taps)?;
    w.with_samples(fir_same(w.samples(), taps))
}

pub(crate) fn check_taps(taps: &[f64]) -> Result<()> {
    if taps.is_empty() {
        return Err(Error::invalid("filter_taps", "must be nonempty"));
    }
    if let Some(i) = taps.iter().position(|t| !t.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

fn fir_same(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let n = x.len() as i64;
    let centre = (taps.len() as i64 - 1) / 2;
    (0..n)
        .map(|i| {
            taps.iter()
                .enumerate()
                .map(|(k, &h)| {
                    let j = i + centre - k as i64;
                    if (0..n).contains(&j) {
                        h * x[j as usize]
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

/// Hamming-windowed sinc low-pass with unit DC gain. `cutoff` is a fraction
/// of the Nyquist frequency.
pub fn design_lowpass(num_taps: usize, cutoff: f64) -> Result<Vec<f64>> {
    if num_taps == 0 {
        return Err(Error::invalid("num_taps", "must be positive"));
    }
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(Error::invalid("cutoff", "must be in (0, 1] of Nyquist"));
    }
    let m = (num_taps - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|k| {
            let t = k as f64 - m;
            let sinc = if t == 0.0 {
                cutoff
            } else {
                sin(PI * cutoff * t) / (PI * t)
            };
            let window = if num_taps == 1 {
                1.0
            } else {
                0.54 - 0.46 * crate::math::cos(2.0 * PI * k as f64 / (num_taps - 1) as f64)
            };
            sinc * window
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= dc);
    Ok(taps)
}

/// Time-interleaved digitizer mismatch: sample `n` comes from sub-channel
/// `m = n mod M`, which sees the input delayed by `skews[m]` samples, scaled
/// by `gains[m]` and shifted by `offsets[m]`.
pub fn apply_interleave_mismatch(w: &Waveform, params: &InterleaveMismatch) -> Result<Waveform> {
    params.validate()?;
    let m = params.num_channels;
    let delayed: Vec<Vec<f64>> = params
        .skews
        .iter()
        .map(|&s| interp::delay(w.samples(), s))
        .collect();
    let out = (0..w.len())
        .map(|n| {
            let ch = n % m;
            params.gains[ch] * delayed[ch][n] + params.offsets[ch]
        })
        .collect();
    w.with_samples(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn wave(v: Vec<f64>) -> Waveform {
        Waveform::new(v, 20e9, "t").unwrap()
    }

    #[test]
    fn nonlinearity_small_angle_and_full_scale() {
        let x: Vec<f64> = (0..101).map(|i| -1.0 + 0.02 * i as f64).collect();
        let y = apply_nonlinearity(&wave(x.clone()), 1e-3).unwrap();
        for (a, b) in x.iter().zip(y.samples()) {
            assert!((a - b).abs() < 1e-6);
        }
        for beta in [0.1, 0.7, 1.2, PI / 2.0] {
            let y = apply_nonlinearity(&wave(vec![1.0, -1.0]), beta).unwrap();
            assert_eq!(y.samples(), &[1.0, -1.0]);
        }
        assert!(apply_nonlinearity(&wave(vec![0.0]), 0.0).is_err());
        assert!(apply_nonlinearity(&wave(vec![0.0]), 1.6).is_err());
    }

    #[test]
    fn fir_identity_impulse_and_dc() {
        let x = vec![0.0, 0.0, 1.0, 0.0, 0.0];
        assert_eq!(apply_fir(&wave(x.clone()), &[1.0]).unwrap().samples(), &x[..]);
        let y = apply_fir(&wave(x.clone()), &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(y.samples(), &[0.0, 0.25, 0.5, 0.25, 0.0]);
        let taps = [0.1, 0.3, -0.2, 0.4];
        let y = apply_fir(&wave(vec![2.0; 16]), &taps).unwrap();
        let sum: f64 = taps.iter().sum();
        for v in &y.samples()[3..13] {
            assert!((v - 2.0 * sum).abs() < 1e-15);
        }
        assert!(apply_fir(&wave(x), &[]).is_err());
    }

    #[test]
    fn fir_matches_naive_full_convolution() {
        let x: Vec<f64> = (0..40).map(|i| sin(0.37 * i as f64) + 0.1 * i as f64).collect();
        let taps = design_lowpass(7, 0.4).unwrap();
        let full: Vec<f64> = (0..x.len() + taps.len() - 1)
            .map(|n| {
                (0..taps.len())
                    .filter(|&k| n >= k && n - k < x.len())
                    .map(|k| taps[k] * x[n - k])
                    .sum()
            })
            .collect();
        let y = apply_fir(&wave(x.clone()), &taps).unwrap();
        for i in 0..x.len() {
            assert!((y.samples()[i] - full[i + 3]).abs() < 1e-14);
        }
    }

    #[test]
    fn lowpass_has_unit_dc_gain_and_symmetry() {
        let taps = design_lowpass(31, 0.35).unwrap();
        assert!((taps.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for k in 0..31 {
            assert!((taps[k] - taps[30 - k]).abs() < 1e-16);
        }
    }

    #[test]
    fn interleave_identity() {
        let x: Vec<f64> = (0..64).map(|i| sin(0.3 * i as f64)).collect();
        let p = InterleaveMismatch {
            num_channels: 4,
            gains: vec![1.0; 4],
            offsets: vec![0.0; 4],
            skews: vec![0.0; 4],
        };
        let y = apply_interleave_mismatch(&wave(x.clone()), &p).unwrap();
        assert_eq!(y.samples(), &x[..]);
        let one = InterleaveMismatch::identity(1);
        let y = apply_interleave_mismatch(&wave(x.clone()), &one).unwrap();
        assert_eq!(y.samples(), &x[..]);
    }
}
