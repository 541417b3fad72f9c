//! Transmit waveforms: linear FM chirps and Welch-Costas frequency hops.

use alloc::format;
use alloc::vec::Vec;

use super::Waveform;
use crate::math::{round, sin, PI};
use crate::{Error, Result};

fn check_nyquist(freq_hz: f64, sample_rate: f64) -> Result<()> {
    let nyquist_hz = sample_rate / 2.0;
    if !(freq_hz >= 0.0) {
        return Err(Error::invalid("frequency", "must be non-negative"));
    }
    if freq_hz >= nyquist_hz {
        return Err(Error::Aliasing { freq_hz, nyquist_hz });
    }
    Ok(())
}

fn check_rate(sample_rate: f64) -> Result<()> {
    if sample_rate.is_finite() && sample_rate > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("sample_rate", "must be positive and finite"))
    }
}

/// Linear FM pulse sweeping `f_start` to `f_stop` over `duration` seconds.
///
/// `x[n] = A sin(2π(f0 t + (f1 - f0)/(2T) t²))` with `t = n / fs`.
pub fn gen_lfm(
    f_start: f64,
    f_stop: f64,
    duration: f64,
    sample_rate: f64,
    amplitude: f64,
) -> Result<Waveform> {
    check_rate(sample_rate)?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid("duration", "must be positive"));
    }
    check_nyquist(f_start, sample_rate)?;
    check_nyquist(f_stop, sample_rate)?;
    let len = round(duration * sample_rate) as usize;
    if len == 0 {
        return Err(Error::invalid("duration", "shorter than one sample"));
    }
    let rate = (f_stop - f_start) / (2.0 * duration);
    let samples = (0..len)
        .map(|n| {
            let t = n as f64 / sample_rate;
            amplitude * sin(2.0 * PI * (f_start * t + rate * t * t))
        })
        .collect();
    Waveform::new(
        samples,
        sample_rate,
        format!("lfm {f_start:.4e}->{f_stop:.4e} Hz"),
    )
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result
}

/// True when `g` generates the multiplicative group modulo the prime `p`.
pub fn is_primitive_root(g: u64, p: u64) -> bool {
    if !is_prime(p) || g % p == 0 {
        return false;
    }
    let order = p - 1;
    let mut n = order;
    let mut f = 2;
    while n > 1 {
        if n % f == 0 {
            if pow_mod(g, order / f, p) == 1 {
                return false;
            }
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    true
}

/// All primitive roots of `p` in ascending order.
pub fn primitive_roots(p: u64) -> Vec<u64> {
    (1..p).filter(|&g| is_primitive_root(g, p)).collect()
}

/// Welch-Costas sequence `a_i = g^i mod p`, `i = 1..p-1`. Values lie in `1..p`.
pub fn costas_sequence(prime: u64, primitive_root: u64) -> Result<Vec<u64>> {
    if prime > u32::MAX as u64 {
        return Err(Error::invalid("prime", "too large"));
    }
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if !is_primitive_root(primitive_root, prime) {
        return Err(Error::NotPrimitiveRoot {
            root: primitive_root,
            prime,
        });
    }
    Ok((1..prime).map(|i| pow_mod(primitive_root, i, prime)).collect())
}

/// Costas frequency-hopping pulse. Hop `i` plays `base + (a_i - 1) * spacing`
/// for `hop_duration`; phase is accumulated across hops, never reset.
pub fn gen_costas(
    prime: u64,
    primitive_root: u64,
    base_freq: f64,
    hop_spacing: f64,
    hop_duration: f64,
    sample_rate: f64,
) -> Result<Waveform> {
    check_rate(sample_rate)?;
    let seq = costas_sequence(prime, primitive_root)?;
    if !(hop_duration.is_finite() && hop_duration > 0.0) {
        return Err(Error::invalid("hop_duration", "must be positive"));
    }
    let freqs: Vec<f64> = seq
        .iter()
        .map(|&a| base_freq + (a - 1) as f64 * hop_spacing)
        .collect();
    for &f in &freqs {
        check_nyquist(f, sample_rate)?;
    }
    let total = round(hop_duration * sample_rate * freqs.len() as f64) as usize;
    if total == 0 {
        return Err(Error::invalid("hop_duration", "shorter than one sample"));
    }
    let dt = 1.0 / sample_rate;
    let mut phase = 0.0f64;
    let samples = (0..total)
        .map(|n| {
            let hop = n * freqs.len() / total;
            let s = sin(phase);
            phase += 2.0 * PI * freqs[hop] * dt;
            // keep the accumulator small; exact in the sense that sin is 2π-periodic
            if phase > 2.0 * PI {
                phase -= 2.0 * PI;
            }
            s
        })
        .collect();
    Waveform::new(
        samples,
        sample_rate,
        format!("costas p={prime} g={primitive_root}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lfm_starts_at_zero_and_degenerates_to_tone() {
        let w = gen_lfm(1e9, 1e9, 100e-9, 20e9, 0.7).unwrap();
        assert_eq!(w.samples()[0], 0.0);
        assert_eq!(w.len(), 2000);
        for (n, &x) in w.samples().iter().enumerate() {
            let want = 0.7 * sin(2.0 * PI * 1e9 * n as f64 / 20e9);
            assert!((x - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lfm_rejects_aliasing_and_bad_duration() {
        assert!(matches!(
            gen_lfm(0.0, 10e9, 1e-7, 20e9, 1.0),
            Err(Error::Aliasing { .. })
        ));
        assert!(gen_lfm(0.0, 1e9, 0.0, 20e9, 1.0).is_err());
        assert!(gen_lfm(0.0, 1e9, -1.0, 20e9, 1.0).is_err());
    }

    #[test]
    fn small_costas_sequences() {
        assert_eq!(costas_sequence(5, 2).unwrap(), vec![2, 4, 3, 1]);
        assert_eq!(costas_sequence(3, 2).unwrap(), vec![2, 1]);
        assert_eq!(costas_sequence(6, 5), Err(Error::NotPrime(6)));
        assert_eq!(
            costas_sequence(7, 2),
            Err(Error::NotPrimitiveRoot { root: 2, prime: 7 })
        );
        assert_eq!(primitive_roots(7), vec![3, 5]);
    }

    #[test]
    fn costas_hop_count_and_nyquist() {
        let w = gen_costas(5, 2, 1e9, 0.5e9, 10e-9, 20e9).unwrap();
        assert_eq!(w.len(), 800);
        assert!(matches!(
            gen_costas(5, 2, 8e9, 1e9, 10e-9, 20e9),
            Err(Error::Aliasing { .. })
        ));
    }
}
