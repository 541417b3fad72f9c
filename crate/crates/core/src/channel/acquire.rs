use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::math::{pow, sqrt};
use crate::rng::{rng_from, stream};
use crate::signals::{Waveform, DEFAULT_PEAK};
use crate::{Error, Result};

/// Per-shot noise that sits 28 dB below a full-scale (peak 0.9) sine.
pub const DEFAULT_NOISE_RMS: f64 = 0.025_335_385_194_363;
/// Shots averaged per stored record.
pub const DEFAULT_AVG_COUNT: u32 = 128;

/// Noise and averaging of one acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AcquisitionConfig {
    /// Standard deviation of the additive white Gaussian noise of one shot.
    pub noise_rms: f64,
    pub avg_count: u32,
    pub rng_seed: u64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            noise_rms: DEFAULT_NOISE_RMS,
            avg_count: DEFAULT_AVG_COUNT,
            rng_seed: 0,
        }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_rms.is_finite() && self.noise_rms >= 0.0) {
            return Err(Error::invalid("noise_rms", "must be finite and non-negative"));
        }
        if self.avg_count == 0 {
            return Err(Error::invalid("avg_count", "must be at least 1"));
        }
        Ok(())
    }

    /// Residual noise power after averaging, `σ² / K`.
    pub fn residual_noise_power(&self) -> f64 {
        self.noise_rms * self.noise_rms / self.avg_count as f64
    }

    /// Per-shot rms that puts the noise `snr_db` below a full-scale sine of
    /// the default peak.
    pub fn noise_rms_for_snr_db(snr_db: f64) -> f64 {
        DEFAULT_PEAK / sqrt(2.0) * pow(10.0, -snr_db / 20.0)
    }
}

/// Averages `avg_count` noisy copies of `w`: `w + (1/K) Σ n_k` with each
/// `n_k` white Gaussian of standard deviation `noise_rms`.
pub fn acquire(w: &Waveform, cfg: &AcquisitionConfig) -> Result<Waveform> {
    cfg.validate()?;
    if cfg.noise_rms == 0.0 {
        return Ok(w.clone());
    }
    let mut rng = rng_from(cfg.rng_seed, &[stream::NOISE]);
    let k = cfg.avg_count;
    let scale = cfg.noise_rms / k as f64;
    let out = w
        .samples()
        .iter()
        .map(|&x| {
            let mut sum = 0.0f64;
            for _ in 0..k {
                sum += rng.sample::<f64, _>(StandardNormal);
            }
            x + scale * sum
        })
        .collect();
    w.with_samples(out)
}
