use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A real, uniformly sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: f64,
    /// Free-form provenance, e.g. `"lfm-echo seed=7"`.
    pub label: String,
}

impl Waveform {
    /// Builds a waveform, rejecting empty or non-finite sample sets.
    pub fn new(samples: Vec<f64>, sample_rate: f64, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("samples", "waveform must have at least one sample"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::invalid("sample_rate", "must be positive and finite"));
        }
        Ok(Self {
            samples,
            sample_rate,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Same metadata, new samples. Length may change; samples are re-validated.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate, self.label.clone())
    }

    /// Zero-pads or truncates to `len` samples.
    pub fn resized(&self, len: usize) -> Result<Self> {
        let mut s = self.samples.clone();
        s.resize(len, 0.0);
        self.with_samples(s)
    }
}

/// Scales `w` so that its largest magnitude equals `peak` exactly.
pub fn normalize(w: &Waveform, peak: f64) -> Result<Waveform> {
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::invalid("peak", "must be positive and finite"));
    }
    let max = w.peak();
    if max == 0.0 {
        return Err(Error::ZeroWaveform);
    }
    let scale = peak / max;
    let samples = w
        .samples
        .iter()
        .map(|&x| {
            if x.abs() == max {
                // pin the extreme samples so the peak is exact after rounding
                peak.copysign(x)
            } else {
                (x * scale).clamp(-peak, peak)
            }
        })
        .collect();
    w.with_samples(samples)
}
