//! Defective analog link: sine-law nonlinearity, FIR band limit and
//! time-interleaved digitizer mismatch, followed by noisy averaged
//! acquisition.

mod acquire;
mod dataset;
mod stages;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

pub use acquire::{acquire, AcquisitionConfig, DEFAULT_AVG_COUNT, DEFAULT_NOISE_RMS};
pub use dataset::{build_dataset, Dataset, DatasetConfig, Example, WaveformCategory};
pub use stages::{apply_fir, apply_interleave_mismatch, apply_nonlinearity, design_lowpass};

use crate::signals::Waveform;
use crate::{Error, Result};

/// Per-sub-channel gain, offset and timing skew of an interleaved digitizer.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterleaveMismatch {
    pub num_channels: usize,
    pub gains: Vec<f64>,
    pub offsets: Vec<f64>,
    /// Fractional-sample delays.
    pub skews: Vec<f64>,
}

impl InterleaveMismatch {
    pub fn identity(num_channels: usize) -> Self {
        Self {
            num_channels,
            gains: vec![1.0; num_channels],
            offsets: vec![0.0; num_channels],
            skews: vec![0.0; num_channels],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_channels;
        if m == 0 {
            return Err(Error::invalid("num_channels", "must be at least 1"));
        }
        if self.gains.len() != m || self.offsets.len() != m || self.skews.len() != m {
            return Err(Error::invalid(
                "interleave",
                "gains, offsets and skews must each have num_channels entries",
            ));
        }
        let all = self.gains.iter().chain(&self.offsets).chain(&self.skews);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::invalid("interleave", "parameters must be finite"));
        }
        Ok(())
    }
}

/// Parametric stand-in for the composed link response. Stages run in the
/// order nonlinearity, filter, interleave; a `None` stage is skipped.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelModel {
    pub preset_name: String,
    pub nonlinearity_beta: Option<f64>,
    pub filter_taps: Vec<f64>,
    pub interleave: Option<InterleaveMismatch>,
}

pub const PPS_LIKE: &str = "pps-like";
pub const PADC_LIKE: &str = "padc-like";

impl ChannelModel {
    /// Pass-through link.
    pub fn identity() -> Self {
        Self {
            preset_name: "identity".to_string(),
            nonlinearity_beta: None,
            filter_taps: vec![1.0],
            interleave: None,
        }
    }

    /// Compressive modulator-like nonlinearity plus a 31-tap low-pass at
    /// 0.35 of Nyquist.
    pub fn pps_like() -> Self {
        Self {
            preset_name: PPS_LIKE.to_string(),
            nonlinearity_beta: Some(1.2),
            filter_taps: design_lowpass(31, 0.35).expect("static design is valid"),
            interleave: None,
        }
    }

    /// `pps_like` plus a four-way interleave with ±5 % gain, ±0.01 offset
    /// and ±0.1-sample skew mismatch.
    pub fn padc_like() -> Self {
        Self {
            preset_name: PADC_LIKE.to_string(),
            interleave: Some(InterleaveMismatch {
                num_channels: 4,
                gains: vec![1.05, 0.95, 1.03, 0.97],
                offsets: vec![0.01, -0.01, 0.005, -0.005],
                skews: vec![0.1, -0.1, 0.05, -0.05],
            }),
            ..Self::pps_like()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            PPS_LIKE => Some(Self::pps_like()),
            PADC_LIKE => Some(Self::padc_like()),
            "identity" => Some(Self::identity()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(beta) = self.nonlinearity_beta {
            stages::check_beta(beta)?;
        }
        stages::check_taps(&self.filter_taps)?;
        if let Some(il) = &self.interleave {
            il.validate()?;
        }
        Ok(())
    }
}

/// Runs `w` through every present stage of `model`. No renormalization: the
/// distorted amplitude is part of what the network has to learn.
pub fn apply_channel(w: &Waveform, model: &ChannelModel) -> Result<Waveform> {
    model.validate()?;
    let mut out = match model.nonlinearity_beta {
        Some(beta) => apply_nonlinearity(w, beta)?,
        None => w.clone(),
    };
    if model.filter_taps != [1.0] {
        out = apply_fir(&out, &model.filter_taps)?;
    }
    if let Some(il) = &model.interleave {
        out = apply_interleave_mismatch(&out, il)?;
    }
    Ok(out)
}
