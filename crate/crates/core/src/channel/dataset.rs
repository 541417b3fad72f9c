use alloc::format;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng as _;

use super::{acquire, apply_channel, AcquisitionConfig, ChannelModel};
use crate::par;
use crate::rng::{derive_seed, rng_from, stream};
use crate::signals::{
    gen_costas, gen_lfm, normalize, primitive_roots, sample_target_scene, synthesize_echo_raw,
    Waveform, DEFAULT_PEAK, DEFAULT_RECORD_LEN, DEFAULT_SAMPLE_RATE,
};
use crate::{Error, Result};

/// Transmit waveform family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum WaveformCategory {
    Lfm,
    Costas,
}

impl WaveformCategory {
    pub fn name(self) -> &'static str {
        match self {
            WaveformCategory::Lfm => "lfm",
            WaveformCategory::Costas => "costas",
        }
    }
}

/// Fraction of the record occupied by the transmit pulse; the rest leaves
/// room for the up-to-10-m range spread of the scatterers.
const PULSE_FRACTION: f64 = 0.625;
const LFM_BANDWIDTH_HZ: f64 = 3.0e9;
const COSTAS_BANDWIDTH_HZ: f64 = 3.5e9;
const START_FREQ_RANGE_HZ: (f64, f64) = (0.1e9, 0.3e9);
const COSTAS_PRIMES: [u64; 4] = [5, 7, 11, 13];
/// Redraws allowed when every scatterer lands beyond a short record.
const MAX_SCENE_DRAWS: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetConfig {
    pub category: WaveformCategory,
    pub record_len: usize,
    pub sample_rate: f64,
    pub peak: f64,
    pub count: usize,
    /// `(train, validation)` example counts; must sum to `count`.
    pub split: (usize, usize),
    pub master_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            category: WaveformCategory::Lfm,
            record_len: DEFAULT_RECORD_LEN,
            sample_rate: DEFAULT_SAMPLE_RATE,
            peak: DEFAULT_PEAK,
            count: 250,
            split: (200, 50),
            master_seed: 0,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.split.0 + self.split.1 != self.count {
            return Err(Error::invalid("split", "train + validation must equal count"));
        }
        if self.record_len == 0 {
            return Err(Error::invalid("record_len", "must be positive"));
        }
        Ok(())
    }
}

/// One supervised pair: the generated ground truth and what the link
/// delivered for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub clean: Vec<f32>,
    pub distorted: Vec<f32>,
}

/// Examples `0..train_count` form the training split, the rest validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub sample_rate: f64,
    pub length: usize,
    pub train_count: usize,
    pub examples: Vec<Example>,
}

impl Dataset {
    pub fn train(&self) -> &[Example] {
        &self.examples[..self.train_count]
    }

    pub fn validation(&self) -> &[Example] {
        &self.examples[self.train_count..]
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_count > self.examples.len() {
            return Err(Error::invalid("train_count", "exceeds example count"));
        }
        for ex in &self.examples {
            for v in [&ex.clean, &ex.distorted] {
                if v.len() != self.length {
                    return Err(Error::LengthMismatch {
                        left: v.len(),
                        right: self.length,
                    });
                }
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(i));
                }
            }
        }
        Ok(())
    }
}

/// Draws a freshly parameterized transmit pulse, zero-padded to `record_len`.
pub fn draw_transmit(
    category: WaveformCategory,
    record_len: usize,
    sample_rate: f64,
    seed: u64,
) -> Result<Waveform> {
    let mut rng = rng_from(seed, &[stream::WAVEFORM]);
    let duration = PULSE_FRACTION * record_len as f64 / sample_rate;
    let f0 = rng.random_range(START_FREQ_RANGE_HZ.0..=START_FREQ_RANGE_HZ.1);
    let tx = match category {
        WaveformCategory::Lfm => gen_lfm(f0, f0 + LFM_BANDWIDTH_HZ, duration, sample_rate, 1.0)?,
        WaveformCategory::Costas => {
            let p = *COSTAS_PRIMES.choose(&mut rng).expect("nonempty");
            let roots = primitive_roots(p);
            let g = *roots.choose(&mut rng).expect("every prime has a primitive root");
            let spacing = COSTAS_BANDWIDTH_HZ / (p - 2) as f64;
            gen_costas(p, g, f0, spacing, duration / (p - 1) as f64, sample_rate)?
        }
    };
    tx.resized(record_len)
}

fn build_example(
    cfg: &DatasetConfig,
    model: &ChannelModel,
    acq: &AcquisitionConfig,
    index: usize,
) -> Result<Example> {
    let seed = derive_seed(cfg.master_seed, &[index as u64]);
    let tx = draw_transmit(cfg.category, cfg.record_len, cfg.sample_rate, seed)?;
    let mut echo = None;
    for attempt in 0..MAX_SCENE_DRAWS {
        let scene = sample_target_scene(derive_seed(seed, &[stream::SCENE, attempt]));
        let raw = synthesize_echo_raw(&tx, &scene)?;
        if raw.peak() > 1e-3 * tx.peak() {
            echo = Some(raw);
            break;
        }
    }
    let echo = echo.ok_or_else(|| Error::invalid("record_len", "no scene produced an echo inside the record"))?;
    let mut clean = normalize(&echo, cfg.peak)?;
    clean.label = format!("{} #{index}", cfg.category.name());
    let shot = AcquisitionConfig {
        rng_seed: derive_seed(cfg.master_seed, &[stream::NOISE, acq.rng_seed, index as u64]),
        ..*acq
    };
    let distorted = acquire(&apply_channel(&clean, model)?, &shot)?;
    let to_f32 = |w: &Waveform| w.samples().iter().map(|&x| x as f32).collect();
    Ok(Example {
        clean: to_f32(&clean),
        distorted: to_f32(&distorted),
    })
}

/// Generates `cfg.count` (clean, distorted) pairs. Example `i` depends only
/// on `(cfg.master_seed, i)`, so the result is independent of scheduling.
pub fn build_dataset(
    cfg: &DatasetConfig,
    model: &ChannelModel,
    acq: &AcquisitionConfig,
) -> Result<Dataset> {
    cfg.validate()?;
    model.validate()?;
    acq.validate()?;
    let examples = par::map_indices(cfg.count, |i| build_example(cfg, model, acq, i))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        sample_rate: cfg.sample_rate,
        length: cfg.record_len,
        train_count: cfg.split.0,
        examples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(category: WaveformCategory) -> DatasetConfig {
        DatasetConfig {
            category,
            record_len: 1024,
            count: 10,
            split: (8, 2),
            master_seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn split_and_invariants() {
        let ds = build_dataset(
            &small(WaveformCategory::Lfm),
            &ChannelModel::pps_like(),
            &AcquisitionConfig::default(),
        )
        .unwrap();
        ds.validate().unwrap();
        assert_eq!(ds.train().len(), 8);
        assert_eq!(ds.validation().len(), 2);
        for ex in &ds.examples {
            let peak = ex.clean.iter().fold(0.0f32, |m, x| m.max(x.abs()));
            assert_eq!(peak, 0.9f32);
        }
    }

    #[test]
    fn deterministic_and_costas_works() {
        let cfg = small(WaveformCategory::Costas);
        let m = ChannelModel::padc_like();
        let a = build_dataset(&cfg, &m, &AcquisitionConfig::default()).unwrap();
        let b = build_dataset(&cfg, &m, &AcquisitionConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_split_rejected() {
        let mut cfg = small(WaveformCategory::Lfm);
        cfg.split = (8, 3);
        assert!(build_dataset(&cfg, &ChannelModel::pps_like(), &AcquisitionConfig::default()).is_err());
    }

    #[test]
    fn pairs_are_index_aligned() {
        let ds = build_dataset(
            &small(WaveformCategory::Lfm),
            &ChannelModel::pps_like(),
            &AcquisitionConfig::default(),
        )
        .unwrap();
        let corr = |a: &[f32], b: &[f32]| -> f64 {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
            let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum();
            let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum();
            dot / (na * nb).sqrt()
        };
        for i in 0..4 {
            let own = corr(&ds.examples[i].clean, &ds.examples[i].distorted);
            for j in 0..4 {
                if i != j {
                    assert!(own > corr(&ds.examples[i].clean, &ds.examples[j].distorted));
                }
            }
        }
    }
}
