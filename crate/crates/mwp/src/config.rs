//! Run configuration: one TOML file covering every stage, written next to
//! each output as `<output>.config.toml`.
//!
//! Every field has a default, so an empty file is a valid config. The
//! top-level `master_seed` is copied into every stage by [`RunConfig::resolved`];
//! sidecars always hold the resolved form.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mwp_core::analysis::TsneConfig;
use mwp_core::channel::{AcquisitionConfig, ChannelModel, DatasetConfig, WaveformCategory, DEFAULT_AVG_COUNT, DEFAULT_NOISE_RMS};
use mwp_core::eval::SweepConfig;
use mwp_core::signals::{DEFAULT_PEAK, DEFAULT_RECORD_LEN, DEFAULT_SAMPLE_RATE};
use mwp_core::train::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{DEFAULT_HOP, DEFAULT_WINDOW};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub data: DataSection,
    pub channel: ChannelSection,
    pub acquisition: AcquisitionSection,
    pub train: TrainConfig,
    pub sweep: SweepConfig,
    pub tsne: TsneSection,
    pub stft: StftSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub category: WaveformCategory,
    pub record_len: usize,
    pub sample_rate: f64,
    pub peak: f64,
    pub count: usize,
    /// `[train, validation]`.
    pub split: [usize; 2],
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            category: WaveformCategory::Lfm,
            record_len: DEFAULT_RECORD_LEN,
            sample_rate: DEFAULT_SAMPLE_RATE,
            peak: DEFAULT_PEAK,
            count: 250,
            split: [200, 50],
        }
    }
}

/// A named preset, or `preset = "custom"` with the full model in `model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub preset: String,
    pub model: Option<ChannelModel>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            preset: mwp_core::channel::PPS_LIKE.to_string(),
            model: None,
        }
    }
}

impl ChannelSection {
    pub fn model(&self) -> Result<ChannelModel> {
        let model = match (&self.model, self.preset.as_str()) {
            (Some(m), _) => m.clone(),
            (None, name) => ChannelModel::preset(name).ok_or_else(|| {
                Error::Config(format!(
                    "unknown channel preset `{name}` (expected pps-like, padc-like, identity, or a model table)"
                ))
            })?,
        };
        model.validate()?;
        Ok(model)
    }

    /// `arg` is a preset name or the path of a TOML channel model.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if ChannelModel::preset(arg).is_some() {
            return Ok(Self {
                preset: arg.to_string(),
                model: None,
            });
        }
        let path = Path::new(arg);
        if !path.exists() {
            return Err(Error::Config(format!(
                "channel `{arg}` is neither a preset (pps-like, padc-like, identity) nor an existing file"
            )));
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: ChannelModel =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(Self {
            preset: "custom".to_string(),
            model: Some(model),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionSection {
    pub noise_rms: f64,
    pub avg_count: u32,
}

impl Default for AcquisitionSection {
    fn default() -> Self {
        Self {
            noise_rms: DEFAULT_NOISE_RMS,
            avg_count: DEFAULT_AVG_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
// flatten rules out deny_unknown_fields here
#[serde(default)]
pub struct TsneSection {
    #[serde(flatten)]
    pub tsne: TsneConfig,
    /// Feature points kept after subsampling.
    pub max_points: usize,
}

impl Default for TsneSection {
    fn default() -> Self {
        Self {
            tsne: TsneConfig::default(),
            max_points: crate::study::MAX_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StftSection {
    pub window_len: usize,
    pub hop: usize,
}

impl Default for StftSection {
    fn default() -> Self {
        Self {
            window_len: DEFAULT_WINDOW,
            hop: DEFAULT_HOP,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Accepts a plain config or a sidecar (whose `[config]` table is used).
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let value: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        if value.contains_key("invocation") {
            let sidecar: Sidecar = toml::from_str(text).map_err(|e| e.to_string())?;
            return Ok(sidecar.config);
        }
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Copies `master_seed` into every stage's seed field.
    pub fn resolved(mut self) -> Self {
        self.train.master_seed = self.master_seed;
        self.sweep.seed = self.master_seed;
        self.tsne.tsne.seed = self.master_seed;
        self
    }

    pub fn dataset_config(&self) -> DatasetConfig {
        DatasetConfig {
            category: self.data.category,
            record_len: self.data.record_len,
            sample_rate: self.data.sample_rate,
            peak: self.data.peak,
            count: self.data.count,
            split: (self.data.split[0], self.data.split[1]),
            master_seed: self.master_seed,
        }
    }

    pub fn acquisition_config(&self) -> AcquisitionConfig {
        AcquisitionConfig {
            noise_rms: self.acquisition.noise_rms,
            avg_count: self.acquisition.avg_count,
            rng_seed: 0,
        }
    }
}

/// What produced an artifact: the command, its file arguments and the
/// resolved config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub invocation: Invocation,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Invocation {
    pub command: String,
    pub version: String,
    pub files: BTreeMap<String, String>,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".config.toml");
    PathBuf::from(s)
}

pub fn write_sidecar(output: &Path, command: &str, files: &[(&str, &Path)], config: &RunConfig) -> Result<()> {
    let sidecar = Sidecar {
        invocation: Invocation {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            files: files
                .iter()
                .map(|(k, p)| (k.to_string(), p.display().to_string()))
                .collect(),
        },
        config: config.clone(),
    };
    let path = sidecar_path(output);
    let text = toml::to_string(&sidecar).expect("sidecar is always serializable");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
