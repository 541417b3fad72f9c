//! Subcommands. Each writes its outputs plus a `<output>.config.toml`
//! sidecar holding the resolved configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mwp_core::channel::{build_dataset, Dataset, WaveformCategory};
use mwp_core::eval::{evaluate, noise_sweep};
use mwp_core::rae::{rae_infer, RaeParams};
use mwp_core::train::{train_from, LossPoint, Observer, TrainState};

use crate::config::{sidecar_path, write_sidecar, ChannelSection, RunConfig};
use crate::error::{Error, Result};
use crate::format::{read_checkpoint, read_dataset, write_checkpoint, write_dataset, Checkpoint};
use crate::spectral::{bin_frequencies, stft};
use crate::study::dependency_study;
use crate::table;

#[derive(Debug, Parser)]
#[command(name = "mwp", version, about = "Simulate defective receive links and train a residual autoencoder to undo them")]
pub struct Cli {
    /// Run configuration (TOML). A sidecar of an earlier output also works.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a dataset of (clean, distorted) echo pairs.
    GenData(GenData),
    /// Train the network on a dataset.
    Train(Train),
    /// Recover one waveform from an `index,amplitude` CSV.
    Infer(Infer),
    /// Per-example MSE before and after recovery.
    Evaluate(Evaluate),
    /// Recovery under added white noise and reduced averaging.
    NoiseSweep(NoiseSweep),
    /// Embed bottleneck features with t-SNE and score label dependency.
    Tsne(Tsne),
    /// Magnitude spectrogram of a waveform CSV.
    Spectrogram(Spectrogram),
    /// Write one dataset record as an `index,amplitude` CSV.
    Export(Export),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Category {
    Lfm,
    Costas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Train,
    Validation,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Signal {
    Clean,
    Distorted,
}

#[derive(Debug, Args)]
pub struct GenData {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub category: Option<Category>,
    /// Preset name (pps-like, padc-like, identity) or a channel-model TOML file.
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Train and validation counts, e.g. `8,2`. Defaults to 80/20.
    #[arg(long, value_delimiter = ',')]
    pub split: Option<Vec<usize>>,
    /// Record length in samples.
    #[arg(long)]
    pub length: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Train {
    #[arg(long)]
    pub data: PathBuf,
    /// Checkpoint path; rewritten every `checkpoint_every` iterations.
    #[arg(long)]
    pub out: PathBuf,
    /// Total iterations; the learning-rate drop moves to 90 % of it.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Continue from a checkpoint carrying optimizer state.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Loss-curve CSV; defaults to `<out>.loss.csv`.
    #[arg(long)]
    pub losses: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct Infer {
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Evaluate {
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_enum, default_value = "validation")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct NoiseSweep {
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Link used to re-acquire records; defaults to the dataset's.
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long, value_enum, default_value = "validation")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct Tsne {
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub perplexity: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_enum, default_value = "validation")]
    pub split: Split,
}

#[derive(Debug, Args)]
pub struct Spectrogram {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub hop: Option<usize>,
    /// Hz; defaults to the configured sample rate.
    #[arg(long)]
    pub sample_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Export {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub index: usize,
    #[arg(long, value_enum, default_value = "distorted")]
    pub signal: Signal,
    #[arg(long)]
    pub out: PathBuf,
}

/// Base configuration: `--config`, else the sidecar of `data` when present,
/// else defaults; then `--seed`.
fn base_config(cli: &Cli, data: Option<&Path>) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, data.map(sidecar_path)) {
        (Some(p), _) => RunConfig::load(p)?,
        (None, Some(side)) if side.exists() => RunConfig::load(&side)?,
        _ => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg.resolved())
}

fn split_of(ds: &Dataset, split: Split) -> &[mwp_core::channel::Example] {
    match split {
        Split::Train => ds.train(),
        Split::Validation => ds.validation(),
        Split::All => &ds.examples,
    }
}

fn load_params(path: &Path) -> Result<RaeParams<f32>> {
    Ok(read_checkpoint(path)?.params)
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::GenData(a) => gen_data(&cli, a),
        Command::Train(a) => train(&cli, a),
        Command::Infer(a) => infer(&cli, a),
        Command::Evaluate(a) => evaluate_cmd(&cli, a),
        Command::NoiseSweep(a) => sweep(&cli, a),
        Command::Tsne(a) => tsne_cmd(&cli, a),
        Command::Spectrogram(a) => spectrogram(&cli, a),
        Command::Export(a) => export(&cli, a),
    }
}

fn gen_data(cli: &Cli, a: &GenData) -> Result<()> {
    let mut cfg = base_config(cli, None)?;
    if let Some(c) = a.category {
        cfg.data.category = match c {
            Category::Lfm => WaveformCategory::Lfm,
            Category::Costas => WaveformCategory::Costas,
        };
    }
    if let Some(ch) = &a.channel {
        cfg.channel = ChannelSection::from_arg(ch)?;
    }
    if let Some(n) = a.length {
        cfg.data.record_len = n;
    }
    match (&a.split, a.count) {
        (Some(s), count) => {
            if s.len() != 2 {
                return Err(Error::Config(format!("--split takes two counts, got {}", s.len())));
            }
            cfg.data.split = [s[0], s[1]];
            cfg.data.count = count.unwrap_or(s[0] + s[1]);
        }
        (None, Some(n)) => {
            cfg.data.count = n;
            cfg.data.split = [n - n / 5, n / 5];
        }
        (None, None) => {}
    }
    let ds = build_dataset(&cfg.dataset_config(), &cfg.channel.model()?, &cfg.acquisition_config())?;
    write_dataset(&a.out, &ds)?;
    write_sidecar(&a.out, "gen-data", &[("out", &a.out)], &cfg)?;
    println!(
        "wrote {} {} examples ({} train / {} validation) of length {} to {}",
        ds.examples.len(),
        cfg.data.category.name(),
        ds.train_count,
        ds.examples.len() - ds.train_count,
        ds.length,
        a.out.display()
    );
    Ok(())
}

struct Progress<'a> {
    out: &'a Path,
    quiet: bool,
}

impl Observer for Progress<'_> {
    fn on_log(&mut self, p: &LossPoint) -> mwp_core::Result<()> {
        if !self.quiet {
            eprintln!("iteration {:>6}  train {:.6}  val {:.6}", p.iteration, p.train_loss, p.val_loss);
        }
        Ok(())
    }

    fn on_checkpoint(&mut self, s: &TrainState) -> mwp_core::Result<()> {
        write_checkpoint(self.out, &Checkpoint::from_state(s)).map_err(|e| mwp_core::Error::Observer(e.to_string()))
    }
}

fn train(cli: &Cli, a: &Train) -> Result<()> {
    let mut cfg = base_config(cli, Some(&a.data))?;
    if let Some(n) = a.iterations {
        cfg.train.total_iterations = n;
        cfg.train.decay_at = n * 9 / 10;
    }
    let ds = read_dataset(&a.data)?;
    let state = match &a.resume {
        Some(p) => read_checkpoint(p)?.into_state(),
        None => TrainState::initial(cfg.master_seed),
    };
    let mut progress = Progress {
        out: &a.out,
        quiet: a.quiet,
    };
    let (state, curves) = train_from(&ds, &cfg.train, state, &mut progress)?;
    write_checkpoint(&a.out, &Checkpoint::from_state(&state))?;
    let losses = a.losses.clone().unwrap_or_else(|| {
        let mut s = a.out.as_os_str().to_owned();
        s.push(".loss.csv");
        PathBuf::from(s)
    });
    table::write_losses(&losses, &curves.points)?;
    let mut files = vec![("data", a.data.as_path()), ("out", a.out.as_path()), ("losses", losses.as_path())];
    if let Some(r) = &a.resume {
        files.push(("resume", r.as_path()));
    }
    write_sidecar(&a.out, "train", &files, &cfg)?;
    write_sidecar(&losses, "train", &files, &cfg)?;
    if let Some(last) = curves.last() {
        println!(
            "trained to iteration {}: train loss {:.6}, validation loss {:.6}",
            last.iteration, last.train_loss, last.val_loss
        );
    }
    Ok(())
}

fn infer(cli: &Cli, a: &Infer) -> Result<()> {
    let cfg = base_config(cli, None)?;
    let params = load_params(&a.ckpt)?;
    let x: Vec<f32> = table::read_waveform(&a.input)?.iter().map(|&v| v as f32).collect();
    let y = rae_infer(&x, &params)?;
    table::write_waveform(&a.out, &y.iter().map(|&v| v as f64).collect::<Vec<_>>())?;
    write_sidecar(&a.out, "infer", &[("ckpt", &a.ckpt), ("in", &a.input), ("out", &a.out)], &cfg)
}

fn evaluate_cmd(cli: &Cli, a: &Evaluate) -> Result<()> {
    let cfg = base_config(cli, Some(&a.data))?;
    let params = load_params(&a.ckpt)?;
    let ds = read_dataset(&a.data)?;
    let mut report = evaluate(&params, split_of(&ds, a.split))?;
    report.dataset_id = a.data.display().to_string();
    report.channel_id = cfg.channel.preset.clone();
    table::write_report(&a.report, &report)?;
    write_sidecar(&a.report, "evaluate", &[("ckpt", &a.ckpt), ("data", &a.data), ("report", &a.report)], &cfg)?;
    println!(
        "{} examples of {} ({}): mean mse {:.6e} -> {:.6e}, mean improvement {:.2} dB",
        report.rows.len(),
        report.dataset_id,
        report.channel_id,
        report.mean_mse_before,
        report.mean_mse_after,
        report.mean_improvement
    );
    Ok(())
}

fn sweep(cli: &Cli, a: &NoiseSweep) -> Result<()> {
    let mut cfg = base_config(cli, Some(&a.data))?;
    if let Some(ch) = &a.channel {
        cfg.channel = ChannelSection::from_arg(ch)?;
    }
    let params = load_params(&a.ckpt)?;
    let ds = read_dataset(&a.data)?;
    let points = noise_sweep(
        &params,
        split_of(&ds, a.split),
        ds.sample_rate,
        &cfg.channel.model()?,
        &cfg.acquisition_config(),
        &cfg.sweep,
    )?;
    table::write_sweep(&a.out, &points)?;
    write_sidecar(&a.out, "noise-sweep", &[("ckpt", &a.ckpt), ("data", &a.data), ("out", &a.out)], &cfg)?;
    for p in &points {
        println!("{:<9} {:>10.4e}  before {:.4e}  after {:.4e}", p.kind.name(), p.level, p.mse_before, p.mse_after);
    }
    Ok(())
}

fn tsne_cmd(cli: &Cli, a: &Tsne) -> Result<()> {
    let mut cfg = base_config(cli, Some(&a.data))?;
    if let Some(n) = a.max_points {
        cfg.tsne.max_points = n;
    }
    if let Some(p) = a.perplexity {
        cfg.tsne.tsne.perplexity = p;
    }
    if let Some(n) = a.iterations {
        cfg.tsne.tsne.iterations = n;
    }
    let params = load_params(&a.ckpt)?;
    let ds = read_dataset(&a.data)?;
    let r = dependency_study(&params, split_of(&ds, a.split), ds.sample_rate, &cfg.tsne.tsne, cfg.tsne.max_points)?;
    table::write_embedding(&a.out, &r.embedding, &r.points)?;
    write_sidecar(&a.out, "tsne", &[("ckpt", &a.ckpt), ("data", &a.data), ("out", &a.out)], &cfg)?;
    println!("points {}", r.points.len());
    println!("kl_final {:.6}", r.kl_final);
    println!("freq_dependency {:.6}", r.freq_score);
    println!("amp_dependency {:.6}", r.amp_score);
    println!("shuffled_freq_dependency {:.6}", r.shuffled_freq_score);
    Ok(())
}

fn spectrogram(cli: &Cli, a: &Spectrogram) -> Result<()> {
    let mut cfg = base_config(cli, None)?;
    if let Some(w) = a.window {
        cfg.stft.window_len = w;
    }
    if let Some(h) = a.hop {
        cfg.stft.hop = h;
    }
    if let Some(fs) = a.sample_rate {
        cfg.data.sample_rate = fs;
    }
    let x = table::read_waveform(&a.input)?;
    let frames = stft(&x, cfg.stft.window_len, cfg.stft.hop)?;
    table::write_spectrogram(&a.out, &bin_frequencies(cfg.stft.window_len, cfg.data.sample_rate), &frames)?;
    write_sidecar(&a.out, "spectrogram", &[("in", &a.input), ("out", &a.out)], &cfg)
}

fn export(cli: &Cli, a: &Export) -> Result<()> {
    let cfg = base_config(cli, Some(&a.data))?;
    let ds = read_dataset(&a.data)?;
    let ex = ds.examples.get(a.index).ok_or_else(|| {
        Error::Config(format!("index {} is out of range for {} examples", a.index, ds.examples.len()))
    })?;
    let v = match a.signal {
        Signal::Clean => &ex.clean,
        Signal::Distorted => &ex.distorted,
    };
    table::write_waveform(&a.out, &v.iter().map(|&s| s as f64).collect::<Vec<_>>())?;
    write_sidecar(&a.out, "export", &[("data", &a.data), ("out", &a.out)], &cfg)
}
