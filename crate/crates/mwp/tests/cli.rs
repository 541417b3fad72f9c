use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mwp::config::{sidecar_path, RunConfig};
use mwp::format::{write_checkpoint, Checkpoint};
use mwp::table::write_waveform;
use mwp_core::rae::{RaeParams, RaeShape};

fn mwp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mwp(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit code and the single stderr line of a failing command.
fn fails(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = mwp(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    (out.status.code().unwrap(), err.trim_end().to_string())
}

const SMALL: &[&str] = &["gen-data", "--count", "10", "--length", "256", "--out", "d.bin"];

#[test]
fn golden_path_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(d, SMALL);
    assert!(out.contains("8 train / 2 validation"), "{out}");
    ok(d, &["train", "--data", "d.bin", "--out", "c.bin", "--iterations", "10", "--quiet"]);
    let out = ok(d, &["evaluate", "--ckpt", "c.bin", "--data", "d.bin", "--report", "r.csv"]);
    assert!(out.contains("pps-like"), "{out}");
    let report = fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(report.starts_with("index,mse_before,mse_after,improvement_db\n"));
    assert_eq!(report.lines().count(), 3);
    let losses = fs::read_to_string(d.join("c.bin.loss.csv")).unwrap();
    assert!(losses.starts_with("iteration,train_loss,val_loss\n0,"));
    for f in ["d.bin", "c.bin", "c.bin.loss.csv", "r.csv"] {
        assert!(sidecar_path(&d.join(f)).exists(), "{f}");
    }
    // the training sidecar carries the dataset's settings and the override
    let cfg = RunConfig::load(&sidecar_path(&d.join("c.bin"))).unwrap();
    assert_eq!((cfg.data.count, cfg.data.record_len), (10, 256));
    assert_eq!((cfg.train.total_iterations, cfg.train.decay_at), (10, 9));
}

#[test]
fn default_config_is_runnable() {
    let cfg = RunConfig::default().resolved();
    cfg.dataset_config().validate().unwrap();
    cfg.train.validate().unwrap();
    cfg.channel.model().unwrap();
    cfg.acquisition_config().validate().unwrap();
    assert_eq!((cfg.data.count, cfg.data.split), (250, [200, 50]));
}

#[test]
fn reruns_are_byte_identical_and_inputs_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |tag: &str| {
        let data = format!("d{tag}.bin");
        let ck = format!("c{tag}.bin");
        let rep = format!("r{tag}.csv");
        ok(d, &["gen-data", "--count", "10", "--length", "256", "--seed", "5", "--out", &data]);
        let before = fs::read(d.join(&data)).unwrap();
        ok(d, &["train", "--data", &data, "--out", &ck, "--iterations", "6", "--quiet"]);
        ok(d, &["evaluate", "--ckpt", &ck, "--data", &data, "--report", &rep]);
        assert_eq!(fs::read(d.join(&data)).unwrap(), before);
        [data, ck, rep].map(|f| fs::read(d.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn count_and_split_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["gen-data", "--count", "10", "--split", "8,2", "--length", "64", "--out", "x.bin"]);
    assert!(out.contains("wrote 10 lfm examples (8 train / 2 validation)"), "{out}");
    let (_, err) = fails(dir.path(), &["gen-data", "--count", "10", "--split", "8,3", "--length", "64", "--out", "y.bin"]);
    assert!(err.starts_with("error[invalid-input]:"), "{err}");
}

#[test]
fn infer_enforces_length_rule() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_checkpoint(&d.join("z.bin"), &Checkpoint::weights_only(RaeParams::zeros(RaeShape::TABLE))).unwrap();
    write_waveform(&d.join("bad.csv"), &[0.1; 100]).unwrap();
    let (code, err) = fails(d, &["infer", "--ckpt", "z.bin", "--in", "bad.csv", "--out", "y.csv"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[length-rule]:") && err.contains("multiple of 16"), "{err}");
    let x: Vec<f64> = (0..64).map(|i| (i as f64 * 0.1).sin() * 0.5).collect();
    write_waveform(&d.join("good.csv"), &x).unwrap();
    ok(d, &["infer", "--ckpt", "z.bin", "--in", "good.csv", "--out", "y.csv"]);
    let y = mwp::table::read_waveform(&d.join("y.csv")).unwrap();
    let x32: Vec<f64> = x.iter().map(|&v| v as f32 as f64).collect();
    assert_eq!(y, x32);
}

#[test]
fn zero_checkpoint_reports_zero_db() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, SMALL);
    write_checkpoint(&d.join("z.bin"), &Checkpoint::weights_only(RaeParams::zeros(RaeShape::TABLE))).unwrap();
    ok(d, &["evaluate", "--ckpt", "z.bin", "--data", "d.bin", "--report", "r.csv", "--split", "all"]);
    let report = fs::read_to_string(d.join("r.csv")).unwrap();
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",0")), "{report}");
}

#[test]
fn failures_are_single_categorized_lines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (_, err) = fails(d, &["gen-data", "--out", "x.bin", "--channel", "nowhere"]);
    assert!(err.starts_with("error[config]:"), "{err}");
    let (_, err) = fails(d, &["evaluate", "--ckpt", "missing.bin", "--data", "d.bin", "--report", "r.csv"]);
    assert!(err.starts_with("error[io]:"), "{err}");
    fs::write(d.join("junk.bin"), b"MWPC\x09\0\0\0").unwrap();
    let (_, err) = fails(d, &["infer", "--ckpt", "junk.bin", "--in", "a.csv", "--out", "b.csv"]);
    assert!(err.starts_with("error[format]:") && err.contains("version 9") && err.contains("version 1"), "{err}");
    let (code, err) = fails(d, &["train", "--bogus"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[usage]:"), "{err}");
    fs::write(d.join("bad.toml"), "master_seed = \"x\"\n").unwrap();
    let (_, err) = fails(d, &["--config", "bad.toml", "gen-data", "--out", "x.bin"]);
    assert!(err.starts_with("error[config]:"), "{err}");
}

#[test]
fn custom_channel_file_and_export_spectrogram() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = mwp_core::channel::ChannelModel::padc_like();
    fs::write(d.join("link.toml"), toml::to_string(&model).unwrap()).unwrap();
    ok(d, &["gen-data", "--count", "5", "--length", "512", "--channel", "link.toml", "--out", "d.bin"]);
    let cfg = RunConfig::load(&sidecar_path(&d.join("d.bin"))).unwrap();
    assert_eq!(cfg.channel.model().unwrap(), model);
    ok(d, &["export", "--data", "d.bin", "--index", "1", "--signal", "clean", "--out", "w.csv"]);
    ok(d, &["spectrogram", "--in", "w.csv", "--out", "s.csv"]);
    let s = fs::read_to_string(d.join("s.csv")).unwrap();
    let mut lines = s.lines();
    let header: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(header.len(), 129);
    assert_eq!(header[1], 20e9 / 256.0);
    assert_eq!(lines.count(), (512 - 256) / 64 + 1);
}
