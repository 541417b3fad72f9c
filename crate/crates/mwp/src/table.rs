//! CSV import and export.

use std::path::Path;

use mwp_core::analysis::FeaturePoint;
use mwp_core::eval::{RecoveryReport, SweepPoint};
use mwp_core::train::LossPoint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Serialize, Deserialize)]
struct WaveformRow {
    index: usize,
    amplitude: f64,
}

pub fn write_waveform(path: &Path, samples: &[f64]) -> Result<()> {
    write_rows(
        path,
        samples.iter().enumerate().map(|(index, &amplitude)| WaveformRow { index, amplitude }),
    )
}

/// Reads `index,amplitude` rows; indices must run 0, 1, 2, …
pub fn read_waveform(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for row in r.deserialize::<WaveformRow>() {
        let row = row.map_err(|e| Error::csv(path, e))?;
        if row.index != out.len() {
            return Err(Error::Config(format!(
                "{}: expected index {}, found {}",
                path.display(),
                out.len(),
                row.index
            )));
        }
        out.push(row.amplitude);
    }
    Ok(out)
}

pub fn write_report(path: &Path, report: &RecoveryReport) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        mse_before: f64,
        mse_after: f64,
        improvement_db: String,
    }
    write_rows(
        path,
        report.rows.iter().map(|r| Row {
            index: r.index,
            mse_before: r.mse_before,
            mse_after: r.mse_after,
            improvement_db: r.improvement.to_string(),
        }),
    )
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        noise_kind: &'static str,
        level: f64,
        mse_before: f64,
        mse_after: f64,
    }
    write_rows(
        path,
        points.iter().map(|p| Row {
            noise_kind: p.kind.name(),
            level: p.level,
            mse_before: p.mse_before,
            mse_after: p.mse_after,
        }),
    )
}

pub fn write_losses(path: &Path, points: &[LossPoint]) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        iteration: usize,
        train_loss: f64,
        val_loss: f64,
    }
    write_rows(
        path,
        points.iter().map(|p| Row {
            iteration: p.iteration,
            train_loss: p.train_loss,
            val_loss: p.val_loss,
        }),
    )
}

/// Frames × bins, preceded by a header of bin frequencies in Hz.
pub fn write_spectrogram(path: &Path, freqs_hz: &[f64], frames: &[Vec<f64>]) -> Result<()> {
    let mut w = writer(path)?;
    let wrap = |e| Error::csv(path, e);
    w.write_record(freqs_hz.iter().map(|f| f.to_string())).map_err(wrap)?;
    for frame in frames {
        w.write_record(frame.iter().map(|v| v.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `x,y,z,freq_label,amp_label,source` with `source` as `example:step`.
pub fn write_embedding(path: &Path, embedding: &[Vec<f64>], points: &[FeaturePoint]) -> Result<()> {
    let mut w = writer(path)?;
    let wrap = |e| Error::csv(path, e);
    w.write_record(["x", "y", "z", "freq_label", "amp_label", "source"]).map_err(wrap)?;
    for (e, p) in embedding.iter().zip(points) {
        let mut rec: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        rec.resize(3, String::new());
        rec.push(p.freq_label.to_string());
        rec.push(p.amp_label.to_string());
        rec.push(format!("{}:{}", p.source.0, p.source.1));
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waveform_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        let x = vec![0.1, -1.0 / 3.0, 1e-300, 0.0, 123.456];
        write_waveform(&p, &x).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("index,amplitude\n"));
        assert_eq!(read_waveform(&p).unwrap(), x);
    }

    #[test]
    fn waveform_import_checks_indices() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        std::fs::write(&p, "index,amplitude\n0,1.0\n2,0.5\n").unwrap();
        assert!(read_waveform(&p).is_err());
    }
}
