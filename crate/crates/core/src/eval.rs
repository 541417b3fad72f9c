//! Recovery metrics and the noise-robustness sweep.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_distr::{Distribution, StandardNormal};

use crate::channel::{acquire, apply_channel, AcquisitionConfig, ChannelModel, Example};
use crate::math::{log10, pow, Real};
use crate::par;
use crate::rae::{rae_infer, RaeParams};
use crate::rng::{rng_from, stream};
use crate::signals::Waveform;
use crate::{Error, Result};

/// Mean squared difference, accumulated in `f64`.
pub fn mse<T: Real>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::invalid("a", "empty signal"));
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.to_f64() - y.to_f64();
            d * d
        })
        .sum();
    Ok(sum / a.len() as f64)
}

/// An MSE ratio in decibels, or unbounded when the error vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improvement {
    Db(f64),
    Unbounded,
}

impl Improvement {
    pub fn db(self) -> Option<f64> {
        match self {
            Improvement::Db(v) => Some(v),
            Improvement::Unbounded => None,
        }
    }
}

impl fmt::Display for Improvement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Improvement::Db(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Improvement::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// `10·log10(before / after)`, written as a difference of logs so that
/// swapping the arguments negates the result exactly.
pub fn improvement_db(mse_before: f64, mse_after: f64) -> Result<Improvement> {
    if !(mse_before > 0.0) || !mse_before.is_finite() {
        return Err(Error::NonPositiveMse(mse_before));
    }
    if mse_after == 0.0 {
        return Ok(Improvement::Unbounded);
    }
    if !(mse_after > 0.0) || !mse_after.is_finite() {
        return Err(Error::NonPositiveMse(mse_after));
    }
    Ok(Improvement::Db(10.0 * (log10(mse_before) - log10(mse_after))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleRecovery {
    pub index: usize,
    pub mse_before: f64,
    pub mse_after: f64,
    pub improvement: Improvement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub dataset_id: String,
    pub channel_id: String,
    pub rows: Vec<ExampleRecovery>,
    pub mean_mse_before: f64,
    pub mean_mse_after: f64,
    /// Mean of the per-example improvements; unbounded if any example is.
    pub mean_improvement: Improvement,
}

impl RecoveryReport {
    pub fn from_rows(rows: Vec<ExampleRecovery>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("examples", "nothing to evaluate"));
        }
        let n = rows.len() as f64;
        let mean_mse_before = rows.iter().map(|r| r.mse_before).sum::<f64>() / n;
        let mean_mse_after = rows.iter().map(|r| r.mse_after).sum::<f64>() / n;
        let mean_improvement = rows
            .iter()
            .map(|r| r.improvement.db())
            .sum::<Option<f64>>()
            .map_or(Improvement::Unbounded, |s| Improvement::Db(s / n));
        Ok(Self {
            dataset_id: String::new(),
            channel_id: String::new(),
            rows,
            mean_mse_before,
            mean_mse_after,
            mean_improvement,
        })
    }
}

/// Scores externally produced outputs: `recovered[i]` against
/// `examples[i].clean`, with `examples[i].distorted` as the baseline.
pub fn score(examples: &[Example], recovered: &[Vec<f32>]) -> Result<RecoveryReport> {
    if examples.len() != recovered.len() {
        return Err(Error::LengthMismatch {
            left: examples.len(),
            right: recovered.len(),
        });
    }
    let rows = examples
        .iter()
        .zip(recovered)
        .enumerate()
        .map(|(index, (ex, y))| {
            let mse_before = mse(&ex.distorted, &ex.clean)?;
            let mse_after = mse(y, &ex.clean)?;
            Ok(ExampleRecovery {
                index,
                mse_before,
                mse_after,
                improvement: improvement_db(mse_before, mse_after)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RecoveryReport::from_rows(rows)
}

/// Runs the network on every distorted input and scores it.
pub fn evaluate(params: &RaeParams<f32>, examples: &[Example]) -> Result<RecoveryReport> {
    let recovered = par::map_indices(examples.len(), |i| rae_infer(&examples[i].distorted, params))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    score(examples, &recovered)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// White Gaussian noise of a given rms added to the acquired input.
    Awgn,
    /// The input re-acquired with a given number of averaged shots.
    Averaging,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Awgn => "awgn",
            NoiseKind::Averaging => "averaging",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub kind: NoiseKind,
    /// Noise rms for [`NoiseKind::Awgn`], shot count for
    /// [`NoiseKind::Averaging`].
    pub level: f64,
    pub mse_before: f64,
    pub mse_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SweepConfig {
    pub awgn_levels: Vec<f64>,
    pub avg_counts: Vec<u32>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            awgn_levels: awgn_grid(),
            avg_counts: DEFAULT_AVG_COUNTS.to_vec(),
            seed: 0,
        }
    }
}

pub const DEFAULT_AVG_COUNTS: [u32; 7] = [128, 64, 32, 16, 8, 4, 1];

/// Ten log-spaced rms levels from 1e-3 to 0.3.
pub fn awgn_grid() -> Vec<f64> {
    let (lo, hi) = (log10(1e-3), log10(0.3));
    (0..10)
        .map(|i| pow(10.0, lo + (hi - lo) * i as f64 / 9.0))
        .collect()
}

fn sweep_point(
    params: &RaeParams<f32>,
    examples: &[Example],
    kind: NoiseKind,
    level: f64,
    input: impl Fn(usize) -> Result<Vec<f32>> + Sync + Send,
) -> Result<SweepPoint> {
    let per = par::map_indices(examples.len(), |i| -> Result<(f64, f64)> {
        let x = input(i)?;
        let y = rae_infer(&x, params)?;
        Ok((mse(&x, &examples[i].clean)?, mse(&y, &examples[i].clean)?))
    });
    let (mut before, mut after) = (0.0, 0.0);
    for r in per {
        let (b, a) = r?;
        before += b;
        after += a;
    }
    let n = examples.len() as f64;
    Ok(SweepPoint {
        kind,
        level,
        mse_before: before / n,
        mse_after: after / n,
    })
}

/// Mean MSE before and after recovery under two noise families: extra white
/// noise on the acquired inputs, and re-acquisition with fewer averaged
/// shots through `model` at the native `acq.noise_rms`.
pub fn noise_sweep(
    params: &RaeParams<f32>,
    examples: &[Example],
    sample_rate: f64,
    model: &ChannelModel,
    acq: &AcquisitionConfig,
    cfg: &SweepConfig,
) -> Result<Vec<SweepPoint>> {
    if examples.is_empty() {
        return Err(Error::invalid("examples", "nothing to sweep"));
    }
    model.validate()?;
    let mut points = Vec::new();
    for (li, &level) in cfg.awgn_levels.iter().enumerate() {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::invalid("awgn_levels", "levels must be finite and non-negative"));
        }
        points.push(sweep_point(params, examples, NoiseKind::Awgn, level, |i| {
            let mut rng = rng_from(cfg.seed, &[stream::SWEEP, 0, li as u64, i as u64]);
            Ok(examples[i]
                .distorted
                .iter()
                .map(|&x| {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    (x as f64 + level * n) as f32
                })
                .collect())
        })?);
    }
    for (ki, &k) in cfg.avg_counts.iter().enumerate() {
        let shot = AcquisitionConfig {
            avg_count: k,
            ..*acq
        };
        shot.validate()?;
        points.push(sweep_point(params, examples, NoiseKind::Averaging, k as f64, |i| {
            let clean: Vec<f64> = examples[i].clean.iter().map(|&x| x as f64).collect();
            let w = Waveform::new(clean, sample_rate, "")?;
            let cfg_i = AcquisitionConfig {
                rng_seed: crate::rng::derive_seed(cfg.seed, &[stream::SWEEP, 1, ki as u64, i as u64]),
                ..shot
            };
            let x = acquire(&apply_channel(&w, model)?, &cfg_i)?;
            Ok(x.samples().iter().map(|&v| v as f32).collect())
        })?);
    }
    Ok(points)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::invalid("a", "need at least two points"));
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut num, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::invalid("a", "constant input has no rank correlation"));
    }
    Ok(num / crate::math::sqrt(va * vb))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut r = alloc::vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0f64, 1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(mse(&[0.3f32, -2.0], &[0.3, -2.0]).unwrap(), 0.0);
        assert!(mse(&[1.0f64], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn improvement_examples() {
        assert_eq!(improvement_db(0.5, 0.5).unwrap(), Improvement::Db(0.0));
        let Improvement::Db(d) = improvement_db(1.0, 0.01).unwrap() else {
            panic!()
        };
        assert!((d - 20.0).abs() < 1e-12);
        assert_eq!(improvement_db(1.0, 0.0).unwrap(), Improvement::Unbounded);
        assert!(improvement_db(0.0, 1.0).is_err());
        assert!(improvement_db(1.0, -1.0).is_err());
        assert_eq!(Improvement::Unbounded.to_string(), "unbounded");
    }

    #[test]
    fn grid_endpoints() {
        let g = awgn_grid();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[9] - 0.3).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn perfect_outputs_are_unbounded() {
        let ex = vec![Example {
            clean: vec![0.1; 16],
            distorted: vec![0.2; 16],
        }];
        let r = score(&ex, &[vec![0.1; 16]]).unwrap();
        assert_eq!(r.mean_improvement, Improvement::Unbounded);
    }
}
