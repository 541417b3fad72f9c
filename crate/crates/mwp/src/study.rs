//! Frequency and amplitude dependency of bottleneck features.

use mwp_core::analysis::{dependency_score, extract_features, shuffled, tsne, FeaturePoint, TsneConfig};
use mwp_core::channel::Example;
use mwp_core::rae::RaeParams;
use mwp_core::rng::{rng_from, stream};
use rand::seq::index::sample;

use crate::labels::label_segments;

/// Cap keeping exact t-SNE affordable.
pub const MAX_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub points: Vec<FeaturePoint>,
    pub embedding: Vec<Vec<f64>>,
    pub kl_final: f64,
    pub freq_score: f64,
    pub amp_score: f64,
    /// Frequency score against shuffled labels: the null control.
    pub shuffled_freq_score: f64,
}

/// Labelled bottleneck columns of every example.
pub fn feature_points(params: &RaeParams<f32>, examples: &[Example], sample_rate: f64) -> mwp_core::Result<Vec<FeaturePoint>> {
    let mut out = Vec::new();
    for (i, ex) in examples.iter().enumerate() {
        let features = extract_features(params, &ex.distorted)?;
        let x: Vec<f64> = ex.distorted.iter().map(|&v| v as f64).collect();
        for (t, (vector, (freq_label, amp_label))) in features.into_iter().zip(label_segments(&x, sample_rate)).enumerate() {
            out.push(FeaturePoint {
                vector,
                freq_label,
                amp_label,
                source: (i, t),
            });
        }
    }
    Ok(out)
}

/// A seeded subset of at most `max` points, kept in source order.
pub fn subsample(points: Vec<FeaturePoint>, max: usize, seed: u64) -> Vec<FeaturePoint> {
    if points.len() <= max {
        return points;
    }
    let mut keep = sample(&mut rng_from(seed, &[stream::SUBSAMPLE, 0]), points.len(), max).into_vec();
    keep.sort_unstable();
    let mut it = keep.into_iter().peekable();
    points
        .into_iter()
        .enumerate()
        .filter(|(i, _)| it.next_if_eq(i).is_some())
        .map(|(_, p)| p)
        .collect()
}

pub fn dependency_study(
    params: &RaeParams<f32>,
    examples: &[Example],
    sample_rate: f64,
    cfg: &TsneConfig,
    max_points: usize,
) -> mwp_core::Result<StudyResult> {
    let points = subsample(feature_points(params, examples, sample_rate)?, max_points, cfg.seed);
    let vectors: Vec<Vec<f64>> = points.iter().map(|p| p.vector.clone()).collect();
    let emb = tsne(&vectors, cfg)?;
    let freq: Vec<f64> = points.iter().map(|p| p.freq_label).collect();
    let amp: Vec<f64> = points.iter().map(|p| p.amp_label).collect();
    Ok(StudyResult {
        freq_score: dependency_score(&emb.points, &freq)?,
        amp_score: dependency_score(&emb.points, &amp)?,
        shuffled_freq_score: dependency_score(&emb.points, &shuffled(&freq, cfg.seed))?,
        kl_final: emb.kl_final,
        embedding: emb.points,
        points,
    })
}
