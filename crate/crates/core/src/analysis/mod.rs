//! Bottleneck feature study: extraction, receptive fields, exact t-SNE and
//! a neighbour-label score measuring how strongly an embedding is organized
//! by a label.

mod tsne;

use alloc::vec::Vec;

use rand::seq::SliceRandom;

pub use tsne::{conditional_affinities, tsne, Affinities, Embedding, TsneConfig};

use crate::math::{sqrt, Real};
use crate::rae::{rae_forward, RaeParams, RaeShape, BOTTLENECK, KERNELS, NUM_CONV, STRIDES};
use crate::rng::{rng_from, stream};
use crate::tensor::{FeatureMap, SamePadding};
use crate::{Error, Result};

/// Neighbours used by [`dependency_score`].
pub const NEIGHBORS: usize = 10;

/// One bottleneck time step with labels describing the input under it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePoint {
    pub vector: Vec<f64>,
    pub freq_label: f64,
    pub amp_label: f64,
    /// `(example index, bottleneck step)`.
    pub source: (usize, usize),
}

/// Bottleneck columns of the network for input `x`: one vector per step.
pub fn extract_features<T: Real>(params: &RaeParams<T>, x: &[T]) -> Result<Vec<Vec<f64>>> {
    let input = FeatureMap::from_signal(x)?;
    let (_, cache) = rae_forward(&input, params)?;
    let b = cache.bottleneck();
    debug_assert_eq!(b.channels(), params.shape().bottleneck_channels());
    Ok((0..b.length())
        .map(|t| b.column(t).into_iter().map(|v| v.to_f64()).collect())
        .collect())
}

/// Input samples feeding bottleneck step `t`:
/// `t·jump + offset ..= t·jump + offset + size - 1` (clipped to the record).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReceptiveField {
    pub size: usize,
    pub jump: usize,
    pub offset: isize,
}

impl ReceptiveField {
    pub fn span(&self, t: usize, len: usize) -> (usize, usize) {
        let lo = t as isize * self.jump as isize + self.offset;
        let hi = lo + self.size as isize - 1;
        (lo.max(0) as usize, (hi.max(0) as usize).min(len - 1))
    }
}

/// Receptive field of a bottleneck step for records of length `len`,
/// following the padding of every convolution.
pub fn receptive_field(len: usize) -> ReceptiveField {
    let lengths = RaeShape::lengths(len);
    // interval [a, b] in a layer's output maps to
    // [a·s - pad, b·s - pad + K - 1] in its input
    let back = |t: isize| {
        let (mut a, mut b) = (t, t);
        for l in (0..NUM_CONV).rev() {
            let pad = SamePadding::new(lengths[l], KERNELS[l], STRIDES[l]).pad_left as isize;
            let s = STRIDES[l] as isize;
            a = a * s - pad;
            b = b * s - pad + KERNELS[l] as isize - 1;
        }
        (a, b)
    };
    let (a0, b0) = back(0);
    let (a1, _) = back(1);
    debug_assert_eq!(BOTTLENECK, NUM_CONV);
    ReceptiveField {
        size: (b0 - a0 + 1) as usize,
        jump: (a1 - a0) as usize,
        offset: a0,
    }
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    sqrt(v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean over points of the label standard deviation among each point's
/// `NEIGHBORS` nearest embedded neighbours, divided by the standard deviation
/// of all labels. Near 1 when the embedding ignores the label, lower when
/// similar labels cluster. Uses distances only.
pub fn dependency_score(embedding: &[Vec<f64>], labels: &[f64]) -> Result<f64> {
    if embedding.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: embedding.len(),
            right: labels.len(),
        });
    }
    if embedding.len() <= NEIGHBORS {
        return Err(Error::invalid("embedding", "needs more points than neighbours"));
    }
    let global = std_dev(labels);
    if !(global > 0.0) {
        return Err(Error::invalid("labels", "labels are constant"));
    }
    let n = embedding.len();
    let local = crate::par::map_indices(n, |i| {
        let mut d: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sq_dist(&embedding[i], &embedding[j]), j))
            .collect();
        d.select_nth_unstable_by(NEIGHBORS - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let neigh: Vec<f64> = d[..NEIGHBORS].iter().map(|&(_, j)| labels[j]).collect();
        std_dev(&neigh)
    });
    Ok(local.iter().sum::<f64>() / n as f64 / global)
}

/// Labels in a seeded random order: the null control for
/// [`dependency_score`].
pub fn shuffled(labels: &[f64], seed: u64) -> Vec<f64> {
    let mut out = labels.to_vec();
    out.shuffle(&mut rng_from(seed, &[stream::SUBSAMPLE, 1]));
    out
}

/// Mean silhouette coefficient of a labelled point set.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = alloc::vec![0usize; k];
    labels.iter().for_each(|&l| sizes[l] += 1);
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::invalid("labels", "need at least two clusters"));
    }
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = alloc::vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += sqrt(sq_dist(&points[i], &points[j]));
            }
        }
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    Ok(total / n as f64)
}
