use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};

use crate::math::{exp, floor, ln};
use crate::par;
use crate::rng::{rng_from, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TsneConfig {
    pub perplexity: f64,
    pub output_dims: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iterations with exaggeration on and momentum 0.5.
    pub exaggeration_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            output_dims: 3,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            seed: 0,
        }
    }
}

impl TsneConfig {
    pub fn min_points(&self) -> usize {
        floor(3.0 * self.perplexity) as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// One `output_dims`-vector per input point.
    pub points: Vec<Vec<f64>>,
    /// Objective right after early exaggeration ends (or at the start if it
    /// never runs).
    pub kl_after_exaggeration: f64,
    pub kl_final: f64,
}

/// Per-point Gaussian affinities matched to a perplexity.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinities {
    pub n: usize,
    /// Row-major `n × n` conditional probabilities `p_{j|i}`; rows sum to 1.
    pub conditional: Vec<f64>,
    /// Shannon entropy of each row in nats.
    pub entropies: Vec<f64>,
}

const SEARCH_STEPS: usize = 200;
const ENTROPY_TOL: f64 = 1e-7;

fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let rows = par::map_indices(n, |i| {
        points
            .iter()
            .map(|q| {
                points[i]
                    .iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
    });
    rows.concat()
}

/// Row `i` of the conditional affinities for precision `beta`, with its
/// entropy.
fn affinity_row(d: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    // shift by the nearest neighbour so the largest weight is exp(0)
    let dmin = d
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (j, (o, &dj)) in out.iter_mut().zip(d).enumerate() {
        *o = if j == i { 0.0 } else { exp(-beta * (dj - dmin)) };
        sum += *o;
    }
    let mut h = 0.0;
    for o in out.iter_mut() {
        *o /= sum;
        if *o > 0.0 {
            h -= *o * ln(*o);
        }
    }
    h
}

/// Binary search on each point's precision until the row entropy equals
/// `ln(perplexity)`.
pub fn conditional_affinities(points: &[Vec<f64>], perplexity: f64) -> Result<Affinities> {
    let n = points.len();
    check_points(points, perplexity)?;
    let d = squared_distances(points);
    let target = ln(perplexity);
    let rows = par::map_indices(n, |i| {
        let di = &d[i * n..(i + 1) * n];
        let mut row = vec![0.0; n];
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut beta = 1.0;
        let mut h = affinity_row(di, i, beta, &mut row);
        for _ in 0..SEARCH_STEPS {
            if (h - target).abs() < ENTROPY_TOL {
                break;
            }
            if h > target {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
            h = affinity_row(di, i, beta, &mut row);
        }
        (row, h)
    });
    let mut conditional = Vec::with_capacity(n * n);
    let mut entropies = Vec::with_capacity(n);
    for (row, h) in rows {
        conditional.extend(row);
        entropies.push(h);
    }
    Ok(Affinities {
        n,
        conditional,
        entropies,
    })
}

fn check_points(points: &[Vec<f64>], perplexity: f64) -> Result<()> {
    if !(perplexity >= 2.0) || !perplexity.is_finite() {
        return Err(Error::invalid("perplexity", "must be at least 2"));
    }
    let minimum = floor(3.0 * perplexity) as usize + 1;
    if points.len() < minimum {
        return Err(Error::TooFewPoints {
            count: points.len(),
            minimum,
            perplexity,
        });
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::Shape("points must share one positive dimension".into()));
    }
    if let Some(i) = points.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// Low-dimensional Student-t kernel `1 / (1 + |y_i - y_j|²)` and its sum.
fn student_kernel(y: &[f64], n: usize, dims: usize, num: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        num[i * n + i] = 0.0;
        for j in i + 1..n {
            let mut d2 = 0.0;
            for k in 0..dims {
                let diff = y[i * dims + k] - y[j * dims + k];
                d2 += diff * diff;
            }
            let q = 1.0 / (1.0 + d2);
            num[i * n + j] = q;
            num[j * n + i] = q;
            total += 2.0 * q;
        }
    }
    total
}

fn kl_divergence(p: &[f64], num: &[f64], total: f64) -> f64 {
    p.iter()
        .zip(num)
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &q)| p * ln(p / (q / total).max(f64::MIN_POSITIVE)))
        .sum()
}

/// Exact t-SNE: perplexity-matched Gaussian affinities, symmetrized, a
/// Student-t kernel in the output space, and gradient descent with momentum,
/// per-parameter gains and early exaggeration.
pub fn tsne(points: &[Vec<f64>], cfg: &TsneConfig) -> Result<Embedding> {
    if cfg.output_dims == 0 {
        return Err(Error::invalid("output_dims", "must be positive"));
    }
    let aff = conditional_affinities(points, cfg.perplexity)?;
    let n = aff.n;
    let dims = cfg.output_dims;
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = (aff.conditional[i * n + j] + aff.conditional[j * n + i]) / (2.0 * n as f64);
            p[i * n + j] = if i == j { 0.0 } else { v.max(1e-12) };
        }
    }

    let mut rng = rng_from(cfg.seed, &[stream::TSNE]);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<f64> = (0..n * dims).map(|_| normal.sample(&mut rng)).collect();
    let mut velocity = vec![0.0; n * dims];
    let mut gains = vec![1.0f64; n * dims];
    let mut grad = vec![0.0; n * dims];
    let mut num = vec![0.0; n * n];
    let mut kl_after_exaggeration = None;

    for it in 0..cfg.iterations {
        let exaggerating = it < cfg.exaggeration_iterations;
        if !exaggerating && kl_after_exaggeration.is_none() {
            let total = student_kernel(&y, n, dims, &mut num);
            kl_after_exaggeration = Some(kl_divergence(&p, &num, total));
        }
        let exaggeration = if exaggerating { cfg.early_exaggeration } else { 1.0 };
        let momentum = if exaggerating { cfg.initial_momentum } else { cfg.final_momentum };

        let total = student_kernel(&y, n, dims, &mut num);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = num[i * n + j];
                let m = 4.0 * (exaggeration * p[i * n + j] - q / total) * q;
                for k in 0..dims {
                    grad[i * dims + k] += m * (y[i * dims + k] - y[j * dims + k]);
                }
            }
        }
        for ((g, v), gain) in grad.iter().zip(&mut velocity).zip(&mut gains) {
            *gain = if (*g > 0.0) != (*v > 0.0) {
                *gain + 0.2
            } else {
                *gain * 0.8
            };
            *gain = gain.max(0.01);
            *v = momentum * *v - cfg.learning_rate * *gain * g;
        }
        for (yv, v) in y.iter_mut().zip(&velocity) {
            *yv += v;
        }
        for k in 0..dims {
            let mean = (0..n).map(|i| y[i * dims + k]).sum::<f64>() / n as f64;
            (0..n).for_each(|i| y[i * dims + k] -= mean);
        }
    }

    let total = student_kernel(&y, n, dims, &mut num);
    let kl_final = kl_divergence(&p, &num, total);
    Ok(Embedding {
        points: y.chunks(dims).map(|c| c.to_vec()).collect(),
        kl_after_exaggeration: kl_after_exaggeration.unwrap_or(kl_final),
        kl_final,
    })
}
