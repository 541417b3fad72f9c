//! Mini-batch training with Adam and a one-step learning-rate decay.

mod adam;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};

use crate::channel::{Dataset, Example};
use crate::par;
use crate::rae::{backward, check_length, init_params, mae_loss, rae_forward, RaeParams};
use crate::rng::{rng_from, stream};
use crate::tensor::FeatureMap;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TrainConfig {
    pub total_iterations: usize,
    pub decay_at: usize,
    pub lr_before: f64,
    pub lr_after: f64,
    pub batch_size: usize,
    pub master_seed: u64,
    /// Iterations between checkpoints; 0 disables them.
    pub checkpoint_every: usize,
    /// Iterations between full-split loss evaluations; 0 logs only the
    /// first and last iteration.
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            total_iterations: 20_000,
            decay_at: 18_000,
            lr_before: 1e-3,
            lr_after: 1e-4,
            batch_size: 8,
            master_seed: 0,
            checkpoint_every: 1_000,
            log_every: 500,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_iterations > 0 && self.decay_at >= self.total_iterations {
            return Err(Error::invalid("decay_at", "must be below total_iterations"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be at least 1"));
        }
        for (name, lr) in [("lr_before", self.lr_before), ("lr_after", self.lr_after)] {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(Error::invalid(name, "must be positive and finite"));
            }
        }
        Ok(())
    }

    fn logs_at(&self, iteration: usize) -> bool {
        iteration == 0
            || iteration == self.total_iterations
            || (self.log_every > 0 && iteration % self.log_every == 0)
    }
}

/// Learning rate for a 0-based iteration.
pub fn lr_at(iteration: usize, cfg: &TrainConfig) -> Result<f64> {
    if iteration >= cfg.total_iterations {
        return Err(Error::IterationOutOfRange {
            iteration,
            total: cfg.total_iterations,
        });
    }
    Ok(if iteration < cfg.decay_at {
        cfg.lr_before
    } else {
        cfg.lr_after
    })
}

/// Full-split losses recorded before the update of `iteration` (or after
/// the last update when `iteration == total_iterations`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossPoint {
    pub iteration: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossCurves {
    pub points: Vec<LossPoint>,
}

impl LossCurves {
    pub fn at(&self, iteration: usize) -> Option<&LossPoint> {
        self.points.iter().find(|p| p.iteration == iteration)
    }

    pub fn first(&self) -> Option<&LossPoint> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&LossPoint> {
        self.points.last()
    }
}

/// Everything needed to resume training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub params: RaeParams<f32>,
    pub adam: AdamState,
    /// Number of completed updates.
    pub iteration: usize,
}

impl TrainState {
    pub fn initial(master_seed: u64) -> Self {
        let params = init_params(master_seed);
        let adam = AdamState::new(params.param_count());
        Self {
            params,
            adam,
            iteration: 0,
        }
    }
}

/// Hooks called from the training loop. Errors abort training.
pub trait Observer {
    fn on_log(&mut self, _point: &LossPoint) -> Result<()> {
        Ok(())
    }

    fn on_checkpoint(&mut self, _state: &TrainState) -> Result<()> {
        Ok(())
    }
}

pub struct NoObserver;

impl Observer for NoObserver {}

/// Mean absolute error of the network over a set of examples, parameters
/// untouched.
pub fn split_loss(params: &RaeParams<f32>, examples: &[Example]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::invalid("examples", "split is empty"));
    }
    let losses = par::map_indices(examples.len(), |i| -> Result<f64> {
        let ex = &examples[i];
        let x = FeatureMap::from_signal(&ex.distorted)?;
        let (y, _) = rae_forward(&x, params)?;
        Ok(mae_loss(y.values(), &ex.clean)?.0)
    });
    let mut sum = 0.0;
    for l in losses {
        sum += l?;
    }
    Ok(sum / examples.len() as f64)
}

/// Loss and flattened gradient for one example.
fn example_grad(params: &RaeParams<f32>, ex: &Example) -> Result<(f64, Vec<f32>)> {
    let x = FeatureMap::from_signal(&ex.distorted)?;
    let (y, cache) = rae_forward(&x, params)?;
    let (loss, g) = mae_loss(y.values(), &ex.clean)?;
    let grads = backward(&cache, params, &g, false)?;
    Ok((loss, grads.values().collect()))
}

/// Batch-mean loss and gradient, reduced in batch order.
fn batch_grad(params: &RaeParams<f32>, examples: &[Example], batch: &[usize]) -> Result<(f64, Vec<f64>)> {
    let per = par::map_indices(batch.len(), |j| example_grad(params, &examples[batch[j]]));
    let mut grad = vec![0.0f64; params.param_count()];
    let mut loss = 0.0;
    for r in per {
        let (l, g) = r?;
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v as f64;
        }
    }
    let n = batch.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok((loss / n, grad))
}

fn check_dataset(dataset: &Dataset) -> Result<()> {
    if dataset.train().is_empty() || dataset.validation().is_empty() {
        return Err(Error::invalid(
            "dataset",
            "training and validation splits must both be non-empty",
        ));
    }
    check_length(dataset.length)
}

/// Trains from the seeded initialization.
pub fn train(dataset: &Dataset, cfg: &TrainConfig) -> Result<(RaeParams<f32>, LossCurves)> {
    let (state, curves) = train_from(
        dataset,
        cfg,
        TrainState::initial(cfg.master_seed),
        &mut NoObserver,
    )?;
    Ok((state.params, curves))
}

/// Continues training from `state` up to `cfg.total_iterations`. Batches are
/// drawn from a per-iteration stream, so a resumed run matches an
/// uninterrupted one bit for bit.
pub fn train_from(
    dataset: &Dataset,
    cfg: &TrainConfig,
    mut state: TrainState,
    observer: &mut dyn Observer,
) -> Result<(TrainState, LossCurves)> {
    cfg.validate()?;
    let mut curves = LossCurves::default();
    if state.iteration >= cfg.total_iterations {
        return Ok((state, curves));
    }
    check_dataset(dataset)?;
    let train_set = dataset.train();
    for it in state.iteration..=cfg.total_iterations {
        if cfg.logs_at(it) {
            let point = LossPoint {
                iteration: it,
                train_loss: split_loss(&state.params, train_set)?,
                val_loss: split_loss(&state.params, dataset.validation())?,
            };
            observer.on_log(&point)?;
            curves.points.push(point);
        }
        if it == cfg.total_iterations {
            break;
        }
        let mut rng = rng_from(cfg.master_seed, &[stream::BATCH, it as u64]);
        let batch: Vec<usize> = (0..cfg.batch_size)
            .map(|_| rng.random_range(0..train_set.len()))
            .collect();
        let (loss, grad) = batch_grad(&state.params, train_set, &batch)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                iteration: it,
                batch,
            });
        }
        adam_step(&mut state.params, &grad, &mut state.adam, lr_at(it, cfg)?)?;
        state.iteration = it + 1;
        if cfg.checkpoint_every > 0 && state.iteration % cfg.checkpoint_every == 0 {
            observer.on_checkpoint(&state)?;
        }
    }
    Ok((state, curves))
}
