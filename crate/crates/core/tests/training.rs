use mwp_core::channel::{build_dataset, AcquisitionConfig, ChannelModel, Dataset, DatasetConfig, WaveformCategory};
use mwp_core::train::{train, train_from, LossPoint, NoObserver, Observer, TrainConfig, TrainState};
use mwp_core::Result;

fn dataset(count: usize, len: usize) -> Dataset {
    let cfg = DatasetConfig {
        category: WaveformCategory::Lfm,
        record_len: len,
        count,
        split: (count - count / 5, count / 5),
        master_seed: 11,
        ..Default::default()
    };
    build_dataset(&cfg, &ChannelModel::pps_like(), &AcquisitionConfig::default()).unwrap()
}

fn short(total: usize) -> TrainConfig {
    TrainConfig {
        total_iterations: total,
        decay_at: total * 3 / 4,
        batch_size: 4,
        checkpoint_every: 5,
        log_every: 5,
        master_seed: 3,
        ..Default::default()
    }
}

#[test]
fn zero_iterations_returns_initial_params() {
    let ds = dataset(5, 256);
    let cfg = TrainConfig {
        total_iterations: 0,
        decay_at: 0,
        ..short(0)
    };
    let state = TrainState::initial(cfg.master_seed);
    let (out, curves) = train_from(&ds, &cfg, state.clone(), &mut NoObserver).unwrap();
    assert_eq!(out, state);
    assert!(curves.points.is_empty());
}

#[test]
fn runs_are_bit_reproducible() {
    let ds = dataset(10, 256);
    let (a, ca) = train(&ds, &short(12)).unwrap();
    let (b, cb) = train(&ds, &short(12)).unwrap();
    assert_eq!(a.checksum(), b.checksum());
    assert_eq!(ca, cb);
    assert_eq!(ca.points.iter().map(|p| p.iteration).collect::<Vec<_>>(), [0, 5, 10, 12]);
}

struct Capture {
    at: usize,
    state: Option<TrainState>,
    logs: Vec<LossPoint>,
}

impl Observer for Capture {
    fn on_log(&mut self, p: &LossPoint) -> Result<()> {
        self.logs.push(*p);
        Ok(())
    }

    fn on_checkpoint(&mut self, s: &TrainState) -> Result<()> {
        if s.iteration == self.at {
            self.state = Some(s.clone());
        }
        Ok(())
    }
}

#[test]
fn resume_matches_uninterrupted_run() {
    let ds = dataset(10, 256);
    let cfg = short(15);
    let mut cap = Capture { at: 10, state: None, logs: vec![] };
    let (full, _) = train_from(&ds, &cfg, TrainState::initial(cfg.master_seed), &mut cap).unwrap();
    let mid = cap.state.unwrap();
    assert_eq!(mid.iteration, 10);
    let (resumed, curves) = train_from(&ds, &cfg, mid, &mut NoObserver).unwrap();
    assert_eq!(resumed, full);
    assert_eq!(curves.last(), cap.logs.last());
}

#[test]
fn smoke_run_reduces_loss() {
    let ds = dataset(20, 1024);
    let cfg = TrainConfig {
        total_iterations: 2000,
        decay_at: 1800,
        log_every: 500,
        checkpoint_every: 0,
        ..Default::default()
    };
    let (_, curves) = train(&ds, &cfg).unwrap();
    let (first, last) = (curves.first().unwrap(), curves.last().unwrap());
    assert_eq!(last.iteration, 2000);
    assert!(last.train_loss < 0.5 * first.train_loss, "{curves:?}");
    assert!(last.val_loss <= first.val_loss, "{curves:?}");
}
