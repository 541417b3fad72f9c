use mwp_core::channel::{build_dataset, AcquisitionConfig, ChannelModel, DatasetConfig, Example};
use mwp_core::eval::{evaluate, improvement_db, mse, noise_sweep, score, Improvement, NoiseKind, SweepConfig};
use mwp_core::rae::{init_params, RaeParams, RaeShape};
use mwp_core::rng::rng_from;
use proptest::prelude::*;
use rand::Rng;

fn examples() -> (Vec<Example>, f64) {
    let cfg = DatasetConfig {
        record_len: 512,
        count: 6,
        split: (4, 2),
        master_seed: 2,
        ..Default::default()
    };
    let ds = build_dataset(&cfg, &ChannelModel::pps_like(), &AcquisitionConfig::default()).unwrap();
    (ds.examples, ds.sample_rate)
}

#[test]
fn identity_network_scores_zero_db() {
    let (ex, _) = examples();
    let r = evaluate(&RaeParams::zeros(RaeShape::TABLE), &ex).unwrap();
    assert_eq!(r.mean_improvement, Improvement::Db(0.0));
    for row in &r.rows {
        assert_eq!(row.mse_before, row.mse_after);
    }
}

#[test]
fn perfect_recovery_is_unbounded() {
    let (ex, _) = examples();
    let clean: Vec<Vec<f32>> = ex.iter().map(|e| e.clean.clone()).collect();
    let r = score(&ex, &clean).unwrap();
    assert_eq!(r.mean_improvement, Improvement::Unbounded);
    assert_eq!(r.mean_improvement.to_string(), "unbounded");
}

#[test]
fn mse_matches_two_pass_reference() {
    let mut rng = rng_from(4, &[]);
    let a: Vec<f64> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let reference = d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64;
    assert!((mse(&a, &b).unwrap() - reference).abs() < 1e-12);
}

#[test]
fn sweep_level_zero_matches_evaluate() {
    let (ex, fs) = examples();
    let p = init_params(1);
    let cfg = SweepConfig {
        awgn_levels: vec![0.0, 0.01, 0.1],
        avg_counts: vec![128, 1],
        seed: 0,
    };
    let pts = noise_sweep(&p, &ex, fs, &ChannelModel::pps_like(), &AcquisitionConfig::default(), &cfg).unwrap();
    let r = evaluate(&p, &ex).unwrap();
    assert_eq!(pts.len(), 5);
    assert_eq!(pts[0].kind, NoiseKind::Awgn);
    assert!((pts[0].mse_before - r.mean_mse_before).abs() < 1e-15);
    assert!((pts[0].mse_after - r.mean_mse_after).abs() < 1e-15);
    assert!(pts[0].mse_before <= pts[1].mse_before && pts[1].mse_before <= pts[2].mse_before);
    // single shot is noisier than the 128-shot average
    assert_eq!(pts[3].kind, NoiseKind::Averaging);
    assert!(pts[4].mse_before > pts[3].mse_before);
}

proptest! {
    #[test]
    fn improvement_is_antisymmetric(a in 1e-9f64..10.0, b in 1e-9f64..10.0) {
        let ab = improvement_db(a, b).unwrap().db().unwrap();
        let ba = improvement_db(b, a).unwrap().db().unwrap();
        prop_assert!((ab + ba).abs() < 1e-9);
        prop_assert_eq!(ab > 0.0, b < a);
    }
}

#[test]
fn invalid_mse_rejected() {
    assert!(improvement_db(0.0, 1.0).is_err());
    assert!(improvement_db(f64::NAN, 1.0).is_err());
    assert!(mse(&[1.0f32], &[1.0, 2.0]).is_err());
}
