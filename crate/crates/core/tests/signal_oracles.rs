mod common;

use common::{inst_freq, spectrum};
use mwp_core::signals::{
    costas_sequence, gen_costas, gen_lfm, is_prime, primitive_roots, synthesize_echo_raw,
    Scatterer, TargetScene,
};

const FS: f64 = 20e9;

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

#[test]
fn lfm_instantaneous_frequency_slope() {
    let w = gen_lfm(0.0, 3e9, 200e-9, FS, 1.0).unwrap();
    assert_eq!(w.len(), 4000);
    let f = inst_freq(w.samples(), FS);
    let (lo, hi) = (f.len() / 10, f.len() * 9 / 10);
    let t: Vec<f64> = (lo..hi).map(|n| (n as f64 + 0.5) / FS).collect();
    let s = slope(&t, &f[lo..hi]);
    assert!((s / 1.5e16 - 1.0).abs() < 0.01, "slope {s:e}");
}

#[test]
fn lfm_frequency_is_monotone() {
    let w = gen_lfm(0.5e9, 3.5e9, 150e-9, FS, 0.9).unwrap();
    let f = inst_freq(w.samples(), FS);
    let (lo, hi) = (f.len() / 10, f.len() * 9 / 10);
    let means: Vec<f64> = f[lo..hi]
        .chunks_exact(16)
        .map(|c| c.iter().sum::<f64>() / 16.0)
        .collect();
    assert!(means.windows(2).all(|m| m[1] > m[0]));
}

#[test]
fn degenerate_chirp_is_a_sine() {
    let w = gen_lfm(1e9, 1e9, 50e-9, FS, 0.7).unwrap();
    assert_eq!(w.samples()[0], 0.0);
    for (n, v) in w.samples().iter().enumerate() {
        let expect = 0.7 * (2.0 * std::f64::consts::PI * 1e9 * n as f64 / FS).sin();
        assert!((v - expect).abs() < 1e-9);
    }
}

/// Every displacement vector between two dots of the permutation matrix is
/// distinct.
fn is_costas(seq: &[u64]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for i in 0..seq.len() {
        for j in 0..seq.len() {
            if i != j && !seen.insert((j as i64 - i as i64, seq[j] as i64 - seq[i] as i64)) {
                return false;
            }
        }
    }
    true
}

#[test]
fn every_welch_sequence_is_costas() {
    let mut checked = 0;
    for p in (3..60).filter(|&p| is_prime(p)) {
        for g in primitive_roots(p) {
            let seq = costas_sequence(p, g).unwrap();
            let mut sorted = seq.clone();
            sorted.sort();
            assert_eq!(sorted, (1..p).collect::<Vec<_>>());
            assert!(is_costas(&seq), "p={p} g={g}");
            checked += 1;
        }
    }
    assert!(checked > 50);
    assert!(!is_costas(&[1, 2, 3]));
}

#[test]
fn costas_hop_is_a_single_tone() {
    // 2000-sample hops: bin spacing 10 MHz, every hop frequency on a bin
    let (f0, spacing) = (1e9, 0.5e9);
    let w = gen_costas(5, 2, f0, spacing, 100e-9, FS).unwrap();
    let seq = costas_sequence(5, 2).unwrap();
    for (i, a) in seq.iter().enumerate() {
        let seg = &w.samples()[i * 2000..(i + 1) * 2000];
        let s = spectrum(seg);
        let peak = (0..1000).max_by(|&x, &y| s[x].total_cmp(&s[y])).unwrap();
        let f = f0 + (a - 1) as f64 * spacing;
        assert_eq!(peak, (f / 10e6).round() as usize, "hop {i}");
    }
}

#[test]
fn echo_superposition_to_1e9() {
    let tx = gen_lfm(0.2e9, 3.2e9, 100e-9, FS, 1.0).unwrap().resized(4096).unwrap();
    let s = |range: f64, sigma: f64, r: f64, ph: f64| Scatterer {
        cross_section: sigma,
        range_offset: range,
        spin_radius: r,
        spin_phase: ph,
    };
    let full = TargetScene {
        scatterers: vec![s(1.3, 0.8, 0.2, 0.1), s(4.77, 0.3, 0.9, 2.0), s(7.1, 1.0, 0.0, 0.0)],
        radial_velocity: 250.0,
        rotation_rate: 0.17,
    };
    let sum_parts: Vec<f64> = [vec![0], vec![1, 2]]
        .iter()
        .map(|idx| synthesize_echo_raw(&tx, &full.subset(idx.clone())).unwrap())
        .fold(vec![0.0; 4096], |acc, w| acc.iter().zip(w.samples()).map(|(a, b)| a + b).collect());
    let whole = synthesize_echo_raw(&tx, &full).unwrap();
    for (a, b) in whole.samples().iter().zip(&sum_parts) {
        assert!((a - b).abs() < 1e-9);
    }
}
