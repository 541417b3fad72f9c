use mwp_core::analysis::{conditional_affinities, dependency_score, shuffled, silhouette, tsne, TsneConfig};
use mwp_core::rng::rng_from;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn clusters(per: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = rng_from(seed, &[]);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        let centre: Vec<f64> = (0..dim).map(|k| if k == c { 10.0 } else { 0.0 }).collect();
        for _ in 0..per {
            pts.push(
                centre
                    .iter()
                    .map(|&m| { let z: f64 = StandardNormal.sample(&mut rng); m + z / 2f64.sqrt() })
                    .collect(),
            );
            labels.push(c);
        }
    }
    (pts, labels)
}

fn quick() -> TsneConfig {
    TsneConfig {
        perplexity: 10.0,
        iterations: 500,
        ..Default::default()
    }
}

#[test]
fn separated_clusters_stay_separated() {
    // centres 10·√2 apart, per-axis sigma 1/√2: well over 10 sigma
    let (pts, labels) = clusters(30, 44, 1);
    let e = tsne(&pts, &quick()).unwrap();
    assert_eq!(e.points.len(), 90);
    assert!(e.points.iter().all(|p| p.len() == 3));
    let s = silhouette(&e.points, &labels).unwrap();
    assert!(s > 0.5, "silhouette {s}");
    assert!(e.kl_final < e.kl_after_exaggeration, "{} {}", e.kl_final, e.kl_after_exaggeration);
}

// Exact duplicates cannot be pinned together: a twin pair's p_ij sits below
// the 1/Z their q_ij reaches at zero distance, so the KL gradient holds them
// slightly apart. They still share affinities and end up nearest neighbours.
#[test]
fn duplicates_share_affinities_and_pair_up() {
    let (base, _) = clusters(20, 8, 2);
    let n = base.len();
    let mut pts = base.clone();
    pts.extend(base);
    let aff = conditional_affinities(&pts, 10.0).unwrap();
    let m = 2 * n;
    for i in 0..n {
        let (a, b) = (&aff.conditional[i * m..(i + 1) * m], &aff.conditional[(i + n) * m..(i + n + 1) * m]);
        for j in 0..m {
            // the twin swaps places with the point itself
            let jj = if j == i { i + n } else if j == i + n { i } else { j };
            assert!((a[j] - b[jj]).abs() < 1e-12);
        }
    }
    let e = tsne(&pts, &quick()).unwrap();
    let paired = (0..m)
        .filter(|&i| {
            let twin = (i + n) % m;
            let d = |j: usize| -> f64 {
                e.points[i].iter().zip(&e.points[j]).map(|(a, b)| (a - b) * (a - b)).sum()
            };
            (0..m).filter(|&j| j != i).all(|j| d(twin) <= d(j))
        })
        .count();
    assert!(paired as f64 >= 0.9 * m as f64, "{paired}/{m}");
}

#[test]
fn dependency_score_ignores_rotation_and_translation() {
    let mut rng = rng_from(6, &[]);
    let emb: Vec<Vec<f64>> = (0..150)
        .map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let labels: Vec<f64> = emb.iter().map(|p| p[0] + 0.1 * p[1]).collect();
    let (c, s) = (0.6f64.cos(), 0.6f64.sin());
    let moved: Vec<Vec<f64>> = emb
        .iter()
        .map(|p| vec![c * p[0] - s * p[1] + 3.0, s * p[0] + c * p[1] - 1.0, p[2] + 7.0])
        .collect();
    let a = dependency_score(&emb, &labels).unwrap();
    let b = dependency_score(&moved, &labels).unwrap();
    assert!((a - b).abs() < 1e-9);
    assert!(a < 0.5);
    let null = dependency_score(&emb, &shuffled(&labels, 2)).unwrap();
    assert!((null - 1.0).abs() < 0.2, "{null}");
}
