use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use tdakit::datasets::noisy_circle;
use tdakit::inference::{
    confidence_band, diagram_permutation_test, landscape_functional_test, permutation_p_value,
    two_sample_t_test, BandSettings, Direction, Permutations, PermutationsUsed,
};
use tdakit::landscape::{landscape_from_diagram, PersistenceLandscape};
use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::persistence::{compute_persistence, PersistenceDiagram, PersistencePair};
use tdakit::rips::build_rips;

fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram::new(
        points
            .iter()
            .map(|&(b, d)| PersistencePair::new(1, b, d))
            .collect(),
        [1],
        5.0,
    )
    .unwrap()
}

fn group(lifespans: &[f64]) -> Vec<PersistenceDiagram> {
    lifespans
        .iter()
        .map(|&l| diagram(&[(0.1, 0.1 + l), (0.2, 0.25)]))
        .collect()
}

fn landscapes(ds: &[PersistenceDiagram]) -> Vec<PersistenceLandscape> {
    ds.iter()
        .map(|d| landscape_from_diagram(d, 1).unwrap())
        .collect()
}

#[test]
fn p_values_do_not_depend_on_group_order() {
    let a = group(&[1.0, 1.1, 0.7, 1.3]);
    let b = group(&[0.9, 1.6, 1.5, 1.7, 1.2]);
    let ab = diagram_permutation_test(&a, &b, 1, 2.0, Permutations::Exhaustive, 0).unwrap();
    let ba = diagram_permutation_test(&b, &a, 1, 2.0, Permutations::Exhaustive, 0).unwrap();
    assert_eq!(ab.p_value, ba.p_value);
    let ab = landscape_functional_test(
        &landscapes(&a),
        &landscapes(&b),
        Permutations::Exhaustive,
        0,
    )
    .unwrap();
    let ba = landscape_functional_test(
        &landscapes(&b),
        &landscapes(&a),
        Permutations::Exhaustive,
        0,
    )
    .unwrap();
    assert_eq!(ab.p_value, ba.p_value);
}

#[test]
fn floor_needs_a_strictly_extreme_split() {
    let separated = diagram_permutation_test(
        &group(&[0.5, 0.51, 0.52, 0.53, 0.54, 0.55, 0.56]),
        &group(&[2.0, 2.01, 2.02, 2.03, 2.04, 2.05, 2.06]),
        1,
        2.0,
        Permutations::Exhaustive,
        0,
    )
    .unwrap();
    assert_eq!(separated.p_value, 1.0 / 1716.0);
    assert_eq!(separated.permutations_used, PermutationsUsed::Exhaustive);

    // Swapping two equal values gives another split with the same
    // statistic, so the observed split is no longer alone in the tail.
    let tied = permutation_p_value(
        6,
        3,
        Direction::Larger,
        Permutations::Exhaustive,
        0,
        |mask| {
            let values = [1.0, 1.0, 5.0, 5.0, 9.0, 9.0];
            let first: f64 = values
                .iter()
                .zip(mask)
                .filter(|(_, &m)| m)
                .map(|(v, _)| v)
                .sum();
            (first - (25.0 - first)).abs()
        },
    )
    .unwrap();
    assert!(tied.1 > 2.0 / 20.0);
}

#[test]
fn sampled_reports_do_not_depend_on_thread_count() {
    let a = group(&[1.0, 1.1, 0.7, 1.3, 0.8, 1.0, 0.9, 1.2, 1.4, 0.6, 1.1, 1.0]);
    let b = group(&[0.9, 1.6, 1.5, 1.7, 1.2, 1.1, 1.4, 1.3, 1.5, 1.2, 1.0, 1.6]);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            (
                diagram_permutation_test(&a, &b, 1, 2.0, Permutations::Sampled(3000), 42).unwrap(),
                landscape_functional_test(
                    &landscapes(&a),
                    &landscapes(&b),
                    Permutations::Sampled(3000),
                    42,
                )
                .unwrap(),
            )
        })
    };
    let (d1, l1) = run(1);
    let (d4, l4) = run(4);
    assert_eq!(d1.to_json(), d4.to_json());
    assert_eq!(l1.to_json(), l4.to_json());
    assert_eq!(d1.permutations_used, PermutationsUsed::Sampled(3000));
}

#[test]
fn t_test_rejection_rate_is_calibrated() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let reps = 10_000;
    let mut rejected = 0;
    for _ in 0..reps {
        let a: Vec<f64> = (0..10).map(|_| normal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..10).map(|_| normal.sample(&mut rng)).collect();
        if two_sample_t_test(&a, &b).unwrap().p_value < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / reps as f64;
    assert!((0.04..=0.06).contains(&rate), "rejection rate {rate}");
}

#[test]
fn band_separates_circle_from_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cloud = PointCloud::new(noisy_circle(&mut rng, 100, [0.0, 0.0], 1.0, 0.05)).unwrap();
    let settings = BandSettings {
        metric: Metric::euclidean(),
        max_dimension: 2,
        max_scale: 1.9,
    };
    let band = confidence_band(&cloud, 1, 0.05, 30, 1, &settings).unwrap();
    let dm = distance_matrix(&cloud, &settings.metric).unwrap();
    let d = compute_persistence(&build_rips(&dm, 2, settings.max_scale).unwrap());
    let mut features = band.classify(&d);
    features.sort_by(|a, b| (b.death - b.birth).total_cmp(&(a.death - a.birth)));
    let dominant = features[0];
    assert!(dominant.death - dominant.birth > 3.0 * band.threshold());
    assert!(!dominant.noise);
    assert!(features.len() > 1);
    assert!(features[1..].iter().all(|f| f.noise));
}
