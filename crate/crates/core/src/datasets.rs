//! Synthetic point clouds used by the examples, tests and benchmarks.

use std::f64::consts::TAU;

use rand::Rng;

use crate::metric::PointCloud;

/// `n` points with uniformly random angle on a circle, each coordinate
/// jittered uniformly within `[-noise, noise]`.
pub fn noisy_circle<R: Rng>(
    rng: &mut R,
    n: usize,
    center: [f64; 2],
    radius: f64,
    noise: f64,
) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let theta = rng.random_range(0.0..TAU);
            let mut jitter = || {
                if noise > 0.0 {
                    rng.random_range(-noise..=noise)
                } else {
                    0.0
                }
            };
            vec![
                center[0] + radius * theta.cos() + jitter(),
                center[1] + radius * theta.sin() + jitter(),
            ]
        })
        .collect()
}

/// Uniform sample of a unit circle.
pub fn circle<R: Rng>(rng: &mut R, n: usize) -> PointCloud {
    PointCloud::new(noisy_circle(rng, n, [0.0, 0.0], 1.0, 0.0)).unwrap()
}

/// `n_each` uniform points on each of two unit circles centred at `(0, 0)`
/// and `(-3, -3)`.
pub fn two_circles<R: Rng>(rng: &mut R, n_each: usize) -> PointCloud {
    let mut points = noisy_circle(rng, n_each, [0.0, 0.0], 1.0, 0.0);
    points.extend(noisy_circle(rng, n_each, [-3.0, -3.0], 1.0, 0.0));
    PointCloud::new(points).unwrap()
}

/// `n` equally spaced points on a circle of the given radius.
pub fn regular_polygon(n: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            vec![radius * theta.cos(), radius * theta.sin()]
        })
        .collect()
}

/// Twenty points: eighteen evenly spaced on the unit circle and two
/// isolated points at `(3, 0)` and `(-3, 0)`. For scales between the
/// polygon side and the loop's death it has three components and one loop.
pub fn ring_with_outliers() -> PointCloud {
    let mut points = regular_polygon(18, 1.0);
    points.push(vec![3.0, 0.0]);
    points.push(vec![-3.0, 0.0]);
    PointCloud::new(points).unwrap()
}

/// Grid sample of a torus in R^3 with tube radius `minor` around a circle
/// of radius `major`.
pub fn torus_grid(n_major: usize, n_minor: usize, major: f64, minor: f64) -> PointCloud {
    let mut points = Vec::with_capacity(n_major * n_minor);
    for i in 0..n_major {
        let u = TAU * i as f64 / n_major as f64;
        for j in 0..n_minor {
            let v = TAU * j as f64 / n_minor as f64;
            let ring = major + minor * v.cos();
            points.push(vec![ring * u.cos(), ring * u.sin(), minor * v.sin()]);
        }
    }
    PointCloud::new(points).unwrap()
}

/// `n` points uniform in `[0, 1)^dim`.
pub fn uniform_cube<R: Rng>(rng: &mut R, n: usize, dim: usize) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect(),
    )
    .unwrap()
}
