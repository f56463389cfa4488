//! Fréchet mean of loop diagrams from several noisy circles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdakit::datasets::noisy_circle;
use tdakit::frechet::frechet_mean;
use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::persistence::{compute_persistence, PersistenceDiagram};
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let sample = (0..5)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cloud = PointCloud::new(noisy_circle(&mut rng, 30, [0.0, 0.0], 1.0, 0.1))?;
            let dm = distance_matrix(&cloud, &Metric::euclidean())?;
            Ok(compute_persistence(&build_rips(&dm, 2, 2.5)?))
        })
        .collect::<tdakit::Result<Vec<PersistenceDiagram>>>()?;
    let result = frechet_mean(&sample, 1)?;
    println!(
        "variance {:.5} after {} iterations (converged: {})",
        result.variance, result.iterations, result.converged
    );
    for (b, d) in result.mean.finite_points(1)? {
        println!("mean point ({b:.4}, {d:.4})");
    }
    Ok(())
}
