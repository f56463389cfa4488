//! Bootstrap band on a noisy circle: the loop stands out, small cycles do
//! not.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdakit::datasets::noisy_circle;
use tdakit::inference::{confidence_band, BandSettings};
use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::persistence::compute_persistence;
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cloud = PointCloud::new(noisy_circle(&mut rng, 80, [0.0, 0.0], 1.0, 0.1))?;
    let settings = BandSettings {
        metric: Metric::euclidean(),
        max_dimension: 2,
        max_scale: 2.0,
    };
    let band = confidence_band(&cloud, 1, 0.05, 50, 11, &settings)?;
    println!(
        "c_n = {:.4}, noise below lifespan {:.4}",
        band.c_n,
        band.threshold()
    );

    let dm = distance_matrix(&cloud, &settings.metric)?;
    let diagram = compute_persistence(&build_rips(
        &dm,
        settings.max_dimension,
        settings.max_scale,
    )?);
    let features: Vec<_> = band
        .classify(&diagram)
        .into_iter()
        .filter(|f| f.death > f.birth)
        .collect();
    let signal: Vec<_> = features.iter().filter(|f| !f.noise).collect();
    println!(
        "{} H1 cycles off the diagonal, {} outside the band",
        features.len(),
        signal.len()
    );
    for f in signal {
        println!("  ({:.3}, {:.3})", f.birth, f.death);
    }
    Ok(())
}
