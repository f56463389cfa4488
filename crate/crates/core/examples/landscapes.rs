//! Landscapes of two disjoint circles: the first two H0 levels carry
//! almost all of the mass.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdakit::datasets::two_circles;
use tdakit::landscape::{landscape_from_diagram, landscape_integral, mean_landscape};
use tdakit::metric::{distance_matrix, Metric};
use tdakit::persistence::compute_persistence;
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let mut sample = Vec::new();
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dm = distance_matrix(&two_circles(&mut rng, 60), &Metric::euclidean())?;
        let diagram = compute_persistence(&build_rips(&dm, 2, 2.5)?);
        for h in [0, 1] {
            let l = landscape_from_diagram(&diagram, h)?;
            let areas: Vec<String> = (0..3)
                .map(|k| format!("{:.4}", l.level_integral(k)))
                .collect();
            println!("seed {seed} H{h}: level integrals {}", areas.join(" "));
        }
        sample.push(landscape_from_diagram(&diagram, 1)?);
    }
    let mean = mean_landscape(&sample)?;
    println!(
        "mean H1 landscape: {} levels, integral {:.4}",
        mean.levels().len(),
        landscape_integral(&mean)
    );
    println!("λ1 of the mean at t = 1: {:.4}", mean.value(0, 1.0));
    print!("{}", mean.to_grid_csv(6)?);
    Ok(())
}
