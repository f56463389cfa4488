//! Persistence of a noisy circle: many short-lived components, one long
//! loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdakit::datasets::{noisy_circle, ring_with_outliers};
use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::persistence::{compute_persistence, diagram_to_barcode};
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cloud = PointCloud::new(noisy_circle(&mut rng, 60, [0.0, 0.0], 1.0, 0.05))?;
    let dm = distance_matrix(&cloud, &Metric::euclidean())?;
    let diagram = compute_persistence(&build_rips(&dm, 2, 2.0)?);

    let mut loops: Vec<_> = diagram
        .pairs_in(1)
        .filter(|p| p.persistence() > 0.0)
        .collect();
    loops.sort_by(|a, b| b.persistence().total_cmp(&a.persistence()));
    println!("H0 pairs: {}", diagram.pairs_in(0).count());
    println!("H1 pairs off the diagonal: {}", loops.len());
    if let Some(top) = loops.first() {
        println!("longest loop: born {:.3}, dies {:.3}", top.birth, top.death);
    }
    for eps in [0.05, 0.3, 1.0, 1.9] {
        println!(
            "eps {eps}: {} components, {} loops",
            diagram.betti_at(0, eps)?,
            diagram.betti_at(1, eps)?
        );
    }

    // Eighteen points on a ring and two far outliers.
    let dm = distance_matrix(&ring_with_outliers(), &Metric::euclidean())?;
    let diagram = compute_persistence(&build_rips(&dm, 2, 2.5)?);
    let barcode = diagram_to_barcode(&diagram);
    println!(
        "ring with outliers at eps 1: {} components, {} loop; {} bars",
        barcode.count_at(0, 1.0),
        barcode.count_at(1, 1.0),
        barcode.len()
    );
    Ok(())
}
