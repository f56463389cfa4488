//! Writes diagram, barcode and landscape SVGs for a noisy circle into the
//! directory given as the first argument (default `plots`).

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdakit::datasets::noisy_circle;
use tdakit::landscape::landscape_from_diagram;
use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::persistence::{compute_persistence, diagram_to_barcode};
use tdakit::plot::{barcode_svg, diagram_svg, landscape_svg};
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plots".into()));
    fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cloud = PointCloud::new(noisy_circle(&mut rng, 40, [0.0, 0.0], 1.0, 0.08))?;
    let dm = distance_matrix(&cloud, &Metric::euclidean())?;
    let diagram = compute_persistence(&build_rips(&dm, 2, 2.0)?);

    fs::write(
        dir.join("circle.diagram.svg"),
        diagram_svg(&diagram, "noisy circle"),
    )?;
    fs::write(
        dir.join("circle.barcode.svg"),
        barcode_svg(&diagram_to_barcode(&diagram), "noisy circle"),
    )?;
    for h in [0, 1] {
        let l = landscape_from_diagram(&diagram, h)?;
        fs::write(
            dir.join(format!("circle.h{h}.landscape.svg")),
            landscape_svg(&l, &format!("H{h} landscape")),
        )?;
    }
    println!("wrote 4 SVGs to {}", dir.display());
    Ok(())
}
