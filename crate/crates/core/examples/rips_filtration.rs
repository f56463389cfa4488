//! Builds a Rips filtration on a unit square and lists the complex at a
//! few scales.

use tdakit::metric::{distance_matrix, Metric, PointCloud};
use tdakit::rips::build_rips;

fn main() -> tdakit::Result<()> {
    let square = PointCloud::new(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ])?;
    for metric in [Metric::euclidean(), Metric::p_norm(1.0)?, Metric::MaxNorm] {
        let dm = distance_matrix(&square, &metric)?;
        println!("{metric}: diagonal length {}", dm.get(0, 2));
    }

    let dm = distance_matrix(&square, &Metric::euclidean())?;
    let filtration = build_rips(&dm, 2, 2.0)?;
    println!(
        "{} simplices, by dimension {:?}",
        filtration.len(),
        filtration.counts_by_dimension()
    );
    for eps in [0.5, 1.0, 1.5] {
        let complex = filtration.complex_at_scale(eps)?;
        let edges = complex.iter().filter(|s| s.dimension() == 1).count();
        let triangles = complex.iter().filter(|s| s.dimension() == 2).count();
        println!(
            "eps {eps}: {} simplices ({edges} edges, {triangles} triangles)",
            complex.len()
        );
    }
    print!("{}", filtration.to_text());
    Ok(())
}
