//! Wasserstein and bottleneck distances between two small diagrams, with
//! the optimal matching.

use tdakit::distance::{bottleneck, wasserstein, wasserstein_matching};
use tdakit::persistence::{PersistenceDiagram, PersistencePair};

fn main() -> tdakit::Result<()> {
    let a = PersistenceDiagram::new(
        vec![
            PersistencePair::new(1, 0.0, 2.0),
            PersistencePair::new(1, 1.0, 1.2),
        ],
        [1],
        5.0,
    )?;
    let b = PersistenceDiagram::new(vec![PersistencePair::new(1, 0.0, 2.5)], [1], 5.0)?;
    for p in [1.0, 2.0] {
        println!("W{p} = {}", wasserstein(&a, &b, 1, p)?);
    }
    println!("bottleneck = {}", bottleneck(&a, &b, 1)?);
    println!("{}", wasserstein_matching(&a, &b, 1, 2.0)?.to_json());
    Ok(())
}
