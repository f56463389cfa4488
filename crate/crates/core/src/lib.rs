//! Persistent homology summaries of point clouds and statistical inference
//! on samples of them.
//!
//! The pipeline runs from a [`metric::PointCloud`] through a Rips
//! [`rips::Filtration`] to a [`persistence::PersistenceDiagram`], which can
//! be compared ([`distance`]), averaged ([`frechet`]), turned into
//! [`landscape::PersistenceLandscape`]s, and fed to the tests in
//! [`inference`]. The [`cli`] module backs the `tdakit` binary.
//!
//! ```
//! use tdakit::metric::{distance_matrix, Metric, PointCloud};
//! use tdakit::persistence::compute_persistence;
//! use tdakit::rips::build_rips;
//!
//! let square = PointCloud::new(vec![
//!     vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0],
//! ]).unwrap();
//! let dm = distance_matrix(&square, &Metric::euclidean()).unwrap();
//! let diagram = compute_persistence(&build_rips(&dm, 2, 2.0).unwrap());
//! assert_eq!(diagram.betti_at(1, 1.2).unwrap(), 1);
//! ```
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod assignment;
pub mod cli;
pub mod datasets;
pub mod distance;
pub mod error;
pub mod frechet;
pub mod inference;
pub mod landscape;
pub mod metric;
pub mod persistence;
pub mod plot;
pub mod rips;
pub mod rng;
pub mod union_find;

pub use error::{Result, TdaError};
