//! Bootstrap confidence band separating persistent features from
//! topological noise.
//!
//! `c_n` is the `(1 - alpha)` empirical quantile of the bottleneck
//! distances between the diagram of the full cloud and the diagrams of
//! bootstrap resamples. A feature whose lifespan `death - birth` is below
//! `sqrt(2) * c_n` is indistinguishable from zero.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::bottleneck;
use crate::error::{Result, TdaError};
use crate::metric::{distance_matrix, Metric, PointCloud};
use crate::persistence::{compute_persistence, PersistenceDiagram, PersistencePair};
use crate::rips::build_rips;
use crate::rng::stream_rng;

/// Filtration parameters shared by the full cloud and every resample.
#[derive(Debug, Clone, Copy)]
pub struct BandSettings {
    pub metric: Metric,
    pub max_dimension: usize,
    pub max_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub c_n: f64,
    pub alpha: f64,
    pub bootstrap_rounds: usize,
    pub seed: u64,
    pub homology_dimension: usize,
    /// Bottleneck distance of each bootstrap round, in round order.
    pub bootstrap_distances: Vec<f64>,
}

/// A diagram point with its band classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureClass {
    pub birth: f64,
    #[serde(with = "inf_as_string")]
    pub death: f64,
    pub noise: bool,
}

impl ConfidenceBand {
    /// Lifespan below which a feature counts as noise.
    pub fn threshold(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.c_n
    }

    pub fn is_noise(&self, pair: &PersistencePair) -> bool {
        pair.death - pair.birth < self.threshold()
    }

    /// Classifies every pair of the band's homology dimension.
    pub fn classify(&self, diagram: &PersistenceDiagram) -> Vec<FeatureClass> {
        diagram
            .pairs_in(self.homology_dimension)
            .map(|p| FeatureClass {
                birth: p.birth,
                death: p.death,
                noise: self.is_noise(p),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("band serialises")
    }
}

/// Diagram of a cloud under the given filtration settings.
fn diagram_of(cloud: &PointCloud, settings: &BandSettings) -> Result<PersistenceDiagram> {
    let dm = distance_matrix(cloud, &settings.metric)?;
    let filtration = build_rips(&dm, settings.max_dimension, settings.max_scale)?;
    Ok(compute_persistence(&filtration))
}

/// Computes `c_n` for homology dimension `h`. Round `r` resamples the cloud
/// with replacement from the stream `(seed, r)`.
pub fn confidence_band(
    cloud: &PointCloud,
    h: usize,
    alpha: f64,
    bootstrap_rounds: usize,
    seed: u64,
    settings: &BandSettings,
) -> Result<ConfidenceBand> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TdaError::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if bootstrap_rounds == 0 {
        return Err(TdaError::invalid(
            "at least one bootstrap round is required",
        ));
    }
    let full = diagram_of(cloud, settings)?;
    full.finite_points(h)?;
    let n = cloud.len();
    let bootstrap_distances = (0..bootstrap_rounds as u64)
        .into_par_iter()
        .map(|round| {
            let mut rng = stream_rng(seed, round);
            let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resampled = diagram_of(&cloud.select(&picks), settings)?;
            bottleneck(&full, &resampled, h)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut sorted = bootstrap_distances.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((1.0 - alpha) * bootstrap_rounds as f64 - 1e-9).ceil() as usize;
    let c_n = sorted[rank.clamp(1, bootstrap_rounds) - 1];
    Ok(ConfidenceBand {
        c_n,
        alpha,
        bootstrap_rounds,
        seed,
        homology_dimension: h,
        bootstrap_distances,
    })
}

mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
