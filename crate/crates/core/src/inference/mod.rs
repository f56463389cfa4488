//! Hypothesis tests and confidence statements for samples of topological
//! summaries.

mod band;
mod permutation;
mod ttest;

pub use band::{confidence_band, BandSettings, ConfidenceBand, FeatureClass};
pub use permutation::{
    diagram_permutation_test, landscape_functional_test, permutation_p_value, split_count,
    Direction, Permutations, EXHAUSTIVE_AUTO_LIMIT,
};
pub use ttest::two_sample_t_test;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    DiagramPermutation,
    LandscapePermutation,
    TwoSampleT,
}

/// How the null distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationsUsed {
    /// Every relabeling was evaluated.
    Exhaustive,
    /// This many random relabelings were drawn.
    Sampled(usize),
    /// The test is not permutation based.
    None,
}

/// Outcome of a two-sample test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub p_value: f64,
    #[serde(with = "signed_float")]
    pub observed_statistic: f64,
    pub permutations_used: PermutationsUsed,
    /// Relabelings evaluated, including the observed one.
    pub relabelings: u64,
    pub seed: u64,
    pub homology_dimension: Option<usize>,
    pub group_sizes: [usize; 2],
    /// Tests run alongside this one; no multiple-testing correction is applied.
    pub tests_run: usize,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn summary(&self) -> String {
        let dim = self
            .homology_dimension
            .map(|h| format!(" H{h}"))
            .unwrap_or_default();
        let null = match self.permutations_used {
            PermutationsUsed::None => String::new(),
            _ => format!(" ({} relabelings)", self.relabelings),
        };
        format!(
            "{:?}{dim}: statistic {} p-value {}{null}",
            self.method, self.observed_statistic, self.p_value
        )
    }
}

/// Serialises non-finite values as the strings `inf`, `-inf`, `nan`.
mod signed_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
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
