//! Vietoris–Rips filtrations built by clique expansion of the
//! neighbourhood graph.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Result, TdaError};
use crate::metric::DistanceMatrix;

/// A simplex given by its strictly increasing vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Sorts and deduplicates-checks the vertex list.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(TdaError::invalid("a simplex needs at least one vertex"));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(TdaError::invalid("simplex vertices must be distinct"));
        }
        Ok(Self { vertices })
    }

    fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The codimension-one faces, in the order obtained by dropping each
    /// vertex in turn. Empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let k = if self.vertices.len() > 1 {
            self.vertices.len()
        } else {
            0
        };
        (0..k).map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }
}

/// A simplex together with the scale at which it enters the filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

fn filtration_order(a: &FilteredSimplex, b: &FilteredSimplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.simplex.dimension().cmp(&b.simplex.dimension()))
        .then_with(|| a.simplex.vertices().cmp(b.simplex.vertices()))
}

/// Simplices sorted by `(value, dimension, vertices)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    simplices: Vec<FilteredSimplex>,
    max_dimension: usize,
    max_scale: f64,
}

impl Filtration {
    /// Validates an explicit list of filtered simplices: vertices must be
    /// present, every facet must precede its cofaces with a value no larger,
    /// and no value may exceed `max_scale`. The list is sorted into
    /// filtration order.
    pub fn from_simplices(
        mut simplices: Vec<FilteredSimplex>,
        max_dimension: usize,
        max_scale: f64,
    ) -> Result<Self> {
        check_scale(max_scale)?;
        simplices.sort_by(filtration_order);
        let mut seen: HashMap<&[usize], f64> = HashMap::with_capacity(simplices.len());
        for s in &simplices {
            if !(s.value >= 0.0) || s.value > max_scale {
                return Err(TdaError::invalid(format!(
                    "filtration value {} outside [0, {max_scale}]",
                    s.value
                )));
            }
            if s.simplex.dimension() > max_dimension {
                return Err(TdaError::invalid("simplex exceeds max_dimension"));
            }
            for facet in s.simplex.facets() {
                match seen.get(facet.as_slice()) {
                    Some(&v) if v <= s.value => {}
                    _ => {
                        return Err(TdaError::invalid(format!(
                            "facet {facet:?} of {:?} missing or enters later",
                            s.simplex.vertices()
                        )))
                    }
                }
            }
            if seen.insert(s.simplex.vertices(), s.value).is_some() {
                return Err(TdaError::invalid("duplicate simplex"));
            }
        }
        Ok(Self {
            simplices,
            max_dimension,
            max_scale,
        })
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dimension(&self) -> usize {
        self.max_dimension
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    pub fn vertex_count(&self) -> usize {
        self.simplices
            .iter()
            .filter(|s| s.simplex.dimension() == 0)
            .count()
    }

    /// Number of simplices of each dimension `0..=max_dimension`.
    pub fn counts_by_dimension(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dimension + 1];
        for s in &self.simplices {
            counts[s.simplex.dimension()] += 1;
        }
        counts
    }

    /// The simplicial complex at scale `epsilon`: every simplex whose value
    /// is at most `epsilon`.
    pub fn complex_at_scale(&self, epsilon: f64) -> Result<Vec<Simplex>> {
        if !(epsilon >= 0.0) {
            return Err(TdaError::invalid(format!(
                "epsilon must be non-negative, got {epsilon}"
            )));
        }
        if epsilon > self.max_scale {
            return Err(TdaError::invalid(format!(
                "epsilon {epsilon} exceeds the filtration's max_scale {}",
                self.max_scale
            )));
        }
        let end = self.simplices.partition_point(|s| s.value <= epsilon);
        Ok(self.simplices[..end]
            .iter()
            .map(|s| s.simplex.clone())
            .collect())
    }

    /// Text form: a `#` header carrying the parameters, then one simplex per
    /// line as `value v0 v1 ... vk` in filtration order.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# max_dimension={} max_scale={}\n",
            self.max_dimension, self.max_scale
        );
        for s in &self.simplices {
            write!(out, "{}", s.value).unwrap();
            for v in s.simplex.vertices() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Filtration::to_text`] output. Without a header the maximum
    /// dimension and scale are taken from the simplices themselves.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut max_dimension = None;
        let mut max_scale = None;
        let mut simplices = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for field in header.split_whitespace() {
                    if let Some(v) = field.strip_prefix("max_dimension=") {
                        max_dimension = Some(
                            v.parse()
                                .map_err(|_| TdaError::parse(lineno, "bad max_dimension"))?,
                        );
                    } else if let Some(v) = field.strip_prefix("max_scale=") {
                        max_scale = Some(
                            v.parse()
                                .map_err(|_| TdaError::parse(lineno, "bad max_scale"))?,
                        );
                    }
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let value: f64 = fields
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| TdaError::parse(lineno, "missing filtration value"))?;
            let vertices = fields
                .map(|v| v.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| TdaError::parse(lineno, "bad vertex index"))?;
            let simplex =
                Simplex::new(vertices).map_err(|e| TdaError::parse(lineno, e.to_string()))?;
            simplices.push(FilteredSimplex { simplex, value });
        }
        let max_dimension = max_dimension.unwrap_or_else(|| {
            simplices
                .iter()
                .map(|s| s.simplex.dimension())
                .max()
                .unwrap_or(0)
        });
        let max_scale =
            max_scale.unwrap_or_else(|| simplices.iter().map(|s| s.value).fold(0.0, f64::max));
        Self::from_simplices(simplices, max_dimension, max_scale)
    }
}

fn check_scale(max_scale: f64) -> Result<()> {
    if !(max_scale > 0.0) || !max_scale.is_finite() {
        return Err(TdaError::invalid(format!(
            "max_scale must be a positive finite real, got {max_scale}"
        )));
    }
    Ok(())
}

/// Builds the Rips filtration of `dm` with simplices up to `max_dimension`
/// and all pairwise distances at most `max_scale`.
///
/// Cliques are grown one vertex at a time from the upper neighbourhoods of
/// the thresholded graph, so only actual cliques are visited.
pub fn build_rips(dm: &DistanceMatrix, max_dimension: usize, max_scale: f64) -> Result<Filtration> {
    check_scale(max_scale)?;
    let n = dm.size();
    if max_dimension + 1 > n {
        return Err(TdaError::invalid(format!(
            "max_dimension {max_dimension} needs at least {} points, cloud has {n}",
            max_dimension + 1
        )));
    }
    let upper: Vec<Vec<usize>> = (0..n)
        .map(|i| (i + 1..n).filter(|&j| dm.get(i, j) <= max_scale).collect())
        .collect();

    let mut simplices = Vec::new();
    let mut stack: Vec<(Vec<usize>, f64, Vec<usize>)> = Vec::new();
    for v in (0..n).rev() {
        stack.push((vec![v], 0.0, upper[v].clone()));
    }
    while let Some((vertices, value, candidates)) = stack.pop() {
        let dim = vertices.len() - 1;
        if dim < max_dimension {
            for (pos, &u) in candidates.iter().enumerate().rev() {
                let joined = vertices.iter().fold(value, |acc, &w| acc.max(dm.get(w, u)));
                let next: Vec<usize> = intersect_sorted(&candidates[pos + 1..], &upper[u]);
                let mut grown = vertices.clone();
                grown.push(u);
                stack.push((grown, joined, next));
            }
        }
        simplices.push(FilteredSimplex {
            simplex: Simplex::from_sorted(vertices),
            value,
        });
    }
    simplices.sort_by(filtration_order);
    Ok(Filtration {
        simplices,
        max_dimension,
        max_scale,
    })
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distance_matrix, Metric, PointCloud};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn uniform_matrix(n: usize, d: f64) -> DistanceMatrix {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { d }).collect())
            .collect();
        DistanceMatrix::from_rows(rows).unwrap()
    }

    fn random_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::new(
            (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Exhaustive enumeration over every vertex subset of size <= k+1.
    fn brute_force(dm: &DistanceMatrix, k: usize, scale: f64) -> BTreeMap<Vec<usize>, f64> {
        let n = dm.size();
        let mut out = BTreeMap::new();
        for mask in 1u64..(1u64 << n) {
            let verts: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if verts.len() > k + 1 {
                continue;
            }
            let mut value: f64 = 0.0;
            for a in 0..verts.len() {
                for b in a + 1..verts.len() {
                    value = value.max(dm.get(verts[a], verts[b]));
                }
            }
            if value <= scale {
                out.insert(verts, value);
            }
        }
        out
    }

    #[test]
    fn triangle_example() {
        let f = build_rips(&uniform_matrix(3, 1.0), 2, 1.5).unwrap();
        assert_eq!(f.counts_by_dimension(), vec![3, 3, 1]);
        for s in f.simplices() {
            let expected = if s.simplex.dimension() == 0 { 0.0 } else { 1.0 };
            assert_eq!(s.value, expected);
        }
    }

    #[test]
    fn threshold_excludes_long_edge() {
        let f = build_rips(&uniform_matrix(2, 5.0), 1, 1.0).unwrap();
        assert_eq!(f.counts_by_dimension(), vec![2, 0]);
    }

    #[test]
    fn parameter_errors() {
        let dm = uniform_matrix(3, 1.0);
        assert!(build_rips(&dm, 1, 0.0).is_err());
        assert!(build_rips(&dm, 1, -1.0).is_err());
        assert!(build_rips(&dm, 3, 1.0).is_err());
        let f = build_rips(&dm, 1, 2.0).unwrap();
        assert!(f.complex_at_scale(2.5).is_err());
    }

    #[test]
    fn brute_force_equivalence_15_points() {
        let cloud = random_cloud(15, 2, 11);
        let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
        let scale = 0.45;
        let f = build_rips(&dm, 2, scale).unwrap();
        let expected = brute_force(&dm, 2, scale);
        let got: BTreeMap<Vec<usize>, f64> = f
            .simplices()
            .iter()
            .map(|s| (s.simplex.vertices().to_vec(), s.value))
            .collect();
        assert_eq!(got.len(), f.len());
        assert_eq!(got, expected);
    }

    #[test]
    fn zero_scale_is_vertex_set() {
        let cloud = random_cloud(12, 3, 5);
        let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
        let f = build_rips(&dm, 2, dm.diameter()).unwrap();
        let complex = f.complex_at_scale(0.0).unwrap();
        assert_eq!(complex.len(), 12);
        assert!(complex.iter().all(|s| s.dimension() == 0));
    }

    #[test]
    fn full_complex_count() {
        let cloud = random_cloud(9, 2, 3);
        let dm = distance_matrix(&cloud, &Metric::MaxNorm).unwrap();
        for k in 0..4 {
            let f = build_rips(&dm, k, dm.diameter()).unwrap();
            let binom = |n: usize, r: usize| -> usize {
                (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
            };
            let expected: usize = (1..=k + 1).map(|j| binom(9, j)).sum();
            assert_eq!(f.len(), expected);
        }
    }

    #[test]
    fn text_round_trip() {
        let cloud = random_cloud(10, 2, 8);
        let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
        let f = build_rips(&dm, 2, 0.6).unwrap();
        let back = Filtration::from_text(&f.to_text()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn from_text_rejects_missing_face() {
        let text = "0 0\n0 1\n1 0 1 2\n";
        assert!(Filtration::from_text(text).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn filtration_invariants(seed in any::<u64>(), n in 2usize..12, frac in 0.1..1.0f64) {
            let cloud = random_cloud(n, 2, seed);
            let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
            let scale = (dm.diameter() * frac).max(1e-9);
            let f = build_rips(&dm, 2.min(n - 1), scale).unwrap();
            let index: HashMap<&[usize], f64> = f
                .simplices()
                .iter()
                .map(|s| (s.simplex.vertices(), s.value))
                .collect();
            for w in f.simplices().windows(2) {
                prop_assert_ne!(filtration_order(&w[0], &w[1]), Ordering::Greater);
            }
            for s in f.simplices() {
                let vs = s.simplex.vertices();
                let mut rips: f64 = 0.0;
                for a in 0..vs.len() {
                    for b in a + 1..vs.len() {
                        rips = rips.max(dm.get(vs[a], vs[b]));
                    }
                }
                prop_assert_eq!(s.value, rips);
                for facet in s.simplex.facets() {
                    let fv = index.get(facet.as_slice()).copied();
                    prop_assert!(fv.is_some_and(|v| v <= s.value));
                }
            }
        }

        #[test]
        fn sublevel_complex_matches_rebuild(seed in any::<u64>(), frac in 0.0..1.0f64) {
            let cloud = random_cloud(10, 2, seed);
            let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
            let f = build_rips(&dm, 2, dm.diameter()).unwrap();
            let eps = dm.diameter() * frac;
            let complex = f.complex_at_scale(eps).unwrap();
            if eps > 0.0 {
                let rebuilt = build_rips(&dm, 2, eps).unwrap();
                let rebuilt: Vec<Simplex> = rebuilt.simplices().iter().map(|s| s.simplex.clone()).collect();
                prop_assert_eq!(&complex, &rebuilt);
            }
            let smaller = f.complex_at_scale(eps * 0.5).unwrap();
            prop_assert!(smaller.len() <= complex.len());
            prop_assert_eq!(&complex[..smaller.len()], &smaller[..]);
        }
    }
}
