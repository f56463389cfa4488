//! Persistent homology over the two-element field.
//!
//! Columns of the boundary matrix are reduced left to right, one
//! dimension at a time (a column of dimension `d` only ever meets rows of
//! dimension `d - 1`). A non-zero reduced column `j` with lowest entry `i`
//! gives the pair `(value(i), value(j))`; positive simplices that are never
//! paired give classes that survive to the end of the filtration.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Result, TdaError};
use crate::rips::Filtration;
use crate::union_find::UnionFind;

/// One feature: alive on `[birth, death)`. `death` is `f64::INFINITY` for
/// classes that never die within the filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Self { dim, birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn sort_key(&self, other: &Self) -> std::cmp::Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// A multiset of persistence pairs for a set of homology dimensions.
///
/// `max_scale` is the scale at which the filtration stopped; it is the cap
/// used whenever infinite deaths must be made finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
    dimensions: BTreeSet<usize>,
    max_scale: f64,
}

impl PersistenceDiagram {
    /// Validates the pairs and sorts them by `(dim, birth, death)`. The
    /// dimensions of all pairs are added to `dimensions`.
    pub fn new(
        mut pairs: Vec<PersistencePair>,
        dimensions: impl IntoIterator<Item = usize>,
        max_scale: f64,
    ) -> Result<Self> {
        if !(max_scale > 0.0) || !max_scale.is_finite() {
            return Err(TdaError::invalid(format!(
                "diagram max_scale must be positive and finite, got {max_scale}"
            )));
        }
        let mut dims: BTreeSet<usize> = dimensions.into_iter().collect();
        for p in &pairs {
            if !p.birth.is_finite() || p.birth < 0.0 {
                return Err(TdaError::invalid(format!("invalid birth {}", p.birth)));
            }
            if p.death.is_nan() || p.death < p.birth {
                return Err(TdaError::invalid(format!(
                    "death {} precedes birth {}",
                    p.death, p.birth
                )));
            }
            dims.insert(p.dim);
        }
        pairs.sort_by(PersistencePair::sort_key);
        Ok(Self {
            pairs,
            dimensions: dims,
            max_scale,
        })
    }

    /// An empty diagram covering `dimensions`.
    pub fn empty(dimensions: impl IntoIterator<Item = usize>, max_scale: f64) -> Result<Self> {
        Self::new(Vec::new(), dimensions, max_scale)
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn dimensions(&self) -> &BTreeSet<usize> {
        &self.dimensions
    }

    pub fn max_scale(&self) -> f64 {
        self.max_scale
    }

    pub fn covers(&self, h: usize) -> bool {
        self.dimensions.contains(&h)
    }

    pub(crate) fn require(&self, h: usize) -> Result<()> {
        if self.covers(h) {
            Ok(())
        } else {
            Err(TdaError::MissingDimension(h))
        }
    }

    /// Marks `h` as computed (possibly with no pairs).
    pub fn with_dimension(mut self, h: usize) -> Self {
        self.dimensions.insert(h);
        self
    }

    /// Same pairs with a different truncation cap.
    pub fn with_max_scale(mut self, max_scale: f64) -> Result<Self> {
        if !(max_scale > 0.0) || !max_scale.is_finite() {
            return Err(TdaError::invalid(format!("invalid max_scale {max_scale}")));
        }
        self.max_scale = max_scale;
        Ok(self)
    }

    pub fn pairs_in(&self, h: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == h)
    }

    /// The `(birth, death)` points of dimension `h` with infinite deaths
    /// replaced by `max_scale`, keeping only those strictly above the
    /// diagonal.
    pub fn finite_points(&self, h: usize) -> Result<Vec<(f64, f64)>> {
        self.require(h)?;
        Ok(self
            .pairs_in(h)
            .map(|p| (p.birth, p.death.min(self.max_scale)))
            .filter(|(b, d)| d > b)
            .collect())
    }

    /// Number of features of dimension `h` alive at `epsilon`, i.e.
    /// `birth <= epsilon < death`.
    pub fn betti_at(&self, h: usize, epsilon: f64) -> Result<usize> {
        self.require(h)?;
        if !(epsilon >= 0.0) || epsilon > self.max_scale {
            return Err(TdaError::invalid(format!(
                "epsilon {epsilon} outside [0, {}]",
                self.max_scale
            )));
        }
        Ok(self
            .pairs_in(h)
            .filter(|p| p.birth <= epsilon && epsilon < p.death)
            .count())
    }

    /// CSV with header `dim,birth,death`; infinite deaths are written `inf`.
    pub fn to_csv(&self) -> String {
        pairs_to_csv(self.pairs.iter().map(|p| (p.dim, p.birth, p.death)))
    }

    /// Parses [`PersistenceDiagram::to_csv`] output. The diagram covers the
    /// dimensions that occur in the file.
    pub fn from_csv(text: &str, max_scale: f64) -> Result<Self> {
        let pairs = parse_pair_csv(text)?
            .into_iter()
            .map(|(dim, birth, death)| PersistencePair { dim, birth, death })
            .collect();
        Self::new(pairs, [], max_scale)
    }
}

fn pairs_to_csv(rows: impl Iterator<Item = (usize, f64, f64)>) -> String {
    let mut out = String::from("dim,birth,death\n");
    for (dim, birth, death) in rows {
        writeln!(out, "{dim},{birth},{death}").unwrap();
    }
    out
}

fn parse_pair_csv(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "dim,birth,death" => {}
        _ => return Err(TdaError::parse(1, "expected header `dim,birth,death`")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(TdaError::parse(
                lineno,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let dim = fields[0]
            .parse()
            .map_err(|_| TdaError::parse(lineno, "bad dimension"))?;
        let birth: f64 = fields[1]
            .parse()
            .map_err(|_| TdaError::parse(lineno, "bad birth"))?;
        let death: f64 = fields[2]
            .parse()
            .map_err(|_| TdaError::parse(lineno, "bad death"))?;
        if !birth.is_finite() || death.is_nan() || death == f64::NEG_INFINITY || death < birth {
            return Err(TdaError::parse(
                lineno,
                "birth must be finite and no larger than death",
            ));
        }
        rows.push((dim, birth, death));
    }
    Ok(rows)
}

/// A bar `[start, end)` of positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub start: f64,
    pub end: f64,
}

/// Multiset of intervals; zero-length features are not represented.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl Barcode {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Bars of dimension `h` covering `epsilon`.
    pub fn count_at(&self, h: usize, epsilon: f64) -> usize {
        self.intervals
            .iter()
            .filter(|i| i.dim == h && i.start <= epsilon && epsilon < i.end)
            .count()
    }

    pub fn to_csv(&self) -> String {
        pairs_to_csv(self.intervals.iter().map(|i| (i.dim, i.start, i.end)))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let intervals = parse_pair_csv(text)?
            .into_iter()
            .map(|(dim, start, end)| Interval { dim, start, end })
            .filter(|i| i.end > i.start)
            .collect();
        Ok(Self { intervals })
    }
}

/// One bar per pair with `death > birth`.
pub fn diagram_to_barcode(diagram: &PersistenceDiagram) -> Barcode {
    Barcode {
        intervals: diagram
            .pairs()
            .iter()
            .filter(|p| p.death > p.birth)
            .map(|p| Interval {
                dim: p.dim,
                start: p.birth,
                end: p.death,
            })
            .collect(),
    }
}

/// Persistence pairs of homology dimensions `0..max_dimension` (just `0`
/// for a vertex-only filtration) by boundary-matrix reduction.
pub fn compute_persistence(filtration: &Filtration) -> PersistenceDiagram {
    let simplices = filtration.simplices();
    let top = filtration.max_dimension();
    let reported = top.max(1);

    let index: HashMap<&[usize], u32> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.simplex.vertices(), i as u32))
        .collect();

    let mut positive = vec![false; simplices.len()];
    let mut paired = vec![false; simplices.len()];
    let mut pairs = Vec::new();

    for (i, s) in simplices.iter().enumerate() {
        if s.simplex.dimension() == 0 {
            positive[i] = true;
        }
    }

    for dim in 1..=top {
        // pivot_of[row] = reduced column whose lowest entry is `row`.
        let mut pivot_of: HashMap<u32, Vec<u32>> = HashMap::new();
        for (j, s) in simplices.iter().enumerate() {
            if s.simplex.dimension() != dim {
                continue;
            }
            let mut column: Vec<u32> = s
                .simplex
                .facets()
                .map(|facet| index[facet.as_slice()])
                .collect();
            column.sort_unstable();
            while let Some(&low) = column.last() {
                match pivot_of.get(&low) {
                    Some(other) => column = symmetric_difference(&column, other),
                    None => break,
                }
            }
            match column.last().copied() {
                None => positive[j] = true,
                Some(low) => {
                    let birth_simplex = &simplices[low as usize];
                    paired[low as usize] = true;
                    pairs.push(PersistencePair {
                        dim: dim - 1,
                        birth: birth_simplex.value,
                        death: s.value,
                    });
                    pivot_of.insert(low, column);
                }
            }
        }
    }

    for (i, s) in simplices.iter().enumerate() {
        if positive[i] && !paired[i] && s.simplex.dimension() < reported {
            pairs.push(PersistencePair {
                dim: s.simplex.dimension(),
                birth: s.value,
                death: f64::INFINITY,
            });
        }
    }

    PersistenceDiagram::new(pairs, 0..reported, filtration.max_scale())
        .expect("filtration values produce valid pairs")
}

/// Zero-dimensional pairs by union-find over the edges in filtration order.
/// Agrees with the `H0` part of [`compute_persistence`].
pub fn h0_union_find(filtration: &Filtration) -> Vec<PersistencePair> {
    let simplices = filtration.simplices();
    let n = simplices
        .iter()
        .filter(|s| s.simplex.dimension() == 0)
        .map(|s| s.simplex.vertices()[0] + 1)
        .max()
        .unwrap_or(0);
    let mut birth = vec![f64::NAN; n];
    for s in simplices.iter().filter(|s| s.simplex.dimension() == 0) {
        birth[s.simplex.vertices()[0]] = s.value;
    }
    let mut uf = UnionFind::new(n);
    // Oldest birth of each component, tracked at its root.
    let mut oldest = birth.clone();
    let mut pairs = Vec::new();
    for s in simplices.iter().filter(|s| s.simplex.dimension() == 1) {
        let (a, b) = (s.simplex.vertices()[0], s.simplex.vertices()[1]);
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let (elder, younger) = (oldest[ra].min(oldest[rb]), oldest[ra].max(oldest[rb]));
        pairs.push(PersistencePair::new(0, younger, s.value));
        let root = uf.union(ra, rb).unwrap();
        oldest[root] = elder;
    }
    for v in 0..n {
        if uf.find(v) == v && !birth[v].is_nan() {
            pairs.push(PersistencePair::new(0, oldest[v], f64::INFINITY));
        }
    }
    pairs.sort_by(PersistencePair::sort_key);
    pairs
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distance_matrix, DistanceMatrix, Metric, PointCloud};
    use crate::rips::build_rips;

    fn square() -> DistanceMatrix {
        // Unit square: sides 1, diagonals sqrt(2).
        let cloud = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        distance_matrix(&cloud, &Metric::euclidean()).unwrap()
    }

    #[test]
    fn square_has_one_loop() {
        let f = build_rips(&square(), 2, 2.0).unwrap();
        let d = compute_persistence(&f);
        // The second diagonal closes a cycle that a triangle fills at once.
        let h1: Vec<_> = d.pairs_in(1).filter(|p| p.persistence() > 0.0).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!(h1[0].birth, 1.0);
        assert_eq!(h1[0].death, 2f64.sqrt());
        assert_eq!(d.pairs_in(1).count(), 3);
        let h0: Vec<_> = d.pairs_in(0).collect();
        assert_eq!(h0.len(), 4);
        assert_eq!(h0.iter().filter(|p| p.is_infinite()).count(), 1);
        assert_eq!(d.betti_at(1, 1.2).unwrap(), 1);
        assert_eq!(d.betti_at(1, 0.9).unwrap(), 0);
        assert_eq!(d.betti_at(0, 0.5).unwrap(), 4);
        assert_eq!(d.betti_at(0, 1.0).unwrap(), 1);
    }

    #[test]
    fn loop_survives_when_scale_too_small() {
        let f = build_rips(&square(), 2, 1.2).unwrap();
        let d = compute_persistence(&f);
        let h1: Vec<_> = d.pairs_in(1).collect();
        assert_eq!(h1.len(), 1);
        assert!(h1[0].is_infinite());
    }

    #[test]
    fn single_point() {
        let dm = DistanceMatrix::from_rows(vec![vec![0.0]]).unwrap();
        let f = build_rips(&dm, 0, 1.0).unwrap();
        let d = compute_persistence(&f);
        assert_eq!(d.pairs(), &[PersistencePair::new(0, 0.0, f64::INFINITY)]);
        assert_eq!(diagram_to_barcode(&d).len(), 1);
    }

    #[test]
    fn duplicate_points_merge_at_zero() {
        let cloud = PointCloud::new(vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![3.0, 1.0]]).unwrap();
        let dm = distance_matrix(&cloud, &Metric::euclidean()).unwrap();
        let d = compute_persistence(&build_rips(&dm, 1, 5.0).unwrap());
        let h0: Vec<_> = d.pairs_in(0).copied().collect();
        assert_eq!(
            h0,
            vec![
                PersistencePair::new(0, 0.0, 0.0),
                PersistencePair::new(0, 0.0, 2.0),
                PersistencePair::new(0, 0.0, f64::INFINITY),
            ]
        );
        let bars = diagram_to_barcode(&d);
        assert_eq!(bars.len(), 2);
    }

    #[test]
    fn betti_errors() {
        let f = build_rips(&square(), 2, 2.0).unwrap();
        let d = compute_persistence(&f);
        assert!(matches!(
            d.betti_at(2, 0.5),
            Err(TdaError::MissingDimension(2))
        ));
        assert!(d.betti_at(0, 3.0).is_err());
    }

    #[test]
    fn barcode_examples() {
        let d =
            PersistenceDiagram::new(vec![PersistencePair::new(0, 0.0, f64::INFINITY)], [0], 1.0)
                .unwrap();
        let b = diagram_to_barcode(&d);
        assert_eq!(
            b.intervals,
            vec![Interval {
                dim: 0,
                start: 0.0,
                end: f64::INFINITY
            }]
        );

        let d =
            PersistenceDiagram::new(vec![PersistencePair::new(1, 0.4, 0.4)], [0, 1], 1.0).unwrap();
        assert!(diagram_to_barcode(&d).is_empty());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let pairs = vec![
            PersistencePair::new(0, 0.0, 0.1 + 0.2),
            PersistencePair::new(0, 0.0, f64::INFINITY),
            PersistencePair::new(1, 1.0 / 3.0, 2.0f64.sqrt()),
        ];
        let d = PersistenceDiagram::new(pairs, [0, 1], 2.0).unwrap();
        let text = d.to_csv();
        assert!(text.starts_with("dim,birth,death\n"));
        assert!(text.contains(",inf\n"));
        let back = PersistenceDiagram::from_csv(&text, 2.0).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = PersistenceDiagram::from_csv("dim,birth,death\n0,0,1\n0,2,1\n", 1.0).unwrap_err();
        assert!(matches!(err, TdaError::Parse { line: 3, .. }));
        let err = PersistenceDiagram::from_csv("birth,death\n", 1.0).unwrap_err();
        assert!(matches!(err, TdaError::Parse { line: 1, .. }));
    }

    #[test]
    fn truncation_uses_max_scale() {
        let d = PersistenceDiagram::new(
            vec![
                PersistencePair::new(0, 0.0, f64::INFINITY),
                PersistencePair::new(0, 0.5, 0.5),
                PersistencePair::new(0, 3.0, f64::INFINITY),
            ],
            [0],
            3.0,
        )
        .unwrap();
        assert_eq!(d.finite_points(0).unwrap(), vec![(0.0, 3.0)]);
    }

    #[test]
    fn union_find_matches_reduction_on_fixture() {
        let f = build_rips(&square(), 2, 2.0).unwrap();
        let d = compute_persistence(&f);
        let from_reduction: Vec<_> = d.pairs_in(0).copied().collect();
        assert_eq!(h0_union_find(&f), from_reduction);
    }
}
