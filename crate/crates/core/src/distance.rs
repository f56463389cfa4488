//! Wasserstein and bottleneck distances between persistence diagrams.
//!
//! Both distances use the sup-norm between points. Each diagram is
//! augmented with one diagonal slot per off-diagonal point of the other, so
//! an optimal matching is a perfect assignment on a square matrix: a point
//! sent to a diagonal slot pays its sup-norm distance to the diagonal,
//! `(death - birth) / 2`, and two diagonal slots match for free.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::assignment;
use crate::error::{Result, TdaError};
use crate::persistence::PersistenceDiagram;

/// Partner of a point in a matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Index into the off-diagonal points of the diagram.
    Point(usize),
    Diagonal,
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slot::Point(i) => serializer.serialize_u64(*i as u64),
            Slot::Diagonal => serializer.serialize_str("diagonal"),
        }
    }
}

/// One matched pair and its sup-norm distance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Assignment {
    pub left: Slot,
    pub right: Slot,
    pub cost: f64,
}

/// Which objective a matching optimises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Sum of `cost^p`.
    Wasserstein(f64),
    /// Largest single cost.
    Bottleneck,
}

/// An optimal matching between the off-diagonal points of two diagrams.
/// Diagonal-to-diagonal slots are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub assignments: Vec<Assignment>,
    /// Objective value: `sum cost^p` or the maximum cost.
    pub cost: f64,
    pub objective: Objective,
}

impl Matching {
    /// The distance implied by the objective: `cost^(1/p)` or `cost`.
    pub fn distance(&self) -> f64 {
        match self.objective {
            Objective::Wasserstein(p) => root(self.cost, p),
            Objective::Bottleneck => self.cost,
        }
    }

    /// Recomputes the objective from the assignments.
    pub fn recomputed_cost(&self) -> f64 {
        match self.objective {
            Objective::Wasserstein(p) => self.assignments.iter().map(|a| power(a.cost, p)).sum(),
            Objective::Bottleneck => self.assignments.iter().map(|a| a.cost).fold(0.0, f64::max),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matching serialises")
    }
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Matching", 4)?;
        match self.objective {
            Objective::Wasserstein(p) => {
                s.serialize_field("objective", "wasserstein")?;
                s.serialize_field("p", &p)?;
            }
            Objective::Bottleneck => {
                s.serialize_field("objective", "bottleneck")?;
                s.serialize_field("p", &Option::<f64>::None)?;
            }
        }
        s.serialize_field("assignments", &self.assignments)?;
        s.serialize_field("cost", &self.cost)?;
        s.end()
    }
}

#[inline]
pub(crate) fn power(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

#[inline]
fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

#[inline]
pub(crate) fn sup_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[inline]
pub(crate) fn diagonal_distance(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Sup-norm nearest point of the diagonal.
#[inline]
pub(crate) fn diagonal_projection(a: (f64, f64)) -> (f64, f64) {
    let m = (a.0 + a.1) / 2.0;
    (m, m)
}

/// Unpowered cost matrix of the augmented problem.
fn augmented_costs(left: &[(f64, f64)], right: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let (k1, k2) = (left.len(), right.len());
    let n = k1 + k2;
    let mut cost = vec![vec![0.0; n]; n];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            *c = match (i < k1, j < k2) {
                (true, true) => sup_distance(left[i], right[j]),
                (true, false) => diagonal_distance(left[i]),
                (false, true) => diagonal_distance(right[j]),
                (false, false) => 0.0,
            };
        }
    }
    cost
}

fn collect_assignments(
    k1: usize,
    k2: usize,
    assign: &[usize],
    cost: &[Vec<f64>],
) -> Vec<Assignment> {
    assign
        .iter()
        .enumerate()
        .filter_map(|(i, &j)| {
            let left = if i < k1 {
                Slot::Point(i)
            } else {
                Slot::Diagonal
            };
            let right = if j < k2 {
                Slot::Point(j)
            } else {
                Slot::Diagonal
            };
            if left == Slot::Diagonal && right == Slot::Diagonal {
                None
            } else {
                Some(Assignment {
                    left,
                    right,
                    cost: cost[i][j],
                })
            }
        })
        .collect()
}

/// Optimal `W_p` matching between two point lists (all strictly above the
/// diagonal).
pub fn wasserstein_points(left: &[(f64, f64)], right: &[(f64, f64)], p: f64) -> Matching {
    let cost = augmented_costs(left, right);
    let powered: Vec<Vec<f64>> = cost
        .iter()
        .map(|row| row.iter().map(|&c| power(c, p)).collect())
        .collect();
    let assign = assignment::solve(&powered);
    let assignments = collect_assignments(left.len(), right.len(), &assign, &cost);
    let mut m = Matching {
        assignments,
        cost: 0.0,
        objective: Objective::Wasserstein(p),
    };
    m.cost = m.recomputed_cost();
    m
}

/// Optimal bottleneck matching between two point lists.
pub fn bottleneck_points(left: &[(f64, f64)], right: &[(f64, f64)]) -> Matching {
    let cost = augmented_costs(left, right);
    let mut thresholds: Vec<f64> = cost.iter().flatten().copied().collect();
    thresholds.push(0.0);
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    // The largest threshold always admits a perfect matching.
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut best =
        perfect_matching(&cost, thresholds[hi]).expect("complete graph has a perfect matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(&cost, thresholds[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let assignments = collect_assignments(left.len(), right.len(), &best, &cost);
    let mut m = Matching {
        assignments,
        cost: 0.0,
        objective: Objective::Bottleneck,
    };
    m.cost = m.recomputed_cost();
    m
}

/// Perfect matching using only entries `<= threshold`, by augmenting paths.
fn perfect_matching(cost: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = cost.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        row: usize,
        cost: &[Vec<f64>],
        threshold: f64,
        visited: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..cost.len() {
            if cost[row][col] <= threshold && !visited[col] {
                visited[col] = true;
                let free = match match_col[col] {
                    None => true,
                    Some(other) => augment(other, cost, threshold, visited, match_col),
                };
                if free {
                    match_col[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(row, cost, threshold, &mut visited, &mut match_col) {
            return None;
        }
    }
    let mut assign = vec![0; n];
    for (col, row) in match_col.iter().enumerate() {
        assign[row.expect("perfect")] = col;
    }
    Some(assign)
}

/// Off-diagonal points of dimension `h` of both diagrams, truncated at
/// their common cap.
pub(crate) fn paired_points(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    h: usize,
) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    if d1.max_scale() != d2.max_scale() {
        return Err(TdaError::CapMismatch(d1.max_scale(), d2.max_scale()));
    }
    Ok((d1.finite_points(h)?, d2.finite_points(h)?))
}

fn check_order(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(TdaError::invalid(format!(
            "Wasserstein order must be finite and >= 1, got {p}"
        )));
    }
    Ok(())
}

/// Optimal `W_p` matching of the dimension-`h` points of two diagrams.
pub fn wasserstein_matching(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    h: usize,
    p: f64,
) -> Result<Matching> {
    check_order(p)?;
    let (a, b) = paired_points(d1, d2, h)?;
    Ok(wasserstein_points(&a, &b, p))
}

/// `W_p` distance between the dimension-`h` parts of two diagrams.
pub fn wasserstein(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    h: usize,
    p: f64,
) -> Result<f64> {
    Ok(wasserstein_matching(d1, d2, h, p)?.distance())
}

pub fn bottleneck_matching(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    h: usize,
) -> Result<Matching> {
    let (a, b) = paired_points(d1, d2, h)?;
    Ok(bottleneck_points(&a, &b))
}

/// Bottleneck distance between the dimension-`h` parts of two diagrams.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram, h: usize) -> Result<f64> {
    Ok(bottleneck_matching(d1, d2, h)?.distance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            points
                .iter()
                .map(|&(b, d)| PersistencePair::new(1, b, d))
                .collect(),
            [1],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn identical_diagrams() {
        let d = diagram(&[(0.0, 2.0), (1.0, 1.5), (0.3, 4.0)]);
        assert_eq!(wasserstein(&d, &d, 1, 2.0).unwrap(), 0.0);
        assert_eq!(wasserstein(&d, &d, 1, 1.0).unwrap(), 0.0);
        assert_eq!(bottleneck(&d, &d, 1).unwrap(), 0.0);
    }

    #[test]
    fn single_point_against_empty() {
        let a = diagram(&[(0.0, 2.0)]);
        let e = diagram(&[]);
        assert_eq!(wasserstein(&a, &e, 1, 2.0).unwrap(), 1.0);
        let m = wasserstein_matching(&a, &e, 1, 2.0).unwrap();
        assert_eq!(
            m.assignments,
            vec![Assignment {
                left: Slot::Point(0),
                right: Slot::Diagonal,
                cost: 1.0
            }]
        );
    }

    #[test]
    fn bottleneck_prefers_direct_match() {
        let a = diagram(&[(0.0, 2.0)]);
        let b = diagram(&[(0.0, 2.5)]);
        assert_eq!(bottleneck(&a, &b, 1).unwrap(), 0.5);
    }

    #[test]
    fn diagonal_points_are_invisible() {
        let a = diagram(&[(0.0, 2.0), (1.0, 3.0)]);
        let b = diagram(&[(0.5, 2.5)]);
        let b_diag = diagram(&[(0.5, 2.5), (1.7, 1.7)]);
        assert_eq!(
            wasserstein(&a, &b, 1, 1.0).unwrap(),
            wasserstein(&a, &b_diag, 1, 1.0).unwrap()
        );
        assert_eq!(
            bottleneck(&a, &b, 1).unwrap(),
            bottleneck(&a, &b_diag, 1).unwrap()
        );
    }

    #[test]
    fn infinite_deaths_truncate_at_cap() {
        let a = diagram(&[(0.0, f64::INFINITY)]);
        let b = diagram(&[(0.0, 9.0)]);
        assert_eq!(bottleneck(&a, &b, 1).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let a = diagram(&[(0.0, 2.0)]);
        let other_cap = a.clone().with_max_scale(5.0).unwrap();
        assert!(matches!(
            wasserstein(&a, &other_cap, 1, 2.0),
            Err(TdaError::CapMismatch(..))
        ));
        assert!(matches!(
            wasserstein(&a, &a, 0, 2.0),
            Err(TdaError::MissingDimension(0))
        ));
        assert!(wasserstein(&a, &a, 1, 0.5).is_err());
    }

    #[test]
    fn matching_json() {
        let a = diagram(&[(0.0, 2.0)]);
        let b = diagram(&[(0.0, 2.5), (1.0, 1.2)]);
        let json: serde_json::Value =
            serde_json::from_str(&wasserstein_matching(&a, &b, 1, 1.0).unwrap().to_json()).unwrap();
        assert_eq!(json["objective"], "wasserstein");
        assert_eq!(json["assignments"].as_array().unwrap().len(), 2);
        assert_eq!(json["assignments"][1]["left"], "diagonal");
    }
}
