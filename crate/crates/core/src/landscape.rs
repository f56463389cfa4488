//! Persistence landscapes stored exactly as piecewise-linear functions.
//!
//! Level `k` at `t` is the `k`-th largest tent height
//! `max(0, min(t - b, d - t))` over the diagram's points. Between two
//! consecutive critical parameters (births, deaths, tent peaks and
//! rising/falling crossings) every tent side is linear and their order is
//! fixed, so evaluating at the critical parameters and interpolating is
//! exact.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TdaError};
use crate::persistence::PersistenceDiagram;

/// Breakpoints `(t, value)` of one level, sorted by `t`. The function is
/// zero outside the first and last breakpoint.
pub type Level = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceLandscape {
    #[serde(rename = "dim")]
    homology_dimension: usize,
    #[serde(rename = "cap")]
    domain_cap: f64,
    levels: Vec<Level>,
}

const MERGE_EPS: f64 = 1e-12;
const SLOPE_EPS: f64 = 1e-9;

fn tent(point: (f64, f64), t: f64) -> f64 {
    (t - point.0).min(point.1 - t).max(0.0)
}

impl PersistenceLandscape {
    /// Builds a landscape from explicit levels, checking breakpoint order.
    pub fn from_levels(
        homology_dimension: usize,
        domain_cap: f64,
        levels: Vec<Level>,
    ) -> Result<Self> {
        for level in &levels {
            if level.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                return Err(TdaError::invalid(
                    "landscape breakpoints must be strictly increasing in t",
                ));
            }
            if level
                .iter()
                .any(|&(t, v)| !t.is_finite() || !v.is_finite() || v < 0.0)
            {
                return Err(TdaError::invalid(
                    "landscape values must be finite and non-negative",
                ));
            }
        }
        Ok(Self {
            homology_dimension,
            domain_cap,
            levels,
        })
    }

    pub fn homology_dimension(&self) -> usize {
        self.homology_dimension
    }

    pub fn domain_cap(&self) -> f64 {
        self.domain_cap
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `λ_k(t)` with `k` counted from zero; zero for missing levels.
    pub fn value(&self, k: usize, t: f64) -> f64 {
        self.levels.get(k).map_or(0.0, |level| evaluate(level, t))
    }

    /// `∫ λ_k(t) dt`, zero for missing levels.
    pub fn level_integral(&self, k: usize) -> f64 {
        self.levels.get(k).map_or(0.0, |l| trapezoid(l))
    }

    /// Values of every level on `resolution` evenly spaced parameters in
    /// `[0, cap]`, as CSV with columns `t,λ1,λ2,…`.
    pub fn to_grid_csv(&self, resolution: usize) -> Result<String> {
        if resolution < 2 {
            return Err(TdaError::invalid("grid resolution must be at least 2"));
        }
        let mut out = String::from("t");
        for k in 1..=self.levels.len() {
            write!(out, ",λ{k}").unwrap();
        }
        out.push('\n');
        for i in 0..resolution {
            let t = self.domain_cap * i as f64 / (resolution - 1) as f64;
            write!(out, "{t}").unwrap();
            for level in &self.levels {
                write!(out, ",{}", evaluate(level, t)).unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("landscape serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PersistenceLandscape = serde_json::from_str(text)?;
        Self::from_levels(raw.homology_dimension, raw.domain_cap, raw.levels)
    }
}

fn evaluate(level: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = match (level.first(), level.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return 0.0,
    };
    if t < first.0 || t > last.0 {
        return 0.0;
    }
    let idx = level.partition_point(|&(x, _)| x <= t);
    if idx == 0 {
        return first.1;
    }
    if idx == level.len() {
        return last.1;
    }
    let (t0, v0) = level[idx - 1];
    let (t1, v1) = level[idx];
    if t == t0 {
        return v0;
    }
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn trapezoid(level: &[(f64, f64)]) -> f64 {
    level
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

fn merge_close(ts: &mut Vec<f64>) {
    ts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(ts.len());
    for &t in ts.iter() {
        match out.last() {
            Some(&last) if t - last <= MERGE_EPS * last.abs().max(1.0) => {}
            _ => out.push(t),
        }
    }
    *ts = out;
}

/// Drops collinear interior breakpoints and redundant zeros at either end.
fn simplify(level: Level) -> Level {
    let mut out: Level = Vec::with_capacity(level.len());
    for p in level {
        while out.len() >= 2 {
            let (t0, v0) = out[out.len() - 2];
            let (t1, v1) = out[out.len() - 1];
            let s1 = (v1 - v0) / (t1 - t0);
            let s2 = (p.1 - v1) / (p.0 - t1);
            if (s1 - s2).abs() <= SLOPE_EPS {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    let start = out.iter().position(|&(_, v)| v > 0.0);
    let end = out.iter().rposition(|&(_, v)| v > 0.0);
    match (start, end) {
        (Some(s), Some(e)) => {
            let s = s.saturating_sub(1);
            let e = (e + 1).min(out.len() - 1);
            out[s..=e].to_vec()
        }
        _ => Vec::new(),
    }
}

fn drop_trailing_empty(levels: &mut Vec<Level>) {
    while levels.last().is_some_and(|l| l.is_empty()) {
        levels.pop();
    }
}

/// Exact landscape of the dimension-`h` points of `diagram`, with infinite
/// deaths truncated at the diagram's `max_scale`.
pub fn landscape_from_diagram(
    diagram: &PersistenceDiagram,
    h: usize,
) -> Result<PersistenceLandscape> {
    let points = diagram.finite_points(h)?;
    let mut critical = Vec::with_capacity(3 * points.len());
    for &(b, d) in &points {
        critical.extend([b, d, (b + d) / 2.0]);
    }
    for &(bi, di) in &points {
        let mi = (bi + di) / 2.0;
        for &(bj, dj) in &points {
            let mj = (bj + dj) / 2.0;
            // Rising side of i meets falling side of j.
            let t = (bi + dj) / 2.0;
            if bi <= t && t <= mi && mj <= t && t <= dj {
                critical.push(t);
            }
        }
    }
    merge_close(&mut critical);

    let mut levels: Vec<Level> = vec![Vec::with_capacity(critical.len()); points.len()];
    let mut heights = Vec::with_capacity(points.len());
    for &t in &critical {
        heights.clear();
        heights.extend(points.iter().map(|&p| tent(p, t)));
        heights.sort_by(|a, b| b.total_cmp(a));
        for (level, &v) in levels.iter_mut().zip(&heights) {
            level.push((t, v));
        }
    }
    let mut levels: Vec<Level> = levels.into_iter().map(simplify).collect();
    drop_trailing_empty(&mut levels);
    Ok(PersistenceLandscape {
        homology_dimension: h,
        domain_cap: diagram.max_scale(),
        levels,
    })
}

/// Pointwise mean of each level, evaluated on the union of the sample's
/// breakpoints.
pub fn mean_landscape(sample: &[PersistenceLandscape]) -> Result<PersistenceLandscape> {
    let first = sample
        .first()
        .ok_or_else(|| TdaError::Empty("mean of an empty landscape sample".into()))?;
    for l in sample {
        if l.homology_dimension != first.homology_dimension {
            return Err(TdaError::invalid(format!(
                "mixed homology dimensions {} and {}",
                first.homology_dimension, l.homology_dimension
            )));
        }
        if l.domain_cap != first.domain_cap {
            return Err(TdaError::CapMismatch(first.domain_cap, l.domain_cap));
        }
    }
    let depth = sample.iter().map(|l| l.levels.len()).max().unwrap_or(0);
    let n = sample.len() as f64;
    let mut levels = Vec::with_capacity(depth);
    for k in 0..depth {
        let mut ts: Vec<f64> = sample
            .iter()
            .filter_map(|l| l.levels.get(k))
            .flat_map(|level| level.iter().map(|&(t, _)| t))
            .collect();
        merge_close(&mut ts);
        let level: Level = ts
            .iter()
            .map(|&t| (t, sample.iter().map(|l| l.value(k, t)).sum::<f64>() / n))
            .collect();
        levels.push(simplify(level));
    }
    drop_trailing_empty(&mut levels);
    Ok(PersistenceLandscape {
        homology_dimension: first.homology_dimension,
        domain_cap: first.domain_cap,
        levels,
    })
}

/// Total area under all levels.
pub fn landscape_integral(landscape: &PersistenceLandscape) -> f64 {
    landscape.levels.iter().map(|l| trapezoid(l)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(
            points
                .iter()
                .map(|&(b, d)| PersistencePair::new(0, b, d))
                .collect(),
            [0],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn single_tent() {
        let l = landscape_from_diagram(&diagram(&[(0.0, 2.0)]), 0).unwrap();
        assert_eq!(l.levels(), &[vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]]);
        assert_eq!(l.value(1, 1.0), 0.0);
        assert_eq!(landscape_integral(&l), 1.0);
    }

    #[test]
    fn empty_diagram() {
        let l = landscape_from_diagram(&diagram(&[]), 0).unwrap();
        assert!(l.levels().is_empty());
        assert_eq!(landscape_integral(&l), 0.0);
        assert_eq!(l.to_json(), r#"{"dim":0,"cap":10.0,"levels":[]}"#);
    }

    #[test]
    fn doubled_interval() {
        let l = landscape_from_diagram(&diagram(&[(0.0, 2.0), (0.0, 2.0)]), 0).unwrap();
        assert_eq!(l.levels().len(), 2);
        assert_eq!(l.levels()[0], l.levels()[1]);
        assert_eq!(landscape_integral(&l), 2.0);
    }

    #[test]
    fn overlapping_tents() {
        // Tents (0,4) and (2,6) cross at t = 3 with height 1.
        let l = landscape_from_diagram(&diagram(&[(0.0, 4.0), (2.0, 6.0)]), 0).unwrap();
        assert_eq!(
            l.levels()[0],
            vec![(0.0, 0.0), (2.0, 2.0), (3.0, 1.0), (4.0, 2.0), (6.0, 0.0)]
        );
        assert_eq!(l.levels()[1], vec![(2.0, 0.0), (3.0, 1.0), (4.0, 0.0)]);
    }

    #[test]
    fn mean_of_disjoint_tents() {
        let a = landscape_from_diagram(&diagram(&[(0.0, 2.0)]), 0).unwrap();
        let b = landscape_from_diagram(&diagram(&[(2.0, 4.0)]), 0).unwrap();
        let m = mean_landscape(&[a, b]).unwrap();
        assert_eq!(m.value(0, 1.0), 0.5);
        assert_eq!(m.value(0, 3.0), 0.5);
        assert_eq!(m.value(0, 2.0), 0.0);
    }

    #[test]
    fn mean_with_zero_landscape_halves() {
        let a = landscape_from_diagram(&diagram(&[(0.0, 4.0), (1.0, 2.5)]), 0).unwrap();
        let zero = landscape_from_diagram(&diagram(&[]), 0).unwrap();
        let m = mean_landscape(&[a.clone(), zero]).unwrap();
        for t in [0.3, 1.0, 1.7, 2.0, 3.9] {
            for k in 0..2 {
                assert!((m.value(k, t) - a.value(k, t) / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mean_errors() {
        assert!(mean_landscape(&[]).is_err());
        let a = landscape_from_diagram(&diagram(&[(0.0, 2.0)]), 0).unwrap();
        let b = PersistenceLandscape::from_levels(1, 10.0, vec![]).unwrap();
        assert!(mean_landscape(&[a.clone(), b]).is_err());
        let c = PersistenceLandscape::from_levels(0, 5.0, vec![]).unwrap();
        assert!(matches!(
            mean_landscape(&[a, c]),
            Err(TdaError::CapMismatch(..))
        ));
    }

    #[test]
    fn missing_dimension() {
        assert!(matches!(
            landscape_from_diagram(&diagram(&[(0.0, 1.0)]), 1),
            Err(TdaError::MissingDimension(1))
        ));
    }

    #[test]
    fn json_round_trip_and_grid() {
        let l = landscape_from_diagram(&diagram(&[(0.0, 4.0), (2.0, 6.0)]), 0).unwrap();
        assert_eq!(PersistenceLandscape::from_json(&l.to_json()).unwrap(), l);
        let grid = l.to_grid_csv(11).unwrap();
        let lines: Vec<&str> = grid.lines().collect();
        assert_eq!(lines[0], "t,λ1,λ2");
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[3], "2,2,0");
        assert!(l.to_grid_csv(1).is_err());
    }
}
