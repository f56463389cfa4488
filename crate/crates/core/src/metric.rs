//! Point clouds, the two metric families used to compare points, and
//! pairwise distance matrices.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TdaError};

/// A finite sample of points in `dimension`-dimensional real space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dimension: usize,
}

impl PointCloud {
    /// Validates and wraps a list of points. Every point must have the same
    /// positive number of finite coordinates.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| TdaError::Empty("point cloud has no points".into()))?;
        if dimension == 0 {
            return Err(TdaError::invalid(
                "points must have at least one coordinate",
            ));
        }
        for p in &points {
            if p.len() != dimension {
                return Err(TdaError::DimensionMismatch {
                    expected: dimension,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(TdaError::invalid("coordinates must be finite"));
            }
        }
        Ok(Self { points, dimension })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Builds a new cloud from the given indices (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            dimension: self.dimension,
        }
    }

    /// Reads one point per line. Blank lines are ignored.
    pub fn read_csv<R: BufRead>(reader: R, options: &CsvOptions) -> Result<Self> {
        let mut points = Vec::new();
        let mut width = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            if idx == 0 && options.skip_header {
                continue;
            }
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut point = Vec::new();
            for field in trimmed.split(options.delimiter) {
                let field = field.trim();
                let value: f64 = field
                    .parse()
                    .map_err(|_| TdaError::parse(lineno, format!("not a number: {field:?}")))?;
                if !value.is_finite() {
                    return Err(TdaError::parse(lineno, "non-finite coordinate"));
                }
                point.push(value);
            }
            match width {
                None => width = Some(point.len()),
                Some(w) if w != point.len() => {
                    return Err(TdaError::parse(
                        lineno,
                        format!("expected {w} fields, found {}", point.len()),
                    ))
                }
                _ => {}
            }
            points.push(point);
        }
        Self::new(points)
    }

    /// Writes the cloud in the format accepted by [`PointCloud::read_csv`]
    /// with default options.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Options for point-cloud CSV ingestion.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: char,
    pub skip_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: ',',
            skip_header: false,
        }
    }
}

/// The metric used to compare points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    PNorm { p: f64 },
    MaxNorm,
}

impl Metric {
    pub fn euclidean() -> Self {
        Metric::PNorm { p: 2.0 }
    }

    pub fn p_norm(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(TdaError::invalid(format!(
                "p must be a finite real >= 1, got {p}"
            )));
        }
        Ok(Metric::PNorm { p })
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match *self {
            Metric::PNorm { p } => p_distance(x, y, p),
            Metric::MaxNorm => max_distance(x, y),
        }
    }
}

impl Default for Metric {
    fn default() -> Self {
        Metric::euclidean()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::PNorm { p } => write!(f, "p{p}"),
            Metric::MaxNorm => f.write_str("max"),
        }
    }
}

impl FromStr for Metric {
    type Err = TdaError;

    /// Accepts `max`, or `p` followed by the exponent (`p1`, `p2`, `p3.5`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("max") {
            return Ok(Metric::MaxNorm);
        }
        let p = s
            .strip_prefix('p')
            .and_then(|rest| rest.parse::<f64>().ok())
            .ok_or_else(|| {
                TdaError::invalid(format!("unknown metric {s:?}; use p1, p2, pN or max"))
            })?;
        Metric::p_norm(p)
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(TdaError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// `(sum |x_i - y_i|^p)^(1/p)`. An infinite `p` gives the maximum distance.
pub fn p_distance(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    check_lengths(x, y)?;
    if !(p >= 1.0) {
        return Err(TdaError::invalid(format!("p must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return max_distance(x, y);
    }
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    let d = if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    Ok(d)
}

/// Largest coordinate-wise absolute difference.
pub fn max_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a dense row-major matrix after checking symmetry, a zero
    /// diagonal and finite non-negative entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(TdaError::Empty("distance matrix has no rows".into()));
        }
        let mut entries = Vec::with_capacity(size * size);
        for row in &rows {
            if row.len() != size {
                return Err(TdaError::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        for i in 0..size {
            if entries[i * size + i] != 0.0 {
                return Err(TdaError::invalid("distance matrix diagonal must be zero"));
            }
            for j in 0..size {
                let v = entries[i * size + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(TdaError::invalid(
                        "distances must be finite and non-negative",
                    ));
                }
                if v != entries[j * size + i] {
                    return Err(TdaError::invalid("distance matrix must be symmetric"));
                }
            }
        }
        Ok(Self { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Computes every pairwise distance under `metric`. Rows are filled in
/// parallel; each entry is computed once and mirrored.
pub fn distance_matrix(cloud: &PointCloud, metric: &Metric) -> Result<DistanceMatrix> {
    if let Metric::PNorm { p } = metric {
        if !(*p >= 1.0) {
            return Err(TdaError::invalid(format!("p must be >= 1, got {p}")));
        }
    }
    let n = cloud.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| metric.distance(cloud.point(i), cloud.point(j)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut entries = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &d) in row.iter().enumerate() {
            let j = i + 1 + offset;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { size: n, entries })
}
