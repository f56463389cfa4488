//! Static SVG renderings of barcodes, diagrams and landscapes.
//!
//! Output depends only on the input values; coordinates are printed with a
//! fixed number of decimals so files are byte-for-byte reproducible.

use std::fmt::Write as _;

use crate::landscape::PersistenceLandscape;
use crate::persistence::{Barcode, PersistenceDiagram};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Maps data coordinates in `[0, xmax] x [0, ymax]` to the plot area.
struct Frame {
    xmax: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * v / self.xmax
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * v / self.ymax
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let (x0, y0) = (self.x(0.0), self.y(0.0));
        let (x1, y1) = (self.x(self.xmax), self.y(self.ymax));
        writeln!(out, r#"<g class="axes" stroke="black" stroke-width="1">"#).unwrap();
        writeln!(
            out,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#
        )
        .unwrap();
        writeln!(out, "</g>").unwrap();
        for i in 0..=4 {
            let v = self.xmax * i as f64 / 4.0;
            writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.3}</text>"#,
                self.x(v),
                y0 + 14.0
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 10.0,
            escape(xlabel)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(ylabel)
        )
        .unwrap();
    }
}

fn positive_or_one(v: f64) -> f64 {
    if v > 0.0 && v.is_finite() {
        v
    } else {
        1.0
    }
}

/// Horizontal bars, one row per interval, grouped by dimension. Infinite
/// bars run to the right edge and carry an arrow marker.
pub fn barcode_svg(barcode: &Barcode, title: &str) -> String {
    let mut intervals = barcode.intervals.clone();
    intervals.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.start.total_cmp(&b.start))
            .then(a.end.total_cmp(&b.end))
    });
    let finite_max = intervals
        .iter()
        .flat_map(|i| [i.start, i.end])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let frame = Frame {
        xmax: positive_or_one(finite_max) * 1.05,
        ymax: intervals.len().max(1) as f64,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, "scale", "feature");
    for (row, i) in intervals.iter().enumerate() {
        let y = frame.y(intervals.len() as f64 - row as f64 - 0.5);
        let end = if i.end.is_finite() { i.end } else { frame.xmax };
        writeln!(
            out,
            r#"<line class="bar" data-dim="{}" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="2"/>"#,
            i.dim,
            frame.x(i.start),
            frame.x(end),
            colour(i.dim)
        )
        .unwrap();
        if !i.end.is_finite() {
            let x = frame.x(end);
            writeln!(
                out,
                r#"<path class="inf-marker" d="M{:.2},{:.2} L{x:.2},{y:.2} L{:.2},{:.2} Z" fill="{}"/>"#,
                x - 6.0,
                y - 4.0,
                x - 6.0,
                y + 4.0,
                colour(i.dim)
            )
            .unwrap();
        }
    }
    legend(&mut out, intervals.iter().map(|i| i.dim));
    out.push_str("</svg>\n");
    out
}

fn legend(out: &mut String, dims: impl Iterator<Item = usize>) {
    let mut dims: Vec<usize> = dims.collect();
    dims.sort_unstable();
    dims.dedup();
    for (row, dim) in dims.iter().enumerate() {
        let y = MARGIN + 14.0 * row as f64;
        writeln!(
            out,
            r#"<text class="legend" x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" fill="{}">H{dim}</text>"#,
            WIDTH - MARGIN - 24.0,
            colour(*dim)
        )
        .unwrap();
    }
}

/// Scatter of `(birth, death)` above the diagonal. Infinite deaths are
/// drawn as triangles on the top edge.
pub fn diagram_svg(diagram: &PersistenceDiagram, title: &str) -> String {
    let finite_max = diagram
        .pairs()
        .iter()
        .flat_map(|p| [p.birth, p.death])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let extent = positive_or_one(finite_max.max(diagram.max_scale())) * 1.05;
    let frame = Frame {
        xmax: extent,
        ymax: extent,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, "birth", "death");
    writeln!(
        out,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        frame.x(0.0),
        frame.y(0.0),
        frame.x(extent),
        frame.y(extent)
    )
    .unwrap();
    for p in diagram.pairs() {
        let x = frame.x(p.birth);
        if p.is_infinite() {
            let y = frame.y(extent);
            writeln!(
                out,
                r#"<path class="inf-marker" data-dim="{}" d="M{:.2},{:.2} L{:.2},{:.2} L{x:.2},{:.2} Z" fill="{}"/>"#,
                p.dim,
                x - 4.0,
                y,
                x + 4.0,
                y,
                y + 7.0,
                colour(p.dim)
            )
            .unwrap();
        } else {
            writeln!(
                out,
                r#"<circle class="point" data-dim="{}" cx="{x:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                p.dim,
                frame.y(p.death),
                colour(p.dim)
            )
            .unwrap();
        }
    }
    legend(&mut out, diagram.pairs().iter().map(|p| p.dim));
    out.push_str("</svg>\n");
    out
}

/// Every level as a polyline over `[0, cap]`.
pub fn landscape_svg(landscape: &PersistenceLandscape, title: &str) -> String {
    let peak = landscape
        .levels()
        .iter()
        .flatten()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max);
    let right = landscape
        .levels()
        .iter()
        .flatten()
        .map(|&(t, _)| t)
        .fold(landscape.domain_cap(), f64::max);
    let frame = Frame {
        xmax: positive_or_one(right),
        ymax: positive_or_one(peak) * 1.1,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, "t", "λ_k(t)");
    for (k, level) in landscape.levels().iter().enumerate() {
        let points: Vec<String> = level
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", frame.x(t), frame.y(v)))
            .collect();
        writeln!(
            out,
            r#"<polyline class="level" data-k="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            k + 1,
            points.join(" "),
            colour(k)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::{diagram_to_barcode, PersistencePair};

    fn fixture() -> PersistenceDiagram {
        PersistenceDiagram::new(
            vec![
                PersistencePair::new(0, 0.0, 0.4),
                PersistencePair::new(0, 0.0, 0.7),
                PersistencePair::new(0, 0.0, f64::INFINITY),
                PersistencePair::new(1, 0.5, 1.2),
                PersistencePair::new(1, 0.9, 0.9),
            ],
            [0, 1],
            1.5,
        )
        .unwrap()
    }

    #[test]
    fn empty_diagram_has_axes_and_diagonal_only() {
        let svg = diagram_svg(&PersistenceDiagram::empty([0], 1.0).unwrap(), "empty");
        assert!(svg.contains(r#"class="axes""#));
        assert!(svg.contains(r#"class="diagonal""#));
        assert!(!svg.contains(r#"class="point""#));
        assert!(!svg.contains("inf-marker"));
    }

    #[test]
    fn bar_count_matches_intervals() {
        let barcode = diagram_to_barcode(&fixture());
        let svg = barcode_svg(&barcode, "bars");
        assert_eq!(svg.matches(r#"class="bar""#).count(), barcode.len());
        assert_eq!(svg.matches("inf-marker").count(), 1);
    }

    #[test]
    fn diagram_marks_infinite_points() {
        let svg = diagram_svg(&fixture(), "d");
        assert_eq!(svg.matches(r#"class="point""#).count(), 4);
        assert_eq!(svg.matches("inf-marker").count(), 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(diagram_svg(&fixture(), "d"), diagram_svg(&fixture(), "d"));
    }
}
