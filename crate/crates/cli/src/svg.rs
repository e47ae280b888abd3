//! Static SVG scatter plots of planar runs.

use std::fmt::Write;

use omegalab::{PointCloud, Vector};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 0.05;
/// Orbit points drawn at most; longer tails keep their final stretch.
const MAX_TAIL_POINTS: usize = 20_000;

struct Frame {
    min: [f64; 2],
    scale: f64,
    offset: [f64; 2],
}

impl Frame {
    /// Equal scaling on both axes, centered, with `MARGIN` on every side.
    fn fit<'a>(points: impl Iterator<Item = &'a Vector>) -> Frame {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let span = [max[0] - min[0], max[1] - min[1]];
        let extent = span[0].max(span[1]);
        let extent = if extent > 0.0 { extent } else { 1.0 };
        let inner = SIZE * (1.0 - 2.0 * MARGIN);
        let scale = inner / extent;
        let offset = [
            SIZE * MARGIN + (inner - span[0] * scale) / 2.0,
            SIZE * MARGIN + (inner - span[1] * scale) / 2.0,
        ];
        Frame { min, scale, offset }
    }

    fn map(&self, p: &Vector) -> (f64, f64) {
        let x = self.offset[0] + (p[0] - self.min[0]) * self.scale;
        let y = self.offset[1] + (p[1] - self.min[1]) * self.scale;
        (x, SIZE - y)
    }
}

fn circles(out: &mut String, frame: &Frame, pts: &[Vector], r: f64, fill: &str) {
    let _ = writeln!(out, r#"<g fill="{fill}">"#);
    for p in pts {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}"/>"#);
    }
    out.push_str("</g>\n");
}

/// Orbit tail in grey, reference set in blue, omega representatives in red.
pub fn scatter(tail: &[Vector], reps: &PointCloud, reference: Option<&PointCloud>) -> String {
    let tail = &tail[tail.len().saturating_sub(MAX_TAIL_POINTS)..];
    let reference = reference.map(PointCloud::points).unwrap_or(&[]);
    let frame = Frame::fit(tail.iter().chain(reps.iter()).chain(reference));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#
    );
    circles(&mut out, &frame, reference, 1.0, "#4a78c2");
    circles(&mut out, &frame, tail, 1.5, "#9a9a9a");
    circles(&mut out, &frame, reps.points(), 3.0, "#d62728");
    out.push_str("</svg>\n");
    out
}
