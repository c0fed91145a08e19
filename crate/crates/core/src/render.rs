//! Deterministic SVG drawings of planar ball covers and their nerves.
//!
//! Layers are `<g>` elements with fixed ids, drawn bottom to top:
//! `balls-large`, `balls-small`, `nerve-large`, `nerve-small`, `landmarks`,
//! `samples`. Coordinates are printed with four decimals so identical inputs
//! give identical bytes.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, PointSet, Primitive};
use crate::metric::feature_sizes;
use crate::nerve::SimplicialComplex;

pub const LAYERS: [&str; 6] = [
    "balls-large",
    "balls-small",
    "nerve-large",
    "nerve-small",
    "landmarks",
    "samples",
];

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

struct Frame {
    lo: [f64; 2],
    hi: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = ([f64; 2], f64)>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (p, r) in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k] - r);
                hi[k] = hi[k].max(p[k] + r);
            }
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        Self {
            lo,
            hi,
            scale: (WIDTH - 2.0 * MARGIN) / extent,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.lo[0]) * self.scale
    }

    /// SVG's y axis points down.
    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.hi[1] - y) * self.scale
    }

    fn height(&self) -> f64 {
        2.0 * MARGIN + (self.hi[1] - self.lo[1]) * self.scale
    }
}

fn xy(p: &[f64]) -> [f64; 2] {
    [p[0], p[1]]
}

/// Sample points, landmarks, the balls `ball(x, t f_Lhat(x))` at both
/// scales and the 1-skeletons of both nerves.
pub fn render_cover(
    xhat: &PointSet,
    lhat: &LandmarkSet,
    scales: (f64, f64),
    small: &SimplicialComplex,
    large: &SimplicialComplex,
) -> Result<String> {
    if xhat.dim() != 2 || lhat.dim() != 2 {
        return Err(Error::InvalidInput("rendering needs planar input".into()));
    }
    let f = feature_sizes(xhat, lhat)?;
    let mut extent: Vec<([f64; 2], f64)> = xhat.iter().zip(&f).map(|(p, f)| (xy(p), scales.1 * f)).collect();
    for prim in lhat.primitives() {
        match prim {
            Primitive::Point { coords } => extent.push((xy(coords.coords()), 0.0)),
            Primitive::Segment { a, b } => {
                extent.push((xy(a.coords()), 0.0));
                extent.push((xy(b.coords()), 0.0));
            }
        }
    }
    let fr = Frame::fit(extent.into_iter());
    let mut s = String::new();
    let h = fr.height();
    // writing to a String cannot fail
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{h:.4}" viewBox="0 0 {WIDTH:.0} {h:.4}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{h:.4}" fill="white"/>"#);

    for (id, t, color) in [("balls-large", scales.1, "#9ecae1"), ("balls-small", scales.0, "#3182bd")] {
        let _ = writeln!(s, r#"<g id="{id}" fill="{color}" fill-opacity="0.35" stroke="none">"#);
        for (p, fx) in xhat.iter().zip(&f) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}"/>"#,
                fr.x(p[0]),
                fr.y(p[1]),
                t * fx * fr.scale
            );
        }
        let _ = writeln!(s, "</g>");
    }
    for (id, k, color, width) in [("nerve-large", large, "#636363", 1.0), ("nerve-small", small, "#000000", 2.0)] {
        let _ = writeln!(s, r#"<g id="{id}" stroke="{color}" stroke-width="{width:.1}">"#);
        for e in k.simplices(1) {
            let (a, b) = (xhat.get(e[0]), xhat.get(e[1]));
            let _ = writeln!(
                s,
                r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
                fr.x(a[0]),
                fr.y(a[1]),
                fr.x(b[0]),
                fr.y(b[1])
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, r##"<g id="landmarks" stroke="#de2d26" fill="#de2d26" stroke-width="2">"##);
    for prim in lhat.primitives() {
        match prim {
            Primitive::Point { coords } => {
                let p = coords.coords();
                let _ = writeln!(s, r#"<circle cx="{:.4}" cy="{:.4}" r="4"/>"#, fr.x(p[0]), fr.y(p[1]));
            }
            Primitive::Segment { a, b } => {
                let (a, b) = (a.coords(), b.coords());
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#,
                    fr.x(a[0]),
                    fr.y(a[1]),
                    fr.x(b[0]),
                    fr.y(b[1])
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="samples" fill="black">"#);
    for p in xhat.iter() {
        let _ = writeln!(s, r#"<circle cx="{:.4}" cy="{:.4}" r="3"/>"#, fr.x(p[0]), fr.y(p[1]));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
