//! Small deterministic instances used by tests, benches and the CLI demos.

use std::f64::consts::TAU;

use crate::geometry::{LandmarkSet, Point, PointSet, Primitive};

/// `n` equispaced points on the circle of radius `radius` about the origin,
/// starting at `(radius, 0)`.
pub fn circle(n: usize, radius: f64) -> PointSet {
    let pts = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            Point::xy(radius * t.cos(), radius * t.sin())
        })
        .collect();
    PointSet::new(pts).expect("circle has at least one point")
}

/// The `n x n` lattice over `[-half, half]^2`, row-major in `(x, y)`.
pub fn probe_grid(half: f64, n: usize) -> PointSet {
    assert!(n >= 2, "probe grid needs at least two points per axis");
    let step = 2.0 * half / (n - 1) as f64;
    let mut coords = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            coords.push(-half + i as f64 * step);
            coords.push(-half + j as f64 * step);
        }
    }
    PointSet::from_flat(2, coords).expect("grid coordinates are finite")
}

/// The origin as the only landmark.
pub fn origin_landmark() -> LandmarkSet {
    LandmarkSet::point(Point::xy(0.0, 0.0))
}

/// Segment `[a, b]` in the plane as a landmark set.
pub fn segment_landmark(a: (f64, f64), b: (f64, f64)) -> LandmarkSet {
    LandmarkSet::new(vec![Primitive::Segment {
        a: Point::xy(a.0, a.1),
        b: Point::xy(b.0, b.1),
    }])
    .expect("distinct endpoints")
}

/// Closed polygon with `n` vertices on the circle of radius `radius`, as
/// segment landmarks.
pub fn polygon_landmark(n: usize, radius: f64) -> LandmarkSet {
    let v = circle(n, radius).points();
    let prims = (0..n)
        .map(|k| Primitive::Segment {
            a: v[k].clone(),
            b: v[(k + 1) % n].clone(),
        })
        .collect();
    LandmarkSet::new(prims).expect("polygon edges are nondegenerate")
}
