//! The adaptive metric `d^L(x, y) = inf over paths of ∫ dz / f_L(z)`.
//!
//! Distances come from shortest paths in a [`MetricGraph`] whose edge costs
//! are certified upper bounds of straight-segment integrals, so every graph
//! value is an upper bound of the true adaptive distance. The closed form for
//! a single point landmark in [`exact_point_landmark_distance`] serves as the
//! oracle for the discretization.

pub mod graph;
pub mod quadrature;
pub mod smoothing;

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, Point, PointSet};

pub use graph::{default_stencil_radius, GraphSpec, MetricGraph};
pub use quadrature::{integrate_inverse, segment_cost, CertifiedIntegral};
pub use smoothing::{smoothed_landmark_distance, Mollifier, SmoothedLandmarks, SmoothingConfig};

/// A positive 1-Lipschitz function used as the local scale of a metric.
pub trait FeatureSize: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

impl FeatureSize for LandmarkSet {
    fn dim(&self) -> usize {
        LandmarkSet::dim(self)
    }

    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        self.distance_unchecked(x)
    }
}

/// Graph approximation of `d^L(a, b)`; both points must be graph nodes.
pub fn adaptive_distance(a: &Point, b: &Point, graph: &MetricGraph) -> Result<f64> {
    let s = graph.locate(a.coords())?;
    let t = graph.locate(b.coords())?;
    if s == t {
        return Ok(0.0);
    }
    // always search from the smaller id so that d(a, b) == d(b, a) bit for bit
    let (s, t) = (s.min(t), s.max(t));
    let d = graph.shortest_paths(&[s], Some(t))[t];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(graph.disconnected(s, t))
    }
}

/// Graph approximation of `f^L_X` at every node (one multi-source run).
pub fn distance_field(set: &PointSet, graph: &MetricGraph) -> Result<Vec<f64>> {
    let sources = graph.locate_all(set)?;
    Ok(graph.shortest_paths(&sources, None))
}

/// Graph approximation of `f^L_X(y) = min over x in X of d^L(y, x)`.
pub fn adaptive_point_to_set(y: &Point, set: &PointSet, graph: &MetricGraph) -> Result<f64> {
    let t = graph.locate(y.coords())?;
    let sources = graph.locate_all(set)?;
    let d = graph.shortest_paths(&sources, Some(t))[t];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(graph.disconnected(sources[0], t))
    }
}

/// `min over x in X of |y - x| / f_L(x)`, whose sublevel sets are unions of
/// balls `ball(x, r f_L(x))`.
pub fn approx_point_to_set(y: &Point, set: &PointSet, landmarks: &LandmarkSet) -> Result<f64> {
    if y.dim() != set.dim() || set.dim() != landmarks.dim() {
        return Err(Error::DimensionMismatch {
            expected: landmarks.dim(),
            found: y.dim(),
        });
    }
    let scales = feature_sizes(set, landmarks)?;
    Ok(approx_point_to_set_with(y.coords(), set, &scales))
}

/// `f_L` at every point of `set`, rejecting points on `L`.
pub fn feature_sizes(set: &PointSet, landmarks: &LandmarkSet) -> Result<Vec<f64>> {
    set.iter()
        .map(|x| {
            let f = landmarks.distance_unchecked(x);
            if f > 0.0 {
                Ok(f)
            } else {
                Err(Error::InvalidInput(format!("point {x:?} lies on the landmark set")))
            }
        })
        .collect()
}

pub(crate) fn approx_point_to_set_with(y: &[f64], set: &PointSet, scales: &[f64]) -> f64 {
    set.iter()
        .zip(scales)
        .map(|(x, f)| dist(y, x) / f)
        .fold(f64::INFINITY, f64::min)
}

/// One-sided term `max over x in from of f^L_to(x)`.
pub fn directed_adaptive_hausdorff(from: &PointSet, to: &PointSet, graph: &MetricGraph) -> Result<f64> {
    let field = distance_field(to, graph)?;
    let ids = graph.locate_all(from)?;
    let mut worst = 0.0f64;
    for &i in &ids {
        if !field[i].is_finite() {
            return Err(graph.disconnected(graph.locate(to.get(0))?, i));
        }
        worst = worst.max(field[i]);
    }
    Ok(worst)
}

/// Adaptive Hausdorff distance `max(max_X f^L_Y, max_Y f^L_X)`.
pub fn adaptive_hausdorff(x: &PointSet, y: &PointSet, graph: &MetricGraph) -> Result<f64> {
    Ok(directed_adaptive_hausdorff(x, y, graph)?.max(directed_adaptive_hausdorff(y, x, graph)?))
}

/// Closed-form `d^L(a, b)` for `L = {ell}`: in log-polar coordinates of the
/// plane through `a`, `b`, `ell` the metric `|dz| / r` is flat, so the
/// distance is `sqrt(ln(|b-ell| / |a-ell|)^2 + theta^2)` with `theta` the
/// angle at `ell`.
pub fn exact_point_landmark_distance(a: &Point, b: &Point, ell: &Point) -> Result<f64> {
    if a.dim() != ell.dim() || b.dim() != ell.dim() {
        return Err(Error::DimensionMismatch {
            expected: ell.dim(),
            found: if a.dim() != ell.dim() { a.dim() } else { b.dim() },
        });
    }
    let u: Vec<f64> = a.coords().iter().zip(ell.coords()).map(|(p, q)| p - q).collect();
    let v: Vec<f64> = b.coords().iter().zip(ell.coords()).map(|(p, q)| p - q).collect();
    let (ru, rv) = (norm(&u), norm(&v));
    if ru == 0.0 || rv == 0.0 {
        return Err(Error::UndefinedDistance);
    }
    if a == b {
        return Ok(0.0);
    }
    let dot: f64 = u.iter().zip(&v).map(|(p, q)| p * q).sum();
    let cross = (ru * ru * rv * rv - dot * dot).max(0.0).sqrt();
    let theta = cross.atan2(dot);
    Ok((rv / ru).ln().hypot(theta))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Graph over the same lattice whose edges integrate `1/f~_L`; nodes still
/// exclude the Euclidean offset `L^beta` of the unsmoothed set.
pub fn build_smoothed_graph(
    spec: GraphSpec,
    smoothed: &SmoothedLandmarks,
    anchors: &[&PointSet],
) -> Result<MetricGraph> {
    MetricGraph::build_with(spec, smoothed.landmarks(), smoothed, anchors)
}

/// Graph approximation of the smoothed distance `f~^L_X(y)`; `graph` must be
/// built by [`build_smoothed_graph`].
pub fn smoothed_adaptive_point_to_set(y: &Point, set: &PointSet, graph: &MetricGraph) -> Result<f64> {
    adaptive_point_to_set(y, set, graph)
}

/// Both directions of the comparison between the adaptive distance of two
/// points and their Euclidean distance relative to `f_L(a)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PointBoundCheck {
    pub graph_distance: f64,
    /// `|a - b| / f_L(a)`
    pub ratio: f64,
    /// `(d/(1-d)) f_L(a) - |a - b|` for the graph value `d < 1`; sound without
    /// slack because `d` bounds `d^L(a, b)` from above
    pub euclidean_margin: Option<f64>,
    /// `ratio/(1-ratio) - d` for `ratio < 1`; holds up to discretization slack
    pub adaptive_margin: Option<f64>,
}

/// Compares `d^L(a, b)` (graph value) with `|a - b| / f_L(a)`.
pub fn point_distance_bounds(
    a: &Point,
    b: &Point,
    graph: &MetricGraph,
    landmarks: &LandmarkSet,
) -> Result<PointBoundCheck> {
    let d = adaptive_distance(a, b, graph)?;
    let fa = landmarks.distance_unchecked(a.coords());
    if !(fa > 0.0) {
        return Err(Error::UndefinedDistance);
    }
    let e = a.distance(b);
    let ratio = e / fa;
    Ok(PointBoundCheck {
        graph_distance: d,
        ratio,
        euclidean_margin: (d < 1.0).then(|| d / (1.0 - d) * fa - e),
        adaptive_margin: (ratio < 1.0).then(|| ratio / (1.0 - ratio) - d),
    })
}
