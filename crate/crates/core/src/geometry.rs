//! Euclidean primitives: points, point sets, landmark sets and the
//! distance-to-set functions built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point has no coordinates".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate {c}")));
        }
        Ok(Self { coords })
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Self::new(vec![x, y]).expect("finite planar point")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.coords, &other.coords)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// A nonempty ordered list of points sharing one dimension, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidInput("point set is empty".into()))?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Ok(Self { dim, coords })
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "flat buffer of {} values is not a nonempty list of {dim}-vectors",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinate {c}")));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point(&self, i: usize) -> Point {
        Point {
            coords: self.get(i).to_vec(),
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Keep the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidInput(format!("index {i} out of range")));
            }
            coords.extend_from_slice(self.get(i));
        }
        Self::from_flat(self.dim, coords)
    }

    /// Whether every point of `self` is (numerically) a point of `other`.
    pub fn is_subset_of(&self, other: &PointSet, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .iter()
                .all(|p| other.iter().any(|q| dist(p, q) <= tol))
    }

    /// Axis-aligned bounding box as (lower, upper).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

/// One primitive of a landmark set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Primitive {
    Point { coords: Point },
    Segment { a: Point, b: Point },
}

impl Primitive {
    fn dim(&self) -> usize {
        match self {
            Primitive::Point { coords } => coords.dim(),
            Primitive::Segment { a, .. } => a.dim(),
        }
    }

    /// Exact Euclidean distance from `x` to the primitive.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Primitive::Point { coords } => dist(x, coords.coords()),
            Primitive::Segment { a, b } => dist(x, &closest_on_segment(x, a.coords(), b.coords())),
        }
    }

    /// Closest point of the primitive to `x`.
    pub fn closest_point(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Primitive::Point { coords } => coords.coords().to_vec(),
            Primitive::Segment { a, b } => closest_on_segment(x, a.coords(), b.coords()),
        }
    }
}

/// Finite union of points and segments; the set `L` whose distance
/// function `f_L` sets the local scale of the adaptive metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<Primitive>")]
pub struct LandmarkSet {
    dim: usize,
    primitives: Vec<Primitive>,
}

impl<'de> Deserialize<'de> for LandmarkSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let prims = Vec::<Primitive>::deserialize(d)?;
        LandmarkSet::new(prims).map_err(serde::de::Error::custom)
    }
}

impl From<LandmarkSet> for Vec<Primitive> {
    fn from(l: LandmarkSet) -> Self {
        l.primitives
    }
}

impl LandmarkSet {
    pub fn new(primitives: Vec<Primitive>) -> Result<Self> {
        let dim = primitives
            .first()
            .ok_or_else(|| Error::InvalidInput("landmark set is empty".into()))?
            .dim();
        for p in &primitives {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if let Primitive::Segment { a, b } = p {
                if a == b {
                    return Err(Error::InvalidInput(format!(
                        "segment endpoints coincide at {:?}",
                        a.coords()
                    )));
                }
            }
        }
        Ok(Self { dim, primitives })
    }

    pub fn point(p: Point) -> Self {
        Self {
            dim: p.dim(),
            primitives: vec![Primitive::Point { coords: p }],
        }
    }

    pub fn from_points(points: &PointSet) -> Self {
        Self {
            dim: points.dim(),
            primitives: points
                .points()
                .into_iter()
                .map(|coords| Primitive::Point { coords })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// The landmark when the set is a single point.
    pub fn single_point(&self) -> Option<&Point> {
        match self.primitives.as_slice() {
            [Primitive::Point { coords }] => Some(coords),
            _ => None,
        }
    }

    /// `f_L(x)`, unchecked dimension; hot path of the metric code.
    #[inline]
    pub fn distance_unchecked(&self, x: &[f64]) -> f64 {
        self.primitives
            .iter()
            .map(|p| p.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest point of the set to `x`.
    pub fn closest_point(&self, x: &[f64]) -> Vec<f64> {
        let mut best = (f64::INFINITY, Vec::new());
        for p in &self.primitives {
            let c = p.closest_point(x);
            let d = dist(x, &c);
            if d < best.0 {
                best = (d, c);
            }
        }
        best.1
    }
}

fn closest_on_segment(x: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut ab2 = 0.0;
    let mut t = 0.0;
    for k in 0..x.len() {
        let d = b[k] - a[k];
        ab2 += d * d;
        t += (x[k] - a[k]) * d;
    }
    let t = (t / ab2).clamp(0.0, 1.0);
    (0..x.len()).map(|k| a[k] + t * (b[k] - a[k])).collect()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `f_L(x) = min over l in L of |x - l|`.
pub fn landmark_distance(x: &Point, landmarks: &LandmarkSet) -> Result<f64> {
    check_dim(landmarks.dim(), x.dim())?;
    Ok(landmarks.distance_unchecked(x.coords()))
}

/// Minimum Euclidean distance from `x` to the points of `set`.
pub fn euclidean_set_distance(x: &Point, set: &PointSet) -> Result<f64> {
    check_dim(set.dim(), x.dim())?;
    Ok(set
        .iter()
        .map(|q| dist(x.coords(), q))
        .fold(f64::INFINITY, f64::min))
}

/// Closed offset membership: `f_L(x) <= beta`.
pub fn euclidean_offset_contains(x: &Point, landmarks: &LandmarkSet, beta: f64) -> Result<bool> {
    if !(beta >= 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "beta",
            value: beta,
            range: "[0, inf)",
        });
    }
    Ok(landmark_distance(x, landmarks)? <= beta)
}

/// Euclidean Hausdorff distance between two point sets.
pub fn euclidean_hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let one_sided = |x: &PointSet, y: &PointSet| {
        x.iter()
            .map(|p| y.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}
