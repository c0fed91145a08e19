//! Shared inputs for the benchmarks.

use adaptopo::fixtures::{circle, origin_landmark};
use adaptopo::{LandmarkSet, PointSet};

/// `n` points on the unit circle around a single-point landmark.
pub fn circle_instance(n: usize) -> (PointSet, LandmarkSet) {
    (circle(n, 1.0), origin_landmark())
}
