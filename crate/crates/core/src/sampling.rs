//! ε-sample verification and the near-duality between Euclidean adaptive
//! samples and uniform samples in the adaptive metric.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, PointSet};
use crate::metric::{adaptive_hausdorff, MetricGraph};

/// Relative tolerance for the `Xhat ⊆ X` membership test.
const SUBSET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub status: ClaimStatus,
    /// bound minus measured value; negative means the raw inequality fails
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub epsilon_star: f64,
    pub hausdorff_l: f64,
    pub slack: f64,
    pub bounds_checked: Vec<ClaimCheck>,
}

impl SampleReport {
    pub fn all_hold(&self) -> bool {
        self.bounds_checked
            .iter()
            .all(|c| c.status != ClaimStatus::Violated)
    }
}

fn scale_of(x: &PointSet) -> f64 {
    let (lo, hi) = x.bounding_box();
    dist(&lo, &hi).max(1.0)
}

/// Least ε for which `xhat` is an ε-sample of `x`:
/// `max over x of (min over p in xhat of |x - p|) / f_L(x)`.
pub fn epsilon_sample_check(xhat: &PointSet, x: &PointSet, landmarks: &LandmarkSet) -> Result<f64> {
    if xhat.dim() != x.dim() || x.dim() != landmarks.dim() {
        return Err(Error::DimensionMismatch {
            expected: landmarks.dim(),
            found: x.dim(),
        });
    }
    if !xhat.is_subset_of(x, SUBSET_TOL * scale_of(x)) {
        return Err(Error::InvalidInput("sample is not a subset of X".into()));
    }
    let ratios: Vec<Result<f64>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let p = x.get(i);
            let f = landmarks.distance_unchecked(p);
            if !(f > 0.0) {
                return Err(Error::InvalidInput(format!("point {p:?} of X lies on L")));
            }
            let nearest = xhat.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min);
            Ok(nearest / f)
        })
        .collect();
    ratios
        .into_iter()
        .try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))
}

/// Measures ε* and the graph adaptive Hausdorff distance and checks both
/// directions of the sampling duality:
/// (a) ε* < 1 implies `d_H <= ε*/(1-ε*)`;
/// (b) `d_H < 1/2` implies `ε* <= d_H/(1-d_H)`.
/// A claim holds when its margin is at least `-slack`.
pub fn duality_check(
    xhat: &PointSet,
    x: &PointSet,
    landmarks: &LandmarkSet,
    graph: &MetricGraph,
    slack: f64,
) -> Result<SampleReport> {
    let epsilon_star = epsilon_sample_check(xhat, x, landmarks)?;
    let hausdorff_l = adaptive_hausdorff(x, xhat, graph)?;
    let judge = |claim: &str, applicable: bool, margin: f64| ClaimCheck {
        claim: claim.to_string(),
        status: if !applicable {
            ClaimStatus::NotApplicable
        } else if margin >= -slack {
            ClaimStatus::Holds
        } else {
            ClaimStatus::Violated
        },
        margin: applicable.then_some(margin),
    };
    let a_ok = epsilon_star < 1.0;
    let a_margin = if a_ok {
        epsilon_star / (1.0 - epsilon_star) - hausdorff_l
    } else {
        f64::NAN
    };
    let b_ok = hausdorff_l < 0.5;
    let b_margin = if b_ok {
        hausdorff_l / (1.0 - hausdorff_l) - epsilon_star
    } else {
        f64::NAN
    };
    Ok(SampleReport {
        epsilon_star,
        hausdorff_l,
        slack,
        bounds_checked: vec![
            judge("eps-sample => d_H <= eps/(1-eps)", a_ok, a_margin),
            judge("d_H <= eps < 1/2 => eps/(1-eps)-sample", b_ok, b_margin),
        ],
    })
}
