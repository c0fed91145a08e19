//! Offset membership and empirical containment checks on probe sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, Point, PointSet, Primitive};
use crate::metric::{
    adaptive_point_to_set, approx_point_to_set, distance_field, feature_sizes, integrate_inverse,
    MetricGraph,
};

use super::certificate::InterleavingCertificate;
use super::mobius::{Interval, MobiusFunction};

/// `y ∈ A^L_X(alpha)`, judged on the graph upper approximation of `f^L_X`.
pub fn membership_a(y: &Point, alpha: f64, set: &PointSet, graph: &MetricGraph) -> Result<bool> {
    Ok(adaptive_point_to_set(y, set, graph)? <= alpha)
}

/// `y ∈ B^L_X(alpha) = ∪ ball(x, alpha f_L(x))`, decided exactly.
pub fn membership_b(y: &Point, alpha: f64, set: &PointSet, landmarks: &LandmarkSet) -> Result<bool> {
    Ok(approx_point_to_set(y, set, landmarks)? <= alpha)
}

/// Values of a sublevel function at every probe point. A probe lies in the
/// offset at scale `r` when its value is at most `r + slack`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublevelField {
    pub name: String,
    pub values: Vec<f64>,
    pub slack: f64,
}

impl SublevelField {
    /// Graph approximation of `f^L_X`. Probes that are not graph nodes (those
    /// inside the excluded offset of `L`) get `NaN` and are left out of
    /// containment checks.
    pub fn adaptive(
        name: impl Into<String>,
        probes: &PointSet,
        set: &PointSet,
        graph: &MetricGraph,
        slack: f64,
    ) -> Result<Self> {
        let field = distance_field(set, graph)?;
        let values = probes
            .iter()
            .map(|p| graph.locate_slice(p).map_or(f64::NAN, |i| field[i]))
            .collect();
        Ok(Self {
            name: name.into(),
            values,
            slack,
        })
    }

    /// Exact `min_x |y - x| / f_L(x)`.
    pub fn balls(name: impl Into<String>, probes: &PointSet, set: &PointSet, landmarks: &LandmarkSet) -> Result<Self> {
        if probes.dim() != set.dim() || set.dim() != landmarks.dim() {
            return Err(Error::DimensionMismatch {
                expected: landmarks.dim(),
                found: probes.dim(),
            });
        }
        let scales = feature_sizes(set, landmarks)?;
        let values = (0..probes.len())
            .into_par_iter()
            .map(|i| {
                let y = probes.get(i);
                set.iter()
                    .zip(&scales)
                    .map(|(x, f)| dist(y, x) / f)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(Self {
            name: name.into(),
            values,
            slack: 0.0,
        })
    }

    pub fn contains(&self, probe: usize, scale: f64) -> bool {
        self.values[probe] <= scale + self.slack
    }
}

/// A probe in `F(scale)` but not in `G(image_scale)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub probe: usize,
    pub scale: f64,
    pub image_scale: f64,
    /// value of the target field at the probe
    pub value: f64,
    /// `value - image_scale - slack`, positive
    pub margin: f64,
}

/// Scales `r` with `r` and `h(r)` inside `interval`.
pub fn admissible_scales(h: &MobiusFunction, interval: &Interval, scales: &[f64]) -> Vec<f64> {
    scales
        .iter()
        .copied()
        .filter(|&r| interval.contains_f64(r) && interval.contains_f64(h.eval_f64(r)))
        .collect()
}

/// Checks `F(r) ⊆ G(h(r))` at every probe and admissible scale; scales that
/// are not admissible and probes with an undefined (`NaN`) value are skipped. Only `G` receives its slack: `F` values
/// from a graph are upper bounds, so membership in `F` is never overstated.
pub fn validate_containment(
    f: &SublevelField,
    g: &SublevelField,
    h: &MobiusFunction,
    interval: &Interval,
    scales: &[f64],
) -> Vec<Violation> {
    assert_eq!(f.values.len(), g.values.len(), "fields must share the probe set");
    let mut out = Vec::new();
    for r in admissible_scales(h, interval, scales) {
        let image = h.eval_f64(r);
        let found: Vec<Violation> = (0..f.values.len())
            .into_par_iter()
            .filter(|&i| f.values[i] <= r && !g.values[i].is_nan() && !g.contains(i, image))
            .map(|i| Violation {
                probe: i,
                scale: r,
                image_scale: image,
                value: g.values[i],
                margin: g.values[i] - image - g.slack,
            })
            .collect();
        out.extend(found);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    pub from: String,
    pub to: String,
    pub map: MobiusFunction,
    pub scales: Vec<f64>,
    /// probe and scale pairs whose premise `f <= r` holds
    pub checked: usize,
    pub violations: usize,
    /// largest `g - h(r) - slack` over checked pairs; positive means violated
    pub worst_margin: Option<f64>,
    pub examples: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub certificate: InterleavingCertificate,
    pub probes: usize,
    pub forward: DirectionReport,
    pub backward: DirectionReport,
}

impl CertificateReport {
    pub fn violation_count(&self) -> usize {
        self.forward.violations + self.backward.violations
    }
}

const EXAMPLES_KEPT: usize = 10;

fn premise_stats(
    f: &SublevelField,
    g: &SublevelField,
    h: &MobiusFunction,
    interval: &Interval,
    scales: &[f64],
) -> (usize, Option<f64>) {
    let mut checked = 0;
    let mut worst: Option<f64> = None;
    for r in admissible_scales(h, interval, scales) {
        let image = h.eval_f64(r);
        let (n, m) = (0..f.values.len())
            .into_par_iter()
            .filter(|&i| f.values[i] <= r && !g.values[i].is_nan())
            .map(|i| (1usize, g.values[i] - image - g.slack))
            .reduce(|| (0, f64::NEG_INFINITY), |a, b| (a.0 + b.0, a.1.max(b.1)));
        checked += n;
        if n > 0 {
            worst = Some(worst.map_or(m, |w| w.max(m)));
        }
    }
    (checked, worst)
}

fn direction(
    f: &SublevelField,
    g: &SublevelField,
    h: &MobiusFunction,
    interval: &Interval,
    scales: &[f64],
) -> DirectionReport {
    let mut v = validate_containment(f, g, h, interval, scales);
    let (checked, worst_margin) = premise_stats(f, g, h, interval, scales);
    let violations = v.len();
    v.sort_by(|a, b| b.margin.total_cmp(&a.margin).then(a.probe.cmp(&b.probe)));
    v.truncate(EXAMPLES_KEPT);
    DirectionReport {
        from: f.name.clone(),
        to: g.name.clone(),
        map: h.clone(),
        scales: admissible_scales(h, interval, scales),
        checked,
        violations,
        worst_margin,
        examples: v,
    }
}

/// Both containments of a certificate; `from` and `to` are the fields of the
/// certificate's source and target filtrations.
pub fn validate_certificate(
    cert: &InterleavingCertificate,
    from: &SublevelField,
    to: &SublevelField,
    scales: &[f64],
) -> CertificateReport {
    CertificateReport {
        certificate: cert.clone(),
        probes: from.values.len(),
        forward: direction(from, to, &cert.forward, &cert.interval, scales),
        backward: direction(to, from, &cert.backward, &cert.interval, scales),
    }
}

/// Upper bound on `d_H^{Xhat}(L, Lhat)` for `Lhat ⊆ L`, i.e. the adaptive
/// Hausdorff distance measured with the sample points as landmarks.
///
/// `L` is sampled with spacing at most `spacing`; each sample is joined to
/// every point of `Lhat` by a straight segment whose certified upper integral
/// bounds the geodesic. A point of `L` between samples is within `spacing/2`
/// of one, which costs at most `(s/2) / (f(y) - s/2)`.
pub fn landmark_hausdorff_bound(
    landmarks: &LandmarkSet,
    sampled: &LandmarkSet,
    xhat: &PointSet,
    spacing: f64,
    rel_tol: f64,
) -> Result<f64> {
    let metric = LandmarkSet::from_points(xhat);
    let targets: Vec<Vec<f64>> = sampled
        .primitives()
        .iter()
        .map(|p| match p {
            Primitive::Point { coords } => Ok(coords.coords().to_vec()),
            Primitive::Segment { .. } => Err(Error::InvalidInput(
                "the landmark sample must consist of points".into(),
            )),
        })
        .collect::<Result<_>>()?;
    let mut samples: Vec<(Vec<f64>, f64)> = Vec::new();
    for p in landmarks.primitives() {
        match p {
            Primitive::Point { coords } => samples.push((coords.coords().to_vec(), 0.0)),
            Primitive::Segment { a, b } => {
                let len = a.distance(b);
                let n = (len / spacing).ceil().max(1.0) as usize;
                let half = 0.5 * len / n as f64;
                for k in 0..=n {
                    let t = k as f64 / n as f64;
                    let y = a.coords().iter().zip(b.coords()).map(|(p, q)| p + t * (q - p)).collect();
                    samples.push((y, half));
                }
            }
        }
    }
    let per_sample: Vec<Result<f64>> = samples
        .par_iter()
        .map(|(y, half)| {
            let f = metric.distance_unchecked(y);
            if !(f > *half) {
                return Err(Error::InvalidInput(format!(
                    "landmark sample {y:?} is too close to Xhat for spacing {spacing}"
                )));
            }
            let mut best = f64::INFINITY;
            for t in &targets {
                best = best.min(integrate_inverse(&metric, y, t, rel_tol)?.upper);
            }
            Ok(best + half / (f - half))
        })
        .collect();
    let mut worst = 0.0f64;
    for v in per_sample {
        worst = worst.max(v?);
    }
    // the other direction: each point of Lhat to its nearest point of L
    for t in &targets {
        let c = landmarks.closest_point(t);
        worst = worst.max(integrate_inverse(&metric, t, &c, rel_tol)?.upper);
    }
    Ok(worst)
}
