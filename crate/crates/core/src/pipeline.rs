//! Run configuration and the commands of the command-line tool.
//!
//! Every command returns a serializable report; identical configurations
//! (including the seed) give byte-identical JSON.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, Point, PointSet, Primitive};
use crate::homology::{infer_homology_with_nerves, scale_chain, Assumptions, BettiReport};
use crate::interleaving::{
    a_to_b, adaptive_to_balls, filtration, l_to_lhat, landmark_hausdorff_bound, smoothed_to_balls, smoothing,
    rational, validate_certificate, x_to_xhat, CertificateReport, InterleavingCertificate, MobiusFunction,
    SublevelField,
};
use crate::io::{read_landmarks_file, read_points_file};
use crate::metric::{
    adaptive_distance, adaptive_hausdorff, build_smoothed_graph, exact_point_landmark_distance,
    point_distance_bounds, GraphSpec, MetricGraph, SmoothedLandmarks, SmoothingConfig,
};
use crate::nerve::build_two_scale;
use crate::render::render_cover;
use crate::sampling::{duality_check, SampleReport};

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// All inputs and parameters of a run. Loaded from JSON; unspecified fields
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// sample points, CSV
    pub xhat: Option<PathBuf>,
    /// full point set, CSV
    pub x: Option<PathBuf>,
    /// sampled landmarks, JSON
    pub lhat: Option<PathBuf>,
    /// full landmark set, JSON
    pub l: Option<PathBuf>,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub asserted_wfs: Option<f64>,
    /// lattice spacing of the metric graph
    pub h: f64,
    /// quadrature tolerance, defaults to `h`
    pub rel_tol: Option<f64>,
    pub stencil_radius: Option<usize>,
    /// probe points per axis for `validate`; also sets its lattice
    pub probe_resolution: usize,
    /// slack for graph-based predicates, defaults to `5 h`
    pub slack: Option<f64>,
    /// explicit validation scales
    pub scales: Option<Vec<f64>>,
    pub scale_count: usize,
    pub domain: Option<Domain>,
    pub max_dim: Option<usize>,
    /// random pairs drawn by the point-distance validation
    pub pairs: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            xhat: None,
            x: None,
            lhat: None,
            l: None,
            epsilon: 0.01,
            delta: 0.01,
            alpha: 0.01,
            beta: 0.05,
            eta: 0.1,
            asserted_wfs: None,
            h: 0.02,
            rel_tol: None,
            stencil_radius: None,
            probe_resolution: 200,
            slack: None,
            scales: None,
            scale_count: 8,
            domain: None,
            max_dim: None,
            pairs: 200,
            seed: 0,
            output: None,
        }
    }
}

fn unit(name: &'static str, v: f64, open_left: bool) -> Result<()> {
    let ok = if open_left { v > 0.0 && v < 1.0 } else { (0.0..1.0).contains(&v) };
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: v,
            range: if open_left { "(0, 1)" } else { "[0, 1)" },
        })
    }
}

impl RunConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingInput(format!("config file {} not found", path.display())));
        }
        Ok(serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?)
    }

    pub fn validate(&self) -> Result<()> {
        unit("epsilon", self.epsilon, false)?;
        unit("delta", self.delta, false)?;
        unit("alpha", self.alpha, false)?;
        unit("beta", self.beta, true)?;
        for (name, v) in [("eta", self.eta), ("h", self.h)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ParameterOutOfRange {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        if self.probe_resolution < 2 {
            return Err(Error::InvalidInput("probe_resolution must be at least 2".into()));
        }
        if self.scale_count == 0 {
            return Err(Error::InvalidInput("scale_count must be positive".into()));
        }
        if let Some(d) = &self.domain {
            if d.lower.len() != d.upper.len() || d.lower.iter().zip(&d.upper).any(|(l, u)| !(l < u)) {
                return Err(Error::InvalidInput("domain must satisfy lower < upper in every axis".into()));
            }
        }
        Ok(())
    }

    pub fn slack_for(&self, h: f64) -> f64 {
        self.slack.unwrap_or(5.0 * h)
    }

    fn spec(&self, domain: &Domain, h: f64) -> GraphSpec {
        let mut s = GraphSpec::new(domain.lower.clone(), domain.upper.clone(), h, self.beta);
        if let Some(t) = self.rel_tol {
            s = s.with_rel_tol(t);
        }
        if let Some(k) = self.stencil_radius {
            s = s.with_stencil_radius(k);
        }
        s
    }

    fn assumptions(&self) -> Result<Assumptions> {
        Ok(Assumptions {
            epsilon: self.epsilon,
            delta: self.delta,
            alpha: self.alpha,
            beta: self.beta,
            eta: self.eta,
            asserted_wfs_bound: self
                .asserted_wfs
                .ok_or_else(|| Error::MissingInput("asserted_wfs is required".into()))?,
        })
    }
}

fn required(path: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    let p = path
        .clone()
        .ok_or_else(|| Error::MissingInput(format!("{what} was not given")))?;
    if !p.exists() {
        return Err(Error::MissingInput(format!("{what} file {} not found", p.display())));
    }
    Ok(p)
}

fn optional(path: &Option<PathBuf>, what: &str) -> Result<Option<PathBuf>> {
    match path {
        Some(_) => required(path, what).map(Some),
        None => Ok(None),
    }
}

/// The point and landmark sets named by a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub xhat: PointSet,
    pub x: Option<PointSet>,
    pub lhat: LandmarkSet,
    pub l: Option<LandmarkSet>,
}

impl Instance {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let xhat = read_points_file(required(&cfg.xhat, "xhat")?)?;
        let lhat = read_landmarks_file(required(&cfg.lhat, "lhat")?)?;
        let x = optional(&cfg.x, "x")?.map(read_points_file).transpose()?;
        let l = optional(&cfg.l, "l")?.map(read_landmarks_file).transpose()?;
        Self::new(xhat, x, lhat, l)
    }

    pub fn new(xhat: PointSet, x: Option<PointSet>, lhat: LandmarkSet, l: Option<LandmarkSet>) -> Result<Self> {
        let d = xhat.dim();
        let dims = [Some(lhat.dim()), x.as_ref().map(PointSet::dim), l.as_ref().map(LandmarkSet::dim)];
        if let Some(found) = dims.into_iter().flatten().find(|&k| k != d) {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
        Ok(Self { xhat, x, lhat, l })
    }

    /// `L` when given, otherwise `Lhat`.
    pub fn metric_landmarks(&self) -> (&LandmarkSet, &'static str) {
        match &self.l {
            Some(l) => (l, "L"),
            None => (&self.lhat, "Lhat"),
        }
    }

    fn need_x(&self) -> Result<&PointSet> {
        self.x
            .as_ref()
            .ok_or_else(|| Error::MissingInput("this command needs the full point set x".into()))
    }

    fn need_l(&self) -> Result<&LandmarkSet> {
        self.l
            .as_ref()
            .ok_or_else(|| Error::MissingInput("this command needs the full landmark set l".into()))
    }
}

fn landmark_coords(l: &LandmarkSet) -> Vec<&[f64]> {
    l.primitives()
        .iter()
        .flat_map(|p| match p {
            Primitive::Point { coords } => vec![coords.coords()],
            Primitive::Segment { a, b } => vec![a.coords(), b.coords()],
        })
        .collect()
}

/// Cube around everything given, padded by `pad`; equal sides so a single
/// spacing fits every axis.
fn cube_around<'a>(points: impl Iterator<Item = &'a [f64]>, pad: f64) -> Domain {
    let mut lo: Vec<f64> = Vec::new();
    let mut hi: Vec<f64> = Vec::new();
    for p in points {
        if lo.is_empty() {
            lo = p.to_vec();
            hi = p.to_vec();
        }
        for k in 0..p.len() {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let side = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max) + 2.0 * pad;
    let lower: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h) - 0.5 * side).collect();
    let upper = lower.iter().map(|l| l + side).collect();
    Domain { lower, upper }
}

/// Default domain for offsets of the point sets: their bounding cube padded
/// by the largest feature size, which contains every offset at scale below 1.
fn offsets_domain(inst: &Instance) -> Domain {
    let (m, _) = inst.metric_landmarks();
    let sets: Vec<&PointSet> = std::iter::once(&inst.xhat).chain(inst.x.as_ref()).collect();
    let reach = sets
        .iter()
        .flat_map(|s| s.iter())
        .map(|p| m.distance_unchecked(p))
        .fold(0.0, f64::max);
    let mut pts: Vec<&[f64]> = sets.iter().flat_map(|s| s.iter()).collect();
    pts.extend(landmark_coords(m));
    cube_around(pts.into_iter(), reach)
}

fn snapped_h(domain: &Domain, resolution: usize) -> f64 {
    (domain.upper[0] - domain.lower[0]) / (resolution - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub h: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub nodes: usize,
    pub edges: usize,
}

impl GraphSummary {
    fn of(g: &MetricGraph) -> Self {
        Self {
            h: g.spec().h,
            lower: g.spec().lower.clone(),
            upper: g.spec().upper.clone(),
            nodes: g.node_count(),
            edges: g.edge_count(),
        }
    }
}

// ---------------------------------------------------------------- infer

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferOutcome {
    pub report: BettiReport,
    /// planar inputs only
    pub svg: Option<String>,
}

/// Homology inference. When `x` or `l` are present, the claimed `epsilon`
/// and `delta` are measured and mismatches become warnings.
pub fn run_infer(cfg: &RunConfig, inst: &Instance) -> Result<InferOutcome> {
    cfg.validate()?;
    let (mut report, filt) = infer_homology_with_nerves(&inst.xhat, &inst.lhat, cfg.assumptions()?, cfg.max_dim)?;
    report.warnings.extend(claim_warnings(cfg, inst)?);
    let svg = if inst.xhat.dim() == 2 {
        Some(render_cover(&inst.xhat, &inst.lhat, filt.scales, &filt.k1, &filt.k2)?)
    } else {
        None
    };
    Ok(InferOutcome { report, svg })
}

fn claim_warnings(cfg: &RunConfig, inst: &Instance) -> Result<Vec<String>> {
    let mut w = Vec::new();
    if let Some(x) = &inst.x {
        let (m, name) = inst.metric_landmarks();
        let domain = cfg.domain.clone().unwrap_or_else(|| offsets_domain(inst));
        let g = MetricGraph::build(cfg.spec(&domain, cfg.h), m, &[&inst.xhat, x])?;
        let eps = adaptive_hausdorff(&inst.xhat, x, &g)?;
        if eps > cfg.epsilon {
            w.push(format!(
                "claimed epsilon {} is below the measured adaptive Hausdorff distance {eps} (metric of {name})",
                cfg.epsilon
            ));
        }
    }
    if let Some(l) = &inst.l {
        let delta = landmark_hausdorff_bound(l, &inst.lhat, &inst.xhat, cfg.h, cfg.rel_tol.unwrap_or(1e-3))?;
        if delta > cfg.delta {
            w.push(format!(
                "claimed delta {} is below the certified bound {delta} on the landmark Hausdorff distance",
                cfg.delta
            ));
        }
        for set in std::iter::once(&inst.xhat).chain(inst.x.as_ref()) {
            if set.iter().any(|p| l.distance_unchecked(p) <= cfg.beta) {
                w.push(format!("some points lie within beta = {} of L", cfg.beta));
                break;
            }
        }
    }
    Ok(w)
}

/// Drawing of both ball unions and nerves at the inference scales.
pub fn run_render(cfg: &RunConfig, inst: &Instance) -> Result<String> {
    cfg.validate()?;
    let mut a = cfg.assumptions().unwrap_or(Assumptions {
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        alpha: cfg.alpha,
        beta: cfg.beta,
        eta: cfg.eta,
        asserted_wfs_bound: f64::INFINITY,
    });
    a.asserted_wfs_bound = f64::INFINITY;
    let chain = scale_chain(&a)?;
    let max_dim = cfg.max_dim.unwrap_or(inst.xhat.dim() + 1).min(2);
    let f = build_two_scale(&inst.xhat, &inst.lhat, chain[0], chain[2], max_dim)?;
    render_cover(&inst.xhat, &inst.lhat, f.scales, &f.k1, &f.k2)
}

// ---------------------------------------------------------------- validate

/// Containment relations the validator knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `A[X;L]` versus `A[Xhat;L]`, shift by epsilon
    XToXhat,
    /// `A[Xhat;L]` versus `B[Xhat;L]`, `r/(1-r)`
    AToB,
    /// `B[Xhat;L]` versus `B[Xhat;Lhat]`, `r/(1-delta)`
    LToLhat,
    /// `A[X;L]` versus `B[Xhat;Lhat]`
    BigInterleaving,
    /// smoothed offsets versus `A[X;L]`
    Smoothing,
    /// smoothed offsets versus `B[Xhat;Lhat]`
    BiggerInterleaving,
    /// adaptive versus relative Euclidean distance of point pairs
    DistancePts,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::XToXhat,
        Relation::AToB,
        Relation::LToLhat,
        Relation::BigInterleaving,
        Relation::Smoothing,
        Relation::BiggerInterleaving,
        Relation::DistancePts,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Relation::XToXhat => "x-to-xhat",
            Relation::AToB => "a-to-b",
            Relation::LToLhat => "l-to-lhat",
            Relation::BigInterleaving => "big-interleaving",
            Relation::Smoothing => "smoothing",
            Relation::BiggerInterleaving => "bigger-interleaving",
            Relation::DistancePts => "distance-pts",
        }
    }
}

impl FromStr for Relation {
    type Err = Error;

    /// Case, dashes and underscores are ignored: `AtoB`, `a-to-b` and
    /// `a_to_b` all name the same relation.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        let found = match key.as_str() {
            "xtoxhat" => Relation::XToXhat,
            "atob" | "axbxinterleaving" => Relation::AToB,
            "ltolhat" => Relation::LToLhat,
            "biginterleaving" => Relation::BigInterleaving,
            "smoothing" | "smoothinterleaving" => Relation::Smoothing,
            "biggerinterleaving" => Relation::BiggerInterleaving,
            "distancepts" => Relation::DistancePts,
            _ => {
                let names: Vec<&str> = Relation::ALL.iter().map(Relation::name).collect();
                return Err(Error::InvalidInput(format!(
                    "unknown relation {s:?}; expected one of {}",
                    names.join(", ")
                )));
            }
        };
        Ok(found)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measured {
    /// graph adaptive Hausdorff distance between `Xhat` and `X`
    pub epsilon: Option<f64>,
    /// certified upper bound on the landmark Hausdorff distance
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointBoundsSummary {
    pub pairs: usize,
    /// pairs where `d < 1` and `|a-b| > (d/(1-d)) f_L(a)`
    pub euclidean_violations: usize,
    /// pairs where `ratio < 1` and `d > ratio/(1-ratio) + slack`
    pub adaptive_violations: usize,
    pub worst_euclidean_margin: Option<f64>,
    pub worst_adaptive_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub relation: Relation,
    pub negative_control: bool,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub metric_landmarks: &'static str,
    pub measured: Measured,
    pub graph: GraphSummary,
    pub slack: f64,
    pub containment: Option<CertificateReport>,
    pub point_bounds: Option<PointBoundsSummary>,
    pub violations: usize,
    /// largest excess over the allowed bound, slack included; positive means violated
    pub worst_margin: Option<f64>,
    pub warnings: Vec<String>,
}

/// `r -> r/2` applied after a certificate's maps: the negative control.
fn halved(cert: &InterleavingCertificate) -> Result<InterleavingCertificate> {
    let half = MobiusFunction::new(rational(1.0)?, rational(0.0)?, rational(0.0)?, rational(2.0)?)?;
    InterleavingCertificate::new(
        cert.from.clone(),
        cert.to.clone(),
        half.compose(&cert.forward),
        half.compose(&cert.backward),
        cert.interval.clone(),
        format!("negative control of {}", cert.provenance),
    )
}

/// Largest `r` (up to 0.9 on unbounded intervals) for which `r` and both
/// images stay inside the interval, by bisection on the monotone maps.
fn admissible_top(cert: &InterleavingCertificate) -> f64 {
    let lo = cert.interval.lo_f64();
    let hi = cert.interval.hi_f64().min(lo + 0.9);
    let ok = |r: f64| {
        [&cert.forward, &cert.backward]
            .iter()
            .all(|h| cert.interval.contains_f64(r) && cert.interval.contains_f64(h.eval_f64(r)))
    };
    let (mut a, mut b) = (lo, hi);
    if ok(b) {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if ok(m) {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

/// `count` scales evenly inside the admissible range.
pub fn default_scales(cert: &InterleavingCertificate, count: usize) -> Vec<f64> {
    let lo = cert.interval.lo_f64();
    let top = admissible_top(cert);
    (1..=count)
        .map(|k| lo + (top - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

/// Empirical check of one containment relation on a probe lattice (for the
/// interleavings) or on seeded random point pairs (for `distance-pts`).
pub fn run_validate(cfg: &RunConfig, inst: &Instance, relation: Relation, negative_control: bool) -> Result<ValidationReport> {
    cfg.validate()?;
    let (m, metric_name) = inst.metric_landmarks();
    let domain = cfg.domain.clone().unwrap_or_else(|| offsets_domain(inst));
    let h = snapped_h(&domain, cfg.probe_resolution);
    let spec = cfg.spec(&domain, h);
    let probes = spec.lattice_points();
    let slack = cfg.slack_for(h);
    let mut warnings = Vec::new();
    let rel_tol = cfg.rel_tol.unwrap_or(1e-3);

    let mut measured = Measured {
        epsilon: None,
        delta: None,
    };
    let xs: Vec<&PointSet> = std::iter::once(&inst.xhat).chain(inst.x.as_ref()).collect();

    if relation == Relation::DistancePts {
        return validate_point_bounds(cfg, inst, spec, slack, negative_control);
    }

    let needs_x = matches!(relation, Relation::XToXhat | Relation::BigInterleaving | Relation::BiggerInterleaving);
    let needs_l = matches!(relation, Relation::LToLhat | Relation::BigInterleaving | Relation::BiggerInterleaving);
    if needs_x {
        inst.need_x()?;
    }
    if needs_l {
        inst.need_l()?;
    }
    let graph = MetricGraph::build(spec.clone(), m, &xs)?;
    if let Some(x) = &inst.x {
        let e = adaptive_hausdorff(&inst.xhat, x, &graph)?;
        measured.epsilon = Some(e);
        if needs_x && e > cfg.epsilon {
            warnings.push(format!(
                "claimed epsilon {} is below the measured value {e}; the hypothesis may fail",
                cfg.epsilon
            ));
        }
    }
    if let Some(l) = &inst.l {
        let d = landmark_hausdorff_bound(l, &inst.lhat, &inst.xhat, h / 4.0, rel_tol)?;
        measured.delta = Some(d);
        if needs_l && d > cfg.delta {
            warnings.push(format!(
                "claimed delta {} is below the certified bound {d}; the hypothesis may fail",
                cfg.delta
            ));
        }
    }

    let x_full = inst.x.as_ref().unwrap_or(&inst.xhat);
    let a_field = |set: &PointSet, name: &str| SublevelField::adaptive(name, &probes, set, &graph, slack);
    let b_field = |l: &LandmarkSet, name: &str| SublevelField::balls(name, &probes, &inst.xhat, l);
    let smoothed_field = || -> Result<SublevelField> {
        let s = SmoothedLandmarks::new(m.clone(), SmoothingConfig::new(cfg.alpha, cfg.beta)?);
        let g = build_smoothed_graph(spec.clone(), &s, &xs)?;
        SublevelField::adaptive(filtration::A_SMOOTH, &probes, x_full, &g, slack)
    };
    let (cert, from, to) = match relation {
        Relation::XToXhat => (
            x_to_xhat(cfg.epsilon)?,
            a_field(x_full, filtration::A_X)?,
            a_field(&inst.xhat, filtration::A_XHAT)?,
        ),
        Relation::AToB => (
            a_to_b()?,
            a_field(&inst.xhat, filtration::A_XHAT)?,
            b_field(m, filtration::B_XHAT_L)?,
        ),
        Relation::LToLhat => (
            l_to_lhat(cfg.delta)?,
            b_field(inst.need_l()?, filtration::B_XHAT_L)?,
            b_field(&inst.lhat, filtration::B_XHAT_LHAT)?,
        ),
        Relation::BigInterleaving => (
            adaptive_to_balls(cfg.epsilon, cfg.delta)?,
            a_field(x_full, filtration::A_X)?,
            b_field(&inst.lhat, filtration::B_XHAT_LHAT)?,
        ),
        Relation::Smoothing => (smoothing(cfg.alpha)?, smoothed_field()?, a_field(x_full, filtration::A_X)?),
        Relation::BiggerInterleaving => (
            smoothed_to_balls(cfg.epsilon, cfg.delta, cfg.alpha)?,
            smoothed_field()?,
            b_field(&inst.lhat, filtration::B_XHAT_LHAT)?,
        ),
        Relation::DistancePts => unreachable!("handled above"),
    };
    let scales = match &cfg.scales {
        Some(s) => s.clone(),
        None => default_scales(&cert, cfg.scale_count),
    };
    let used = if negative_control { halved(&cert)? } else { cert };
    let report = validate_certificate(&used, &from, &to, &scales);
    let violations = report.violation_count();
    let worst_margin = [report.forward.worst_margin, report.backward.worst_margin]
        .into_iter()
        .flatten()
        .reduce(f64::max);
    Ok(ValidationReport {
        relation,
        negative_control,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        alpha: cfg.alpha,
        beta: cfg.beta,
        metric_landmarks: metric_name,
        measured,
        graph: GraphSummary::of(&graph),
        slack,
        containment: Some(report),
        point_bounds: None,
        violations,
        worst_margin,
        warnings,
    })
}

/// Random pairs `a`, `b = a + t f_L(a) u` with `t < 0.9`, inside the domain
/// and drawn from the seeded generator. The segment from `a` to `b` keeps
/// clearance `(1-t) f_L(a) > 2 beta`, so the pair is connected in the graph.
pub fn random_pairs(
    landmarks: &LandmarkSet,
    domain: &Domain,
    beta: f64,
    count: usize,
    seed: u64,
) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = domain.lower.len();
    let inside = |p: &[f64]| {
        p.iter()
            .zip(domain.lower.iter().zip(&domain.upper))
            .all(|(x, (l, u))| *l <= *x && *x <= *u)
            && landmarks.distance_unchecked(p) > beta
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: Vec<f64> = (0..d).map(|k| rng.gen_range(domain.lower[k]..domain.upper[k])).collect();
        if !inside(&a) {
            continue;
        }
        let fa = landmarks.distance_unchecked(&a);
        let t: f64 = rng.gen_range(0.0..0.9);
        if (1.0 - t) * fa <= 2.0 * beta {
            continue;
        }
        let mut u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 1e-6 && n <= 1.0) {
            continue;
        }
        u.iter_mut().for_each(|x| *x /= n);
        let b: Vec<f64> = a.iter().zip(&u).map(|(p, v)| p + t * fa * v).collect();
        if !inside(&b) {
            continue;
        }
        out.push((Point::new(a).expect("finite"), Point::new(b).expect("finite")));
    }
    out
}

fn validate_point_bounds(
    cfg: &RunConfig,
    inst: &Instance,
    spec: GraphSpec,
    slack: f64,
    negative_control: bool,
) -> Result<ValidationReport> {
    let (m, metric_name) = inst.metric_landmarks();
    let domain = Domain {
        lower: spec.lower.clone(),
        upper: spec.upper.clone(),
    };
    let pairs = random_pairs(m, &domain, cfg.beta, cfg.pairs, cfg.seed);
    let mut coords = Vec::new();
    for (a, b) in &pairs {
        coords.extend_from_slice(a.coords());
        coords.extend_from_slice(b.coords());
    }
    let anchors = PointSet::from_flat(spec.dim(), coords)?;
    let graph = MetricGraph::build(spec, m, &[&anchors])?;
    // the negative control halves both bounds
    let shrink = if negative_control { 0.5 } else { 1.0 };
    let mut s = PointBoundsSummary {
        pairs: pairs.len(),
        euclidean_violations: 0,
        adaptive_violations: 0,
        worst_euclidean_margin: None,
        worst_adaptive_margin: None,
    };
    for (a, b) in &pairs {
        let c = point_distance_bounds(a, b, &graph, m)?;
        let fa = m.distance_unchecked(a.coords());
        let e = a.distance(b);
        if c.graph_distance < 1.0 {
            let margin = shrink * c.graph_distance / (1.0 - c.graph_distance) * fa - e;
            s.worst_euclidean_margin = Some(s.worst_euclidean_margin.map_or(margin, |w: f64| w.min(margin)));
            if margin < 0.0 {
                s.euclidean_violations += 1;
            }
        }
        if c.ratio < 1.0 {
            let margin = shrink * c.ratio / (1.0 - c.ratio) - c.graph_distance;
            s.worst_adaptive_margin = Some(s.worst_adaptive_margin.map_or(margin, |w: f64| w.min(margin)));
            if margin < -slack {
                s.adaptive_violations += 1;
            }
        }
    }
    let violations = s.euclidean_violations + s.adaptive_violations;
    let worst_margin = [s.worst_euclidean_margin, s.worst_adaptive_margin.map(|w| w + slack)]
        .into_iter()
        .flatten()
        .reduce(f64::min)
        .map(|w| -w);
    Ok(ValidationReport {
        relation: Relation::DistancePts,
        negative_control,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        alpha: cfg.alpha,
        beta: cfg.beta,
        metric_landmarks: metric_name,
        measured: Measured {
            epsilon: None,
            delta: None,
        },
        graph: GraphSummary::of(&graph),
        slack,
        containment: None,
        point_bounds: Some(s),
        violations,
        worst_margin,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------- distance

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub a: Point,
    pub b: Point,
    pub graph_distance: f64,
    /// closed form, available for a single point landmark
    pub exact: Option<f64>,
    pub relative_gap: Option<f64>,
    pub graph: GraphSummary,
}

/// Graph adaptive distance between two points, with the closed form when
/// the landmark set is one point.
pub fn run_distance(cfg: &RunConfig, landmarks: &LandmarkSet, a: &Point, b: &Point) -> Result<DistanceReport> {
    cfg.validate()?;
    for p in [a, b] {
        if p.dim() != landmarks.dim() {
            return Err(Error::DimensionMismatch {
                expected: landmarks.dim(),
                found: p.dim(),
            });
        }
    }
    let domain = cfg.domain.clone().unwrap_or_else(|| {
        let mut pts: Vec<&[f64]> = vec![a.coords(), b.coords()];
        pts.extend(landmark_coords(landmarks));
        let probe = cube_around(pts.iter().copied(), 0.0);
        let side = probe.upper[0] - probe.lower[0];
        cube_around(pts.into_iter(), 0.5 * side.max(1.0))
    });
    let anchors = PointSet::new(vec![a.clone(), b.clone()])?;
    let graph = MetricGraph::build(cfg.spec(&domain, cfg.h), landmarks, &[&anchors])?;
    let graph_distance = adaptive_distance(a, b, &graph)?;
    let exact = match landmarks.single_point() {
        Some(ell) => Some(exact_point_landmark_distance(a, b, ell)?),
        None => None,
    };
    let relative_gap = exact.map(|e| if e > 0.0 { (graph_distance - e).abs() / e } else { graph_distance });
    Ok(DistanceReport {
        a: a.clone(),
        b: b.clone(),
        graph_distance,
        exact,
        relative_gap,
        graph: GraphSummary::of(&graph),
    })
}

// ---------------------------------------------------------------- sample-check

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCheckReport {
    pub metric_landmarks: &'static str,
    pub graph: GraphSummary,
    #[serde(flatten)]
    pub report: SampleReport,
}

/// ε-sample and adaptive-Hausdorff duality for `Xhat ⊆ X`.
pub fn run_sample_check(cfg: &RunConfig, inst: &Instance) -> Result<SampleCheckReport> {
    cfg.validate()?;
    let x = inst.need_x()?;
    let (m, name) = inst.metric_landmarks();
    let domain = cfg.domain.clone().unwrap_or_else(|| offsets_domain(inst));
    let graph = MetricGraph::build(cfg.spec(&domain, cfg.h), m, &[&inst.xhat, x])?;
    let report = duality_check(&inst.xhat, x, m, &graph, cfg.slack_for(cfg.h))?;
    Ok(SampleCheckReport {
        metric_landmarks: name,
        graph: GraphSummary::of(&graph),
        report,
    })
}
