//! Nerves of variable-radius ball covers.
//!
//! Whether closed balls `ball(c_i, r_i)` share a point is decided through the
//! convex minimax `g* = min_p max_i (|p - c_i| - r_i)`: the balls meet iff
//! `g* <= 0`. The optimum is attained at a point equidistant (in the shifted
//! sense `|p - c_j| - r_j = R`) from an affinely independent support set of at
//! most `d + 1` centres, so enumerating support sets yields candidate points
//! whose objective values are upper bounds, the least of which is `g*`.
//! A Lagrangian lower bound certifies the "disjoint" answer.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, PointSet};
use crate::metric::feature_sizes;

/// Relative tolerance band around tangency, scaled by the instance size.
pub const RELATIVE_TOL: f64 = 1e-9;

/// Downward-closed set of simplices on `0..vertex_count`, each a strictly
/// increasing vertex list, stored by dimension in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Validates the simplices and downward closure.
    pub fn new(vertex_count: usize, simplices: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut seen = HashSet::new();
        for s in simplices {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s[s.len() - 1] >= vertex_count {
                return Err(Error::InvalidInput(format!(
                    "simplex {s:?} is not a strictly increasing list of vertices below {vertex_count}"
                )));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidInput(format!("duplicate simplex {s:?}")));
            }
            let k = s.len() - 1;
            if by_dim.len() <= k {
                by_dim.resize(k + 1, Vec::new());
            }
            by_dim[k].push(s);
        }
        for level in &mut by_dim {
            level.sort();
        }
        let c = Self {
            vertex_count,
            simplices: by_dim,
        };
        for s in c.iter().filter(|s| s.len() > 1) {
            for f in faces(s) {
                if !seen.contains(&f) {
                    return Err(Error::InvalidInput(format!("face {f:?} of {s:?} is missing")));
                }
            }
        }
        Ok(c)
    }

    /// Smallest complex containing the given simplices (vertex lists need
    /// not be sorted).
    pub fn closure(vertex_count: usize, simplices: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut all = HashSet::new();
        for mut s in simplices {
            s.sort_unstable();
            s.dedup();
            let m = s.len();
            if m == 0 || m > 20 {
                return Err(Error::InvalidInput(format!("cannot close simplex {s:?}")));
            }
            for mask in 1u32..(1 << m) {
                all.insert((0..m).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect::<Vec<_>>());
            }
        }
        Self::new(vertex_count, all)
    }

    /// The complex with isolated vertices only.
    pub fn discrete(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            simplices: if vertex_count == 0 {
                Vec::new()
            } else {
                vec![(0..vertex_count).map(|v| vec![v]).collect()]
            },
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().rposition(|l| !l.is_empty())
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], |l| l.as_slice())
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn len(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All simplices, by dimension then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.simplices.iter().flatten()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len()
            .checked_sub(1)
            .is_some_and(|k| self.simplices(k).binary_search_by(|t| t.as_slice().cmp(s)).is_ok())
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.vertex_count <= other.vertex_count && self.iter().all(|s| other.contains(s))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// One simplex per line, indices separated by spaces, lines sorted
    /// lexicographically as index tuples.
    pub fn to_text(&self) -> String {
        let mut all: Vec<&Vec<usize>> = self.iter().collect();
        all.sort();
        let mut out = String::new();
        for s in all {
            let line: Vec<String> = s.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Codimension-one faces, in lexicographic order.
pub fn faces(s: &[usize]) -> Vec<Vec<usize>> {
    (0..s.len())
        .rev()
        .map(|skip| s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect())
        .collect()
}

/// Outcome of the minimax computation for a family of balls.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimax {
    /// best point found
    pub point: Vec<f64>,
    /// `g(point)`, an upper bound on `g*`
    pub upper: f64,
    /// certified lower bound on `g*`
    pub lower: f64,
}

fn objective(p: &[f64], centers: &[&[f64]], radii: &[f64]) -> f64 {
    centers
        .iter()
        .zip(radii)
        .map(|(c, r)| dist(p, c) - r)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `g x = rhs` for each right-hand side; `None` when `g` is
/// numerically singular.
fn solve(mut g: Vec<Vec<f64>>, mut rhs: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = g.len();
    let scale = (0..n).map(|i| g[i][i].abs()).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if !(g[piv][col].abs() > 1e-12 * scale) {
            return None;
        }
        g.swap(col, piv);
        for r in rhs.iter_mut() {
            r.swap(col, piv);
        }
        for row in col + 1..n {
            let f = g[row][col] / g[col][col];
            for k in col..n {
                g[row][k] -= f * g[col][k];
            }
            for r in rhs.iter_mut() {
                r[row] -= f * r[col];
            }
        }
    }
    for r in rhs.iter_mut() {
        for row in (0..n).rev() {
            let mut v = r[row];
            for k in row + 1..n {
                v -= g[row][k] * r[k];
            }
            r[row] = v / g[row][row];
        }
    }
    Some(rhs)
}

/// Calls `f` on every subset of `0..m` of size `1..=max_size`.
fn for_subsets(m: usize, max_size: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, max: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        for i in start..m {
            cur.push(i);
            f(cur);
            if cur.len() < max {
                rec(i + 1, m, max, cur, f);
            }
            cur.pop();
        }
    }
    rec(0, m, max_size, &mut Vec::new(), &mut f);
}

/// Points equidistant, in the shifted sense, from the centres of `subset`
/// within their affine hull.
fn support_candidates(subset: &[usize], centers: &[&[f64]], radii: &[f64], out: &mut Vec<Vec<f64>>) {
    let c1 = centers[subset[0]];
    let r1 = radii[subset[0]];
    if subset.len() == 1 {
        out.push(c1.to_vec());
        return;
    }
    let v: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&j| centers[j].iter().zip(c1).map(|(a, b)| a - b).collect())
        .collect();
    let m = v.len();
    let gram: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| dot(&v[i], &v[j])).collect()).collect();
    let b0: Vec<f64> = subset[1..]
        .iter()
        .zip(&v)
        .map(|(&j, vj)| 0.5 * (dot(vj, vj) - radii[j] * radii[j] + r1 * r1))
        .collect();
    let b1: Vec<f64> = subset[1..].iter().map(|&j| r1 - radii[j]).collect();
    let Some(sol) = solve(gram, vec![b0, b1]) else {
        return;
    };
    let combine = |mu: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; c1.len()];
        for (vj, m) in v.iter().zip(mu) {
            for (pk, vk) in p.iter_mut().zip(vj) {
                *pk += m * vk;
            }
        }
        p
    };
    let (p0, p1) = (combine(&sol[0]), combine(&sol[1]));
    // |p0 + R p1|^2 = (R + r1)^2
    let a = dot(&p1, &p1) - 1.0;
    let b = 2.0 * (dot(&p0, &p1) - r1);
    let c = dot(&p0, &p0) - r1 * r1;
    let mut roots = Vec::new();
    if a.abs() <= 1e-14 {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let q = -0.5 * (b + b.signum() * s);
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(0.0);
            }
        } else {
            // nearly tangent discriminant: keep the vertex of the parabola
            roots.push(-b / (2.0 * a));
        }
    }
    for r in roots {
        if r.is_finite() {
            out.push(c1.iter().zip(p0.iter().zip(&p1)).map(|(c, (x, y))| c + x + r * y).collect());
        }
    }
}

/// Convex weights over `u` whose combination has (approximately) least norm.
fn min_norm_weights(u: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let m = u.len();
    let mut best = (f64::INFINITY, vec![0.0; m]);
    for_subsets(m, (dim + 1).min(m), |t| {
        let base = &u[t[0]];
        let w: Vec<Vec<f64>> = t[1..]
            .iter()
            .map(|&j| u[j].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let k = w.len();
        let nu = if k == 0 {
            Vec::new()
        } else {
            let gram = (0..k).map(|i| (0..k).map(|j| dot(&w[i], &w[j])).collect()).collect();
            let rhs = w.iter().map(|wi| -dot(wi, base)).collect();
            match solve(gram, vec![rhs]) {
                Some(mut s) => s.pop().expect("one right-hand side"),
                None => return,
            }
        };
        let first = 1.0 - nu.iter().sum::<f64>();
        if first < 0.0 || nu.iter().any(|&x| x < 0.0) {
            return;
        }
        let mut lambda = vec![0.0; m];
        lambda[t[0]] = first;
        for (&j, &x) in t[1..].iter().zip(&nu) {
            lambda[j] = x;
        }
        let norm = norm_of_combination(u, &lambda, dim);
        if norm < best.0 {
            best = (norm, lambda);
        }
    });
    best.1
}

fn norm_of_combination(u: &[Vec<f64>], lambda: &[f64], dim: usize) -> f64 {
    let mut s = vec![0.0; dim];
    for (ui, l) in u.iter().zip(lambda) {
        for (sk, x) in s.iter_mut().zip(ui) {
            *sk += l * x;
        }
    }
    dot(&s, &s).sqrt()
}

/// Lower bound on `g*`: for convex weights `λ` and vectors `|u_i| <= 1`,
/// `g(p) >= Σ λ_i (u_i·(p - c_i) - r_i)`; the minimizer lies in the convex
/// hull of the centres, within `D` of their centroid `o`, which bounds the
/// term `(Σ λ_i u_i)·(p - o)`.
fn dual_lower_bound(point: &[f64], centers: &[&[f64]], radii: &[f64], upper: f64, band: f64) -> f64 {
    let dim = point.len();
    let m = centers.len();
    let mut o = vec![0.0; dim];
    for c in centers {
        for (ok, ck) in o.iter_mut().zip(c.iter()) {
            *ok += ck / m as f64;
        }
    }
    let spread = centers.iter().map(|c| dist(c, &o)).fold(0.0, f64::max);
    let mut best = radii.iter().map(|r| -r).fold(f64::NEG_INFINITY, f64::max);
    for i in 0..m {
        for j in i + 1..m {
            best = best.max(0.5 * (dist(centers[i], centers[j]) - radii[i] - radii[j]));
        }
    }
    let active: Vec<usize> = (0..m)
        .filter(|&i| dist(point, centers[i]) - radii[i] >= upper - band)
        .collect();
    let u: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| {
            let n = dist(point, centers[i]);
            if n > 0.0 {
                point.iter().zip(centers[i]).map(|(p, c)| (p - c) / n).collect()
            } else {
                vec![0.0; dim]
            }
        })
        .collect();
    if u.is_empty() {
        return best;
    }
    let lambda = min_norm_weights(&u, dim);
    let w = norm_of_combination(&u, &lambda, dim);
    let mut bound = -w * spread;
    for ((&i, ui), l) in active.iter().zip(&u).zip(&lambda) {
        let oc: Vec<f64> = o.iter().zip(centers[i]).map(|(a, b)| a - b).collect();
        bound += l * (dot(ui, &oc) - radii[i]);
    }
    best.max(bound)
}

/// Solves the minimax problem for the given balls.
pub fn minimax_balls(centers: &[&[f64]], radii: &[f64]) -> Result<Minimax> {
    if centers.is_empty() || centers.len() != radii.len() {
        return Err(Error::InvalidInput("need equally many centres and radii, at least one".into()));
    }
    let dim = centers[0].len();
    if centers.iter().any(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: centers.iter().map(|c| c.len()).find(|&l| l != dim).unwrap_or(dim),
        });
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidInput("radii must be finite and nonnegative".into()));
    }
    let m = centers.len();
    let mut candidates = Vec::new();
    for_subsets(m, (dim + 1).min(m), |s| support_candidates(s, centers, radii, &mut candidates));
    let mut best = (f64::INFINITY, centers[0].to_vec());
    for p in candidates {
        let g = objective(&p, centers, radii);
        if g < best.0 {
            best = (g, p);
        }
    }
    let scale = instance_scale(centers, radii);
    let lower = dual_lower_bound(&best.1, centers, radii, best.0, 1e-7 * scale);
    Ok(Minimax {
        point: best.1,
        upper: best.0,
        lower,
    })
}

fn instance_scale(centers: &[&[f64]], radii: &[f64]) -> f64 {
    let c = centers
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    radii.iter().fold(c, |m, r| m.max(*r)).max(f64::MIN_POSITIVE)
}

/// Default tolerance `1e-9 * scale` for a family of balls.
pub fn default_tolerance(centers: &[&[f64]], radii: &[f64]) -> f64 {
    RELATIVE_TOL * instance_scale(centers, radii)
}

/// Do the closed balls share a point? Tangency within `tol` counts as
/// intersecting; an undecided instance is an error.
pub fn balls_have_common_point(centers: &[&[f64]], radii: &[f64], tol: f64) -> Result<bool> {
    decide(centers, radii, tol, &[])
}

fn decide(centers: &[&[f64]], radii: &[f64], tol: f64, simplex: &[usize]) -> Result<bool> {
    let mm = minimax_balls(centers, radii)?;
    if mm.upper <= tol {
        Ok(true)
    } else if mm.lower > tol {
        Ok(false)
    } else {
        Err(Error::Indeterminate {
            simplex: simplex.to_vec(),
            lower: mm.lower,
            upper: mm.upper,
            tol,
        })
    }
}

/// Nerve of `{ball(c_i, r_i)}` up to dimension `max_dim`. Simplices of
/// `known` are accepted without testing (used when radii only grew).
pub fn nerve_of_balls(
    centers: &PointSet,
    radii: &[f64],
    max_dim: usize,
    tol: f64,
    known: Option<&SimplicialComplex>,
) -> Result<SimplicialComplex> {
    let n = centers.len();
    if radii.len() != n {
        return Err(Error::InvalidInput("one radius per centre required".into()));
    }
    let mut levels: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|v| vec![v]).collect()];
    for k in 1..=max_dim {
        let prev = &levels[k - 1];
        let prev_set: HashSet<&Vec<usize>> = prev.iter().collect();
        let mut candidates = Vec::new();
        for s in prev {
            for v in s[s.len() - 1] + 1..n {
                let mut t = s.clone();
                t.push(v);
                if faces(&t).iter().all(|f| prev_set.contains(f)) {
                    candidates.push(t);
                }
            }
        }
        let decided: Vec<Result<bool>> = candidates
            .par_iter()
            .map(|t| {
                if known.is_some_and(|kc| kc.contains(t)) {
                    return Ok(true);
                }
                let cs: Vec<&[f64]> = t.iter().map(|&i| centers.get(i)).collect();
                let rs: Vec<f64> = t.iter().map(|&i| radii[i]).collect();
                decide(&cs, &rs, tol, t)
            })
            .collect();
        let mut level = Vec::new();
        for (t, d) in candidates.into_iter().zip(decided) {
            if d? {
                level.push(t);
            }
        }
        if level.is_empty() {
            break;
        }
        levels.push(level);
    }
    Ok(SimplicialComplex {
        vertex_count: n,
        simplices: if n == 0 { Vec::new() } else { levels },
    })
}

/// Radii `alpha * f_Lhat(x)` and the instance tolerance.
fn cover(xhat: &PointSet, lhat: &LandmarkSet, alpha: f64) -> Result<(Vec<f64>, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, inf)",
        });
    }
    let radii: Vec<f64> = feature_sizes(xhat, lhat)?.iter().map(|f| alpha * f).collect();
    let cs: Vec<&[f64]> = xhat.iter().collect();
    Ok((radii.clone(), default_tolerance(&cs, &radii)))
}

/// Nerve of `{ball(x, alpha f_Lhat(x))}` over the sample points.
pub fn build_nerve(xhat: &PointSet, lhat: &LandmarkSet, alpha: f64, max_dim: usize) -> Result<SimplicialComplex> {
    let (radii, tol) = cover(xhat, lhat, alpha)?;
    nerve_of_balls(xhat, &radii, max_dim, tol, None)
}

/// Nerves at two scales with `k1 ⊆ k2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoScaleFiltration {
    pub k1: SimplicialComplex,
    pub k2: SimplicialComplex,
    pub scales: (f64, f64),
}

impl TwoScaleFiltration {
    /// Pairs two complexes, checking the inclusion.
    pub fn new(k1: SimplicialComplex, k2: SimplicialComplex, scales: (f64, f64)) -> Result<Self> {
        if !k1.is_subcomplex_of(&k2) {
            return Err(Error::InvalidInput("first complex is not contained in the second".into()));
        }
        Ok(Self { k1, k2, scales })
    }
}

/// Both nerves over the same vertices; the larger one reuses the smaller's
/// simplices, so inclusion holds by construction. The tolerance is that of the
/// larger cover, applied to both.
pub fn build_two_scale(
    xhat: &PointSet,
    lhat: &LandmarkSet,
    alpha1: f64,
    alpha2: f64,
    max_dim: usize,
) -> Result<TwoScaleFiltration> {
    if !(alpha1 > 0.0 && alpha1 <= alpha2) {
        return Err(Error::InvalidInput(format!(
            "scales must satisfy 0 < alpha1 <= alpha2, got {alpha1} and {alpha2}"
        )));
    }
    let (r2, tol) = cover(xhat, lhat, alpha2)?;
    let (r1, _) = cover(xhat, lhat, alpha1)?;
    let k1 = nerve_of_balls(xhat, &r1, max_dim, tol, None)?;
    let k2 = nerve_of_balls(xhat, &r2, max_dim, tol, Some(&k1))?;
    Ok(TwoScaleFiltration {
        k1,
        k2,
        scales: (alpha1, alpha2),
    })
}
