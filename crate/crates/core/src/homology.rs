//! Simplicial homology over Z/2 and the rank of inclusion-induced maps.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{LandmarkSet, PointSet};
use crate::interleaving::{make_h, rational, HKind, MobiusFunction};
use crate::nerve::{build_two_scale, faces, SimplicialComplex, TwoScaleFiltration};

/// Boundary matrix over Z/2 for an ordered list of simplices in which every
/// face precedes its cofaces. Column `j` lists the row indices of the
/// codimension-one faces of simplex `j`, increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    simplices: Vec<Vec<usize>>,
    columns: Vec<Vec<usize>>,
}

impl BoundaryMatrix {
    pub fn new(simplices: Vec<Vec<usize>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(simplices.len());
        let mut columns = Vec::with_capacity(simplices.len());
        for (j, s) in simplices.iter().enumerate() {
            let mut col = Vec::new();
            if s.len() > 1 {
                for f in faces(s) {
                    match index.get(&f) {
                        Some(&i) => col.push(i),
                        None => {
                            return Err(Error::InvalidInput(format!(
                                "face {f:?} of {s:?} does not precede it"
                            )))
                        }
                    }
                }
            }
            col.sort_unstable();
            columns.push(col);
            if index.insert(s.clone(), j).is_some() {
                return Err(Error::InvalidInput(format!("duplicate simplex {s:?}")));
            }
        }
        Ok(Self { simplices, columns })
    }

    /// Simplices by dimension, then lexicographically.
    pub fn of_complex(k: &SimplicialComplex) -> Self {
        Self::new(k.iter().cloned().collect()).expect("complexes are downward closed")
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    /// Column reduction; returns the pivot (largest row index) of every
    /// reduced column, `None` for columns reduced to zero.
    pub fn reduce(&self) -> Vec<Option<usize>> {
        let n = self.columns.len();
        let mut cols = self.columns.clone();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut low = vec![None; n];
        for j in 0..n {
            while let Some(&l) = cols[j].last() {
                match owner[l] {
                    Some(i) => {
                        let other = std::mem::take(&mut cols[i]);
                        cols[j] = sym_diff(&cols[j], &other);
                        cols[i] = other;
                    }
                    None => {
                        owner[l] = Some(j);
                        low[j] = Some(l);
                        break;
                    }
                }
            }
        }
        low
    }
}

/// Symmetric difference of two increasing lists.
fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `b_k = n_k - rank ∂_k - rank ∂_{k+1}` for `k = 0..=dim K`.
pub fn betti_numbers(k: &SimplicialComplex) -> Vec<usize> {
    let Some(top) = k.dim() else {
        return Vec::new();
    };
    let m = BoundaryMatrix::of_complex(k);
    let low = m.reduce();
    let mut n = vec![0usize; top + 2];
    let mut rank = vec![0usize; top + 2];
    for (s, l) in m.simplices.iter().zip(&low) {
        let d = s.len() - 1;
        n[d] += 1;
        if l.is_some() {
            rank[d] += 1;
        }
    }
    (0..=top).map(|d| n[d] - rank[d] - rank[d + 1]).collect()
}

/// Rank of `H_k(K1) -> H_k(K2)` for `k < max(dim K2, 1)`.
///
/// The top dimension of `K2` is left out: a nerve capped at `max_dim` has
/// exact homology only below it.
///
/// Computed from the two-step filtration (all of `K1`, then `K2 \ K1`): a
/// class survives into `K2` iff it is born by a positive simplex of `K1` that
/// no column of the whole filtration kills.
pub fn image_rank(f: &TwoScaleFiltration) -> Result<Vec<usize>> {
    image_rank_of(&f.k1, &f.k2)
}

pub fn image_rank_of(k1: &SimplicialComplex, k2: &SimplicialComplex) -> Result<Vec<usize>> {
    if !k1.is_subcomplex_of(k2) {
        return Err(Error::InvalidInput("first complex is not contained in the second".into()));
    }
    let dims = k2.dim().unwrap_or(0).max(1);
    let mut order: Vec<Vec<usize>> = k1.iter().cloned().collect();
    let n1 = order.len();
    order.extend(k2.iter().filter(|s| !k1.contains(s)).cloned());
    let m = BoundaryMatrix::new(order)?;
    let low = m.reduce();
    let mut killed = vec![false; low.len()];
    for l in low.iter().flatten() {
        killed[*l] = true;
    }
    let mut out = vec![0usize; dims];
    for j in 0..n1 {
        let d = m.simplices[j].len() - 1;
        if d < dims && low[j].is_none() && !killed[j] {
            out[d] += 1;
        }
    }
    Ok(out)
}

/// Sampling parameters and the asserted feature-size bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assumptions {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub asserted_wfs_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scales {
    pub eta: f64,
    pub t1: f64,
    pub t2: f64,
    /// the gate value `h9 h8 h9 h8 (eta)`
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BettiReport {
    pub betti_small: Vec<usize>,
    pub betti_large: Vec<usize>,
    pub image_rank: Vec<usize>,
    pub assumptions: Assumptions,
    pub scales: Scales,
    pub simplex_counts: (Vec<usize>, Vec<usize>),
    pub warnings: Vec<String>,
}

/// The scale chain `h8(η), h9 h8(η), h8 h9 h8(η), h9 h8 h9 h8(η)`, evaluated
/// exactly. Every term must lie in `(0, 1)`.
pub fn scale_chain(a: &Assumptions) -> Result<[f64; 4]> {
    let h8 = make_h(HKind::H8 {
        epsilon: a.epsilon,
        delta: a.delta,
        alpha: a.alpha,
    })?;
    let h9 = make_h(HKind::H9 {
        epsilon: a.epsilon,
        delta: a.delta,
        alpha: a.alpha,
    })?;
    if !(a.eta > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "eta",
            value: a.eta,
            range: "(0, inf)",
        });
    }
    let mut r = rational(a.eta)?;
    let mut out = [0.0; 4];
    let maps: [&MobiusFunction; 4] = [&h8, &h9, &h8, &h9];
    for (i, h) in maps.iter().enumerate() {
        let next = h.eval(&r);
        let ok = next.as_ref().is_some_and(|v| v.is_positive_and_below_one());
        if !ok {
            // the composed map is still defined past the failing step; its
            // value is what the gate compares against 1
            let threshold = h9.compose(&h8).compose(&h9).compose(&h8).eval_f64(a.eta);
            return Err(Error::Precondition {
                message: format!(
                    "h9 h8 h9 h8 (eta) < 1 fails at step {} of the scale chain for eta = {}",
                    i + 1,
                    a.eta
                ),
                threshold,
            });
        }
        r = next.expect("checked above");
        out[i] = r.to_f64().unwrap_or(f64::NAN);
    }
    Ok(out)
}

trait UnitInterval {
    fn is_positive_and_below_one(&self) -> bool;
}

impl UnitInterval for BigRational {
    fn is_positive_and_below_one(&self) -> bool {
        *self > BigRational::zero() && *self < BigRational::one()
    }
}

/// Inferred homology of a small smoothed adaptive offset of `X` from the
/// image of `H(B(t1)) -> H(B(t2))` of the sample's ball unions. Reports
/// dimensions `0..d`; nerves are built up to dimension `max_dim`
/// (default `d + 1`).
pub fn infer_homology(
    xhat: &PointSet,
    lhat: &LandmarkSet,
    assumptions: Assumptions,
    max_dim: Option<usize>,
) -> Result<BettiReport> {
    infer_homology_with_nerves(xhat, lhat, assumptions, max_dim).map(|(r, _)| r)
}

/// As [`infer_homology`], also returning the two nerves.
pub fn infer_homology_with_nerves(
    xhat: &PointSet,
    lhat: &LandmarkSet,
    assumptions: Assumptions,
    max_dim: Option<usize>,
) -> Result<(BettiReport, TwoScaleFiltration)> {
    let a = assumptions;
    if !(a.beta > 0.0 && a.beta < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "beta",
            value: a.beta,
            range: "(0, 1)",
        });
    }
    let chain = scale_chain(&a)?;
    let threshold = chain[3];
    if !(a.asserted_wfs_bound > threshold) {
        return Err(Error::Assumption(format!(
            "asserted weak feature size {} must exceed h9 h8 h9 h8 (eta) = {threshold}",
            a.asserted_wfs_bound
        )));
    }
    let d = xhat.dim();
    if lhat.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: lhat.dim(),
        });
    }
    // Lhat ⊆ L gives f_L <= f_Lhat, so this is necessary for X ∩ L^beta = ∅
    for x in xhat.iter() {
        let f = lhat.distance_unchecked(x);
        if !(f > a.beta) {
            return Err(Error::InsideExclusion { distance: f, beta: a.beta });
        }
    }
    let (t1, t2) = (chain[0], chain[2]);
    let max_dim = max_dim.unwrap_or(d + 1);
    let filt = build_two_scale(xhat, lhat, t1, t2, max_dim)?;
    let truncate = |mut v: Vec<usize>| {
        v.resize(d, 0);
        v
    };
    let mut image = image_rank(&filt)?;
    image.resize(d, 0);
    let counts = |k: &SimplicialComplex| (0..=k.dim().unwrap_or(0)).map(|i| k.count(i)).collect();
    let mut warnings = Vec::new();
    if max_dim < d {
        warnings.push(format!(
            "nerves capped at dimension {max_dim}; homology in dimensions >= {max_dim} is not exact"
        ));
    }
    let report = BettiReport {
        betti_small: truncate(betti_numbers(&filt.k1)),
        betti_large: truncate(betti_numbers(&filt.k2)),
        image_rank: image,
        assumptions: a,
        scales: Scales {
            eta: a.eta,
            t1,
            t2,
            threshold,
        },
        simplex_counts: (counts(&filt.k1), counts(&filt.k2)),
        warnings,
    };
    Ok((report, filt))
}
