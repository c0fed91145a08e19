//! Interleaving certificates between named filtrations and their composition.

use serde::Serialize;

use crate::error::{Error, Result};

use super::mobius::{make_h, HKind, Interval, MobiusFunction};

/// `from(r) ⊆ to(forward(r))` and `to(r) ⊆ from(backward(r))` whenever both
/// the scale and its image lie in `interval`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterleavingCertificate {
    pub from: String,
    pub to: String,
    pub forward: MobiusFunction,
    pub backward: MobiusFunction,
    pub interval: Interval,
    pub provenance: String,
}

impl InterleavingCertificate {
    pub fn new(
        from: impl Into<String>,
        to: impl Into<String>,
        forward: MobiusFunction,
        backward: MobiusFunction,
        interval: Interval,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let cert = Self {
            from: from.into(),
            to: to.into(),
            forward,
            backward,
            interval,
            provenance: provenance.into(),
        };
        cert.validate()?;
        Ok(cert)
    }

    /// `h = r` both ways on `(0, inf)`.
    pub fn identity(name: impl Into<String>) -> Self {
        let name = name.into();
        Self {
            from: name.clone(),
            to: name,
            forward: MobiusFunction::identity(),
            backward: MobiusFunction::identity(),
            interval: Interval::positive(),
            provenance: "identity".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.interval.is_empty() {
            return Err(Error::DegenerateCertificate {
                lo: self.interval.lo.to_string(),
                hi: self.interval.hi.as_ref().map_or("inf".into(), |h| h.to_string()),
            });
        }
        for (which, h) in [("forward", &self.forward), ("backward", &self.backward)] {
            if !h.is_nondecreasing_on(&self.interval) {
                return Err(Error::Composition(format!(
                    "{which} map {h} is not non-decreasing on {}",
                    self.interval
                )));
            }
        }
        Ok(())
    }

    /// The same certificate read in the opposite direction.
    pub fn reversed(&self) -> Self {
        Self {
            from: self.to.clone(),
            to: self.from.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            interval: self.interval.clone(),
            provenance: format!("reverse of {}", self.provenance),
        }
    }
}

/// `(F, G)` then `(G, H)` gives `(F, H)` with forward `g2 ∘ g1`, backward
/// `b1 ∘ b2`, on the intersection of the two intervals.
pub fn compose_interleavings(
    first: &InterleavingCertificate,
    second: &InterleavingCertificate,
) -> Result<InterleavingCertificate> {
    if first.to != second.from {
        return Err(Error::Composition(format!(
            "cannot compose ({}, {}) with ({}, {})",
            first.from, first.to, second.from, second.to
        )));
    }
    InterleavingCertificate::new(
        first.from.clone(),
        second.to.clone(),
        second.forward.compose(&first.forward),
        first.backward.compose(&second.backward),
        first.interval.intersect(&second.interval),
        format!("({}) then ({})", first.provenance, second.provenance),
    )
}

/// Names of the filtrations used by the standard certificates.
pub mod filtration {
    /// adaptive offsets of the true space
    pub const A_X: &str = "A[X;L]";
    /// adaptive offsets of the sample
    pub const A_XHAT: &str = "A[Xhat;L]";
    /// ball unions of the sample, scaled by the true landmarks
    pub const B_XHAT_L: &str = "B[Xhat;L]";
    /// ball unions of the sample, scaled by the sampled landmarks
    pub const B_XHAT_LHAT: &str = "B[Xhat;Lhat]";
    /// offsets of the smoothed adaptive distance
    pub const A_SMOOTH: &str = "A~[X;L]";
}

use filtration::*;

fn symmetric(from: &str, to: &str, kind: HKind, provenance: &str) -> Result<InterleavingCertificate> {
    let h = make_h(kind)?;
    InterleavingCertificate::new(from, to, h.clone(), h, kind.interval(), provenance)
}

/// `d_H^L(Xhat, X) <= ε`: `(A[X], A[Xhat])` with `r + ε` both ways.
pub fn x_to_xhat(epsilon: f64) -> Result<InterleavingCertificate> {
    symmetric(A_X, A_XHAT, HKind::H1 { epsilon }, "sample of X within adaptive Hausdorff epsilon")
}

/// `(A[Xhat], B[Xhat;L])` with `r / (1 - r)`. Containment of `A(r)` holds for
/// `r < 1` and of `B(r)` for `r < 1/2`; on `(0, 1)` the image condition
/// `r / (1 - r) < 1` already forces `r < 1/2`.
pub fn a_to_b() -> Result<InterleavingCertificate> {
    let h = make_h(HKind::H2)?;
    InterleavingCertificate::new(
        A_XHAT,
        B_XHAT_L,
        h.clone(),
        h,
        Interval::bounded((0, 1), (1, 1)),
        "adaptive offsets versus Euclidean ball unions",
    )
}

/// `d_H^Xhat(L, Lhat) <= δ < 1`: `(B[Xhat;L], B[Xhat;Lhat])` with `r / (1 - δ)`.
pub fn l_to_lhat(delta: f64) -> Result<InterleavingCertificate> {
    symmetric(B_XHAT_L, B_XHAT_LHAT, HKind::H3 { delta }, "landmark sample within delta")
}

/// `(A~[X], A[X])` with `(1 + α) r` forward and `r / (1 - α)` backward.
pub fn smoothing(alpha: f64) -> Result<InterleavingCertificate> {
    InterleavingCertificate::new(
        A_SMOOTH,
        A_X,
        make_h(HKind::H6 { alpha })?,
        make_h(HKind::H7 { alpha })?,
        Interval::positive(),
        "mollified landmark distance",
    )
}

/// `(A[X], B[Xhat;Lhat])` with `(h4, h5)` on `(0, 1)`, assembled by composition.
pub fn adaptive_to_balls(epsilon: f64, delta: f64) -> Result<InterleavingCertificate> {
    let c = compose_interleavings(&x_to_xhat(epsilon)?, &a_to_b()?)?;
    compose_interleavings(&c, &l_to_lhat(delta)?)
}

/// `(A~[X], B[Xhat;Lhat])` with `(h8, h9)` on `(0, 1)`.
pub fn smoothed_to_balls(epsilon: f64, delta: f64, alpha: f64) -> Result<InterleavingCertificate> {
    compose_interleavings(&smoothing(alpha)?, &adaptive_to_balls(epsilon, delta)?)
}
