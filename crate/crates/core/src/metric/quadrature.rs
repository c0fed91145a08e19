//! Certified line integrals of `1/f` for 1-Lipschitz `f`.
//!
//! On a straight piece of length `len` with midpoint `m`, 1-Lipschitzness
//! gives `f(m) - len/2 <= f(z) <= f(m) + len/2` for every `z` on the piece,
//! so the piece integral lies in `[len/(f(m)+len/2), len/(f(m)-len/2)]`.
//! Pieces are bisected until that interval is relatively tight.

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, Point};

use super::FeatureSize;

const MAX_DEPTH: u32 = 60;
const MAX_PIECES: usize = 1 << 22;
/// Clearance below this multiple of the coordinate scale is treated as
/// touching `f = 0`: rounding in the midpoint then exceeds the piece itself,
/// and a crossing piece could otherwise be accepted with a finite cost.
const CLEARANCE_FLOOR: f64 = 1e-12;

/// Two-sided enclosure of a line integral together with the midpoint-rule
/// estimate, which always lies inside the enclosure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedIntegral {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl CertifiedIntegral {
    pub const ZERO: Self = Self {
        estimate: 0.0,
        lower: 0.0,
        upper: 0.0,
    };
}

/// Integral of `1/f` along the straight segment from `a` to `b`, with
/// `upper - lower <= rel_tol * lower`.
pub fn integrate_inverse<F: FeatureSize + ?Sized>(
    f: &F,
    a: &[f64],
    b: &[f64],
    rel_tol: f64,
) -> Result<CertifiedIntegral> {
    if !(rel_tol > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "rel_tol",
            value: rel_tol,
            range: "(0, inf)",
        });
    }
    let total = dist(a, b);
    if total == 0.0 {
        return Ok(CertifiedIntegral::ZERO);
    }
    let d = a.len();
    let scale = a.iter().chain(b).fold(total, |m, x| m.max(x.abs()));
    let floor = CLEARANCE_FLOOR * scale;
    let mut mid = vec![0.0; d];
    let mut out = CertifiedIntegral::ZERO;
    let mut pieces = 0usize;
    let mut min_clearance = f64::INFINITY;
    // (t0, t1, depth); right halves pushed first so pieces are summed left to right
    let mut stack = vec![(0.0f64, 1.0f64, 0u32)];
    while let Some((t0, t1, depth)) = stack.pop() {
        let tm = 0.5 * (t0 + t1);
        for k in 0..d {
            mid[k] = a[k] + tm * (b[k] - a[k]);
        }
        let len = total * (t1 - t0);
        let fm = f.value(&mid);
        let clearance = fm - 0.5 * len;
        min_clearance = min_clearance.min(fm);
        if clearance > floor && len <= rel_tol * clearance {
            out.lower += len / (fm + 0.5 * len);
            out.upper += len / clearance;
            out.estimate += len / fm;
            pieces += 1;
            continue;
        }
        if depth >= MAX_DEPTH || pieces + stack.len() >= MAX_PIECES {
            return Err(Error::DivergentIntegral {
                clearance: min_clearance,
            });
        }
        stack.push((tm, t1, depth + 1));
        stack.push((t0, tm, depth + 1));
    }
    Ok(out)
}

/// `∫ dz / f_L(z)` along the segment `[a, b]`, within relative error `rel_tol`.
pub fn segment_cost(a: &Point, b: &Point, landmarks: &LandmarkSet, rel_tol: f64) -> Result<f64> {
    for p in [a, b] {
        if p.dim() != landmarks.dim() {
            return Err(Error::DimensionMismatch {
                expected: landmarks.dim(),
                found: p.dim(),
            });
        }
    }
    integrate_inverse(landmarks, a.coords(), b.coords(), rel_tol).map(|c| c.estimate)
}
