//! Exact Möbius maps `r -> (a r + b) / (c r + e)` over arbitrary-precision
//! rationals. Composition is 2x2 matrix multiplication, so every scale map
//! built from the elementary ones stays exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not finite")))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Open interval `(lo, hi)`; `hi = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: Option<BigRational>,
}

impl Interval {
    pub fn new(lo: BigRational, hi: Option<BigRational>) -> Self {
        Self { lo, hi }
    }

    /// `(0, inf)`
    pub fn positive() -> Self {
        Self::new(BigRational::zero(), None)
    }

    pub fn bounded(lo: (i64, i64), hi: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(lo.0.into(), lo.1.into()),
            Some(BigRational::new(hi.0.into(), hi.1.into())),
        )
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.hi, Some(hi) if *hi <= self.lo)
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        *r > self.lo && self.hi.as_ref().is_none_or(|hi| r < hi)
    }

    pub fn contains_f64(&self, r: f64) -> bool {
        rational(r).map(|q| self.contains(&q)).unwrap_or(false)
    }

    /// `(max lo, min hi)`
    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.clone().min(b.clone())),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Interval { lo, hi }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.as_ref().map_or(f64::INFINITY, |h| h.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.hi {
            Some(hi) => write!(f, "({}, {})", self.lo, hi),
            None => write!(f, "({}, inf)", self.lo),
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo_f64(), self.hi_f64()].serialize(s)
    }
}

/// `r -> (a r + b) / (c r + e)` with `a e - b c != 0`, stored in a canonical
/// scaling (`e = 1`, or `c = 1` when `e = 0`) so that equal maps compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MobiusFunction {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    e: BigRational,
}

impl MobiusFunction {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, e: BigRational) -> Result<Self> {
        let det = &a * &e - &b * &c;
        if det.is_zero() {
            return Err(Error::InvalidInput(format!(
                "degenerate Möbius coefficients ({a}, {b}, {c}, {e})"
            )));
        }
        let s = if !e.is_zero() { e.clone() } else { c.clone() };
        Ok(Self {
            a: a / &s,
            b: b / &s,
            c: c / &s,
            e: e / &s,
        })
    }

    pub fn identity() -> Self {
        Self::new(int(1), int(0), int(0), int(1)).expect("identity is nondegenerate")
    }

    pub fn coefficients(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.e]
    }

    pub fn determinant(&self) -> BigRational {
        &self.a * &self.e - &self.b * &self.c
    }

    /// `self ∘ inner`, i.e. `r -> self(inner(r))`.
    pub fn compose(&self, inner: &MobiusFunction) -> MobiusFunction {
        let (a, b, c, e) = (&self.a, &self.b, &self.c, &self.e);
        let (p, q, s, t) = (&inner.a, &inner.b, &inner.c, &inner.e);
        MobiusFunction::new(a * p + b * s, a * q + b * t, c * p + e * s, c * q + e * t)
            .expect("product of nondegenerate maps is nondegenerate")
    }

    /// Exact value; `None` at the pole.
    pub fn eval(&self, r: &BigRational) -> Option<BigRational> {
        let den = &self.c * r + &self.e;
        if den.is_zero() {
            None
        } else {
            Some((&self.a * r + &self.b) / den)
        }
    }

    pub fn eval_f64(&self, r: f64) -> f64 {
        match rational(r).ok().and_then(|q| self.eval(&q)) {
            Some(v) => v.to_f64().unwrap_or(f64::NAN),
            None => f64::INFINITY,
        }
    }

    /// Location of the pole, if any.
    pub fn pole(&self) -> Option<BigRational> {
        (!self.c.is_zero()).then(|| -&self.e / &self.c)
    }

    /// Non-decreasing on every part of `interval` that maps back into it.
    ///
    /// Each branch of a Möbius map is increasing iff the determinant is
    /// positive. A pole inside the interval is harmless when the branch to its
    /// right stays at or below `interval.lo`, since those arguments never
    /// satisfy `r, h(r) ∈ interval`.
    pub fn is_nondecreasing_on(&self, interval: &Interval) -> bool {
        if !self.determinant().is_positive() {
            return false;
        }
        let Some(pole) = self.pole() else {
            return true;
        };
        if !interval.contains(&pole) {
            return true;
        }
        // supremum of the right branch over (pole, hi)
        let sup = match &interval.hi {
            Some(hi) => self.eval(hi),
            None => Some(&self.a / &self.c),
        };
        matches!(sup, Some(v) if v <= interval.lo)
    }
}

impl fmt::Display for MobiusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} r + {}) / ({} r + {})", self.a, self.b, self.c, self.e)
    }
}

impl Serialize for MobiusFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The scale maps relating the offset filtrations, with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HKind {
    /// `r + ε`
    H1 { epsilon: f64 },
    /// `r / (1 - r)`
    H2,
    /// `r / (1 - δ)`
    H3 { delta: f64 },
    /// `(r + ε) / ((1 - r - ε)(1 - δ))`
    H4 { epsilon: f64, delta: f64 },
    /// `r / (1 - δ - r) + ε`
    H5 { epsilon: f64, delta: f64 },
    /// `(1 + α) r`
    H6 { alpha: f64 },
    /// `r / (1 - α)`
    H7 { alpha: f64 },
    /// `(r + α r + ε) / ((1 - r - r α - ε)(1 - δ))`
    H8 { epsilon: f64, delta: f64, alpha: f64 },
    /// `r / ((1 - α)(1 - δ - r)) + ε / (1 - α)`
    H9 { epsilon: f64, delta: f64, alpha: f64 },
}

impl HKind {
    pub fn name(&self) -> &'static str {
        match self {
            HKind::H1 { .. } => "h1",
            HKind::H2 => "h2",
            HKind::H3 { .. } => "h3",
            HKind::H4 { .. } => "h4",
            HKind::H5 { .. } => "h5",
            HKind::H6 { .. } => "h6",
            HKind::H7 { .. } => "h7",
            HKind::H8 { .. } => "h8",
            HKind::H9 { .. } => "h9",
        }
    }

    /// Interval on which the corresponding interleaving is stated.
    pub fn interval(&self) -> Interval {
        match self {
            HKind::H2 => Interval::bounded((0, 1), (1, 2)),
            HKind::H4 { .. } | HKind::H5 { .. } | HKind::H8 { .. } | HKind::H9 { .. } => {
                Interval::bounded((0, 1), (1, 1))
            }
            _ => Interval::positive(),
        }
    }
}

fn param(name: &'static str, value: f64) -> Result<BigRational> {
    if !(0.0..1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange {
            name,
            value,
            range: "[0, 1)",
        });
    }
    rational(value)
}

fn mobius(a: BigRational, b: BigRational, c: BigRational, e: BigRational) -> MobiusFunction {
    MobiusFunction::new(a, b, c, e).expect("elementary maps are nondegenerate for parameters in [0, 1)")
}

fn h1(eps: &BigRational) -> MobiusFunction {
    mobius(int(1), eps.clone(), int(0), int(1))
}

fn h2() -> MobiusFunction {
    mobius(int(1), int(0), int(-1), int(1))
}

fn h3(delta: &BigRational) -> MobiusFunction {
    mobius(int(1), int(0), int(0), BigRational::one() - delta)
}

fn h6(alpha: &BigRational) -> MobiusFunction {
    mobius(BigRational::one() + alpha, int(0), int(0), int(1))
}

fn h7(alpha: &BigRational) -> MobiusFunction {
    mobius(int(1), int(0), int(0), BigRational::one() - alpha)
}

/// Builds the map. `h4`, `h5`, `h8` and `h9` are composed from the elementary
/// maps and then checked against their closed forms.
pub fn make_h(kind: HKind) -> Result<MobiusFunction> {
    Ok(match kind {
        HKind::H1 { epsilon } => h1(&param("epsilon", epsilon)?),
        HKind::H2 => h2(),
        HKind::H3 { delta } => h3(&param("delta", delta)?),
        HKind::H6 { alpha } => h6(&param("alpha", alpha)?),
        HKind::H7 { alpha } => h7(&param("alpha", alpha)?),
        HKind::H4 { epsilon, delta } => {
            let (e, d) = (param("epsilon", epsilon)?, param("delta", delta)?);
            let h = h3(&d).compose(&h2()).compose(&h1(&e));
            check(h, closed_form(kind)?, "h4 = h3 ∘ h2 ∘ h1")?
        }
        HKind::H5 { epsilon, delta } => {
            let (e, d) = (param("epsilon", epsilon)?, param("delta", delta)?);
            let h = h1(&e).compose(&h2()).compose(&h3(&d));
            check(h, closed_form(kind)?, "h5 = h1 ∘ h2 ∘ h3")?
        }
        HKind::H8 { epsilon, delta, alpha } => {
            let h = make_h(HKind::H4 { epsilon, delta })?.compose(&h6(&param("alpha", alpha)?));
            check(h, closed_form(kind)?, "h8 = h4 ∘ h6")?
        }
        HKind::H9 { epsilon, delta, alpha } => {
            let h = h7(&param("alpha", alpha)?).compose(&make_h(HKind::H5 { epsilon, delta })?);
            check(h, closed_form(kind)?, "h9 = h7 ∘ h5")?
        }
    })
}

fn check(built: MobiusFunction, expected: MobiusFunction, what: &'static str) -> Result<MobiusFunction> {
    if built == expected {
        Ok(built)
    } else {
        Err(Error::ClosedFormMismatch(what))
    }
}

/// The printed formula of each map, written out directly as coefficients.
pub fn closed_form(kind: HKind) -> Result<MobiusFunction> {
    let one = BigRational::one;
    Ok(match kind {
        HKind::H1 { .. } | HKind::H2 | HKind::H3 { .. } | HKind::H6 { .. } | HKind::H7 { .. } => {
            return make_h(kind)
        }
        HKind::H4 { epsilon, delta } => {
            let (e, d) = (param("epsilon", epsilon)?, param("delta", delta)?);
            // (r + ε) / ((1-δ)(1-ε) - (1-δ) r)
            mobius(one(), e.clone(), -(one() - &d), (one() - &d) * (one() - &e))
        }
        HKind::H5 { epsilon, delta } => {
            let (e, d) = (param("epsilon", epsilon)?, param("delta", delta)?);
            // ((1-ε) r + ε(1-δ)) / (-r + 1 - δ)
            mobius(one() - &e, &e * (one() - &d), int(-1), one() - &d)
        }
        HKind::H8 { epsilon, delta, alpha } => {
            let (e, d, a) = (param("epsilon", epsilon)?, param("delta", delta)?, param("alpha", alpha)?);
            // ((1+α) r + ε) / ((1-δ)(1-ε) - (1-δ)(1+α) r)
            mobius(
                one() + &a,
                e.clone(),
                -(one() - &d) * (one() + &a),
                (one() - &d) * (one() - &e),
            )
        }
        HKind::H9 { epsilon, delta, alpha } => {
            let (e, d, a) = (param("epsilon", epsilon)?, param("delta", delta)?, param("alpha", alpha)?);
            // ((1-ε) r + ε(1-δ)) / ((1-α)(1-δ) - (1-α) r)
            mobius(
                one() - &e,
                &e * (one() - &d),
                -(one() - &a),
                (one() - &a) * (one() - &d),
            )
        }
    })
}
