//! Exact constants and rigorous dyadic-interval arithmetic.
//!
//! Every floor, rounding, and torus-norm comparison elsewhere in the crate is
//! decided here: values are enclosed in intervals whose precision doubles until
//! the question is settled, and values that are exactly rational are detected
//! through [`RadicalForm`] so that coincidences (an exact integer, a norm equal
//! to a threshold) are decided rather than refined forever.

mod dyadic;
mod eval;
mod expr;
pub mod fixed;
mod isqrt;
mod parse;
mod radical;
pub mod relation;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

pub use dyadic::{Dyadic, DyadicInterval, Round};
pub use eval::eval_interval;
pub use expr::{ConstExpr, Node};
pub use isqrt::{is_perfect_square, isqrt};
pub use parse::parse_const;
pub use radical::RadicalForm;

use eval::{eval_at, half, EvalFail};

/// Precision cap (bits) used when callers have no reason to pick another.
pub const DEFAULT_CAP_BITS: u32 = 4096;

const START_BITS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("square root of a negative value")]
    Domain,
    #[error("division by zero")]
    DivideByZero,
    #[error("precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u64 },
}

/// Outcome of a certified comparison against a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Below,
    Above,
    /// Only reported when both sides are exactly known and coincide.
    Equal,
    Unknown,
}

impl Comparison {
    pub fn is_below(self) -> bool {
        self == Comparison::Below
    }

    pub fn is_above(self) -> bool {
        self == Comparison::Above
    }

    /// `value ≥ threshold` certified.
    pub fn is_at_least(self) -> bool {
        matches!(self, Comparison::Above | Comparison::Equal)
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Below,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Above,
        }
    }
}

/// Something that can be enclosed at a requested working precision.
pub trait Enclose {
    fn enclose(&self, bits: u64) -> Result<Option<DyadicInterval>, ExactError>;
    /// Exact value when it is a rational number.
    fn exact_rational(&self) -> Option<BigRational>;
}

fn run(e: &ConstExpr, bits: u64) -> Result<Option<DyadicInterval>, ExactError> {
    match eval_at(e, bits) {
        Ok(iv) => Ok(Some(iv)),
        Err(EvalFail::Straddle) => Ok(None),
        Err(EvalFail::Hard(err)) => Err(err),
    }
}

impl Enclose for ConstExpr {
    fn enclose(&self, bits: u64) -> Result<Option<DyadicInterval>, ExactError> {
        run(self, bits)
    }

    fn exact_rational(&self) -> Option<BigRational> {
        RadicalForm::from_expr(self)?.as_rational()
    }
}

/// The torus norm `‖x‖` of an expression, as an [`Enclose`] source.
pub struct TorusNormOf<'a>(pub &'a ConstExpr);

impl Enclose for TorusNormOf<'_> {
    fn enclose(&self, bits: u64) -> Result<Option<DyadicInterval>, ExactError> {
        Ok(run(self.0, bits)?.map(|iv| torus_map(&iv)))
    }

    fn exact_rational(&self) -> Option<BigRational> {
        let q = self.0.exact_rational()?;
        Some(rational_torus_norm(&q))
    }
}

pub fn rational_torus_norm(q: &BigRational) -> BigRational {
    let frac = q - q.floor();
    let other = BigRational::one() - &frac;
    if frac < other {
        frac
    } else {
        other
    }
}

/// Decides `value < t` / `value > t`, doubling precision up to `cap_bits`.
pub fn compare_threshold<E: Enclose + ?Sized>(x: &E, t: &BigRational, cap_bits: u32) -> Result<Comparison, ExactError> {
    let mut bits = START_BITS.min(cap_bits as u64).max(8);
    let mut tried_exact = false;
    loop {
        if let Some(iv) = x.enclose(bits)? {
            if iv.hi().cmp_rational(t) == Ordering::Less {
                return Ok(Comparison::Below);
            }
            if iv.lo().cmp_rational(t) == Ordering::Greater {
                return Ok(Comparison::Above);
            }
        }
        if !tried_exact {
            tried_exact = true;
            if let Some(q) = x.exact_rational() {
                return Ok(Comparison::from_ordering(q.cmp(t)));
            }
        }
        bits *= 2;
        if bits > cap_bits as u64 {
            return Ok(Comparison::Unknown);
        }
    }
}

/// Compares two expressions: `Below` means `a < b`.
pub fn compare_exprs(a: &ConstExpr, b: &ConstExpr, cap_bits: u32) -> Result<Comparison, ExactError> {
    let diff = a - b;
    if let Some(f) = RadicalForm::from_expr(&diff) {
        if f.is_zero() {
            return Ok(Comparison::Equal);
        }
    }
    compare_threshold(&diff, &BigRational::zero(), cap_bits)
}

/// `⌊value⌋`, refining until the enclosure pins down a single floor.
pub fn floor_exact(e: &ConstExpr, cap_bits: u32) -> Result<BigInt, ExactError> {
    let mut bits = START_BITS.min(cap_bits as u64).max(8);
    let mut tried_exact = false;
    loop {
        if let Some(iv) = run(e, bits)? {
            let fl = iv.lo().floor();
            if iv.hi().floor() == fl {
                return Ok(fl);
            }
        }
        if !tried_exact {
            tried_exact = true;
            if let Some(q) = e.exact_rational() {
                return Ok(q.floor().to_integer());
            }
        }
        bits *= 2;
        if bits > cap_bits as u64 {
            return Err(ExactError::PrecisionExhausted { bits: bits / 2 });
        }
    }
}

/// Closest integer, ties resolved upward: `⌊value + 1/2⌋`.
pub fn nearest_exact(e: &ConstExpr, cap_bits: u32) -> Result<BigInt, ExactError> {
    floor_exact(&(e + ConstExpr::rational(half())), cap_bits)
}

/// Enclosure of `‖x‖`, always within `[0, 1/2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusNorm(DyadicInterval);

impl TorusNorm {
    pub fn interval(&self) -> &DyadicInterval {
        &self.0
    }
}

/// Maps an enclosure of `x` to an enclosure of `‖x‖`. Intervals that cross a
/// half-integer are widened up to `1/2`, never split or misplaced.
pub fn torus_map(iv: &DyadicInterval) -> DyadicInterval {
    let k = iv.lo().floor();
    let shifted = iv.shift_int(&-k);
    let a = shifted.lo().clone();
    let b = shifted.hi().clone();
    let one = Dyadic::from_int(1);
    let half = Dyadic::new(BigInt::one(), -1);
    let zero = Dyadic::zero();
    if b.sub(&a) >= one {
        return DyadicInterval::new(zero, half);
    }
    if b <= half {
        DyadicInterval::new(a, b)
    } else if b <= one {
        if a >= half {
            DyadicInterval::new(one.sub(&b), one.sub(&a))
        } else {
            let lo = if a < one.sub(&b) { a } else { one.sub(&b) };
            DyadicInterval::new(lo, half)
        }
    } else {
        let three_halves = Dyadic::new(BigInt::from(3), -1);
        if a >= half && b <= three_halves {
            let l = one.sub(&a);
            let r = b.sub(&one);
            DyadicInterval::new(zero, if l > r { l } else { r })
        } else {
            DyadicInterval::new(zero, half)
        }
    }
}

/// Enclosure of the distance from `e` to the nearest integer.
pub fn torus_norm(e: &ConstExpr, precision_bits: u32) -> Result<TorusNorm, ExactError> {
    Ok(TorusNorm(torus_map(&eval_interval(e, precision_bits)?)))
}

/// Exact symbolic representative of `‖e‖`: `e − ⌊e⌋` or `⌈e⌉ − e`.
pub fn torus_norm_expr(e: &ConstExpr, cap_bits: u32) -> Result<ConstExpr, ExactError> {
    let k = floor_exact(e, cap_bits)?;
    let frac = e - ConstExpr::int(k.clone());
    match compare_threshold(&frac, &half(), cap_bits)? {
        Comparison::Below => Ok(frac),
        Comparison::Equal => Ok(ConstExpr::rational(half())),
        Comparison::Above => Ok(ConstExpr::int(k + 1u32) - e),
        Comparison::Unknown => Err(ExactError::PrecisionExhausted { bits: cap_bits as u64 }),
    }
}

/// Certified `‖e‖ < t`, with exact handling of rational `e`.
pub fn torus_norm_below(e: &ConstExpr, t: &BigRational, cap_bits: u32) -> Result<Comparison, ExactError> {
    compare_threshold(&TorusNormOf(e), t, cap_bits)
}
