use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::dyadic::{Dyadic, DyadicInterval};
use super::expr::{ConstExpr, Node};
use super::radical::RadicalForm;
use super::ExactError;

pub(crate) enum EvalFail {
    /// A divisor enclosure still contains zero; retry at higher precision.
    Straddle,
    Hard(ExactError),
}

impl From<ExactError> for EvalFail {
    fn from(e: ExactError) -> Self {
        EvalFail::Hard(e)
    }
}

/// One bottom-up pass at a fixed working precision.
pub(crate) fn eval_at(e: &ConstExpr, bits: u64) -> Result<DyadicInterval, EvalFail> {
    Ok(match e.node() {
        Node::Int(n) => DyadicInterval::point(Dyadic::from_int(n.clone())),
        Node::Rat(q) => DyadicInterval::from_rational(q, bits),
        Node::Sqrt(a) => {
            let inner = eval_at(a, bits)?;
            inner.sqrt(bits).ok_or(EvalFail::Hard(ExactError::Domain))?
        }
        Node::Neg(a) => eval_at(a, bits)?.neg(),
        Node::Add(a, b) => eval_at(a, bits)?.add(&eval_at(b, bits)?, bits),
        Node::Sub(a, b) => eval_at(a, bits)?.sub(&eval_at(b, bits)?, bits),
        Node::Mul(a, b) => eval_at(a, bits)?.mul(&eval_at(b, bits)?, bits),
        Node::Div(a, b) => {
            let den = eval_at(b, bits)?;
            if den.is_point() && den.lo().is_zero() {
                return Err(EvalFail::Hard(ExactError::DivideByZero));
            }
            let num = eval_at(a, bits)?;
            match num.div(&den, bits) {
                Ok(q) => q,
                Err(_) => {
                    if RadicalForm::from_expr(b).is_some_and(|f| f.is_zero()) {
                        return Err(EvalFail::Hard(ExactError::DivideByZero));
                    }
                    return Err(EvalFail::Straddle);
                }
            }
        }
    })
}

/// Working precision at which refinement gives up for `eval_interval`.
const EVAL_BITS_CAP: u64 = 1 << 16;

fn width_ok(iv: &DyadicInterval, precision_bits: u32) -> bool {
    // width ≤ 2^(1-p)·max(1, |value|), using the smallest |value| in the enclosure
    let scaled = iv.width().mul_pow2(precision_bits as i64 - 1);
    let one = Dyadic::from_int(1);
    let mig = iv.mig();
    let bound = if mig > one { mig } else { one };
    scaled <= bound
}

/// Rigorous enclosure of `e` with width at most `2^(1-p)·max(1,|value|)`.
pub fn eval_interval(e: &ConstExpr, precision_bits: u32) -> Result<DyadicInterval, ExactError> {
    let p = precision_bits.max(1);
    let mut bits = p as u64 + 16 + 2 * e.depth() as u64;
    loop {
        match eval_at(e, bits) {
            Ok(iv) if width_ok(&iv, p) => return Ok(iv),
            Ok(_) | Err(EvalFail::Straddle) => {}
            Err(EvalFail::Hard(err)) => return Err(err),
        }
        bits *= 2;
        if bits > EVAL_BITS_CAP.max(8 * p as u64) {
            return Err(ExactError::PrecisionExhausted { bits: bits / 2 });
        }
    }
}

pub(crate) fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}
