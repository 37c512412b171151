//! Test functions `Σ c·t^γ` with half-integer exponents and their integer
//! iterates `u(n) = ⌊f(n)⌋` or `⌊f(n) + 1/2⌋`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactreal::{
    eval_interval, floor_exact, isqrt, Comparison, ConstExpr, Dyadic, DyadicInterval, ExactError, RadicalForm,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HardyError {
    #[error("exponent {0} is not a nonnegative half-integer")]
    UnsupportedExponent(BigRational),
    #[error("exponent {0} appears twice")]
    DuplicateExponent(BigRational),
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardyCombo {
    terms: Vec<(ConstExpr, BigRational)>,
}

fn half_integer_parts(e: &BigRational) -> Option<(u32, bool)> {
    if e.is_negative() {
        return None;
    }
    let twice = e * BigRational::from_integer(2.into());
    if !twice.is_integer() {
        return None;
    }
    let k = twice.to_integer().to_u32()?;
    Some((k / 2, k % 2 == 1))
}

impl HardyCombo {
    pub fn new(terms: Vec<(ConstExpr, BigRational)>) -> Result<Self, HardyError> {
        let mut seen: Vec<&BigRational> = Vec::new();
        for (_, e) in &terms {
            if half_integer_parts(e).is_none() {
                return Err(HardyError::UnsupportedExponent(e.clone()));
            }
            if seen.contains(&e) {
                return Err(HardyError::DuplicateExponent(e.clone()));
            }
            seen.push(e);
        }
        Ok(HardyCombo { terms })
    }

    pub fn terms(&self) -> &[(ConstExpr, BigRational)] {
        &self.terms
    }

    /// `t^{3/2}`.
    pub fn three_halves() -> Self {
        HardyCombo {
            terms: vec![(ConstExpr::one(), exp(3, 2))],
        }
    }

    /// `λt^{3/2} + t`.
    pub fn lambda_plus_linear(lambda: &ConstExpr) -> Self {
        HardyCombo {
            terms: vec![(lambda.clone(), exp(3, 2)), (ConstExpr::one(), exp(1, 1))],
        }
    }

    /// `λt^{3/2} + L(t + ξ)`.
    pub fn lambda_plus_affine(lambda: &ConstExpr, l: &ConstExpr, xi: &ConstExpr) -> Self {
        HardyCombo {
            terms: vec![(lambda.clone(), exp(3, 2)), (l.clone(), exp(1, 1)), (l * xi, exp(0, 1))],
        }
    }

    /// `t²`.
    pub fn square() -> Self {
        HardyCombo {
            terms: vec![(ConstExpr::one(), exp(2, 1))],
        }
    }

    /// Exact symbolic value at `n`; `c·t^{k+1/2}` becomes `c·√(n^{2k+1})`,
    /// with a single-radical coefficient `q√s` folded in as `q·√(s·n^{2k+1})`.
    pub fn evaluate(&self, n: u64) -> ConstExpr {
        let n = BigInt::from(n);
        let mut acc: Option<ConstExpr> = None;
        for (c, e) in &self.terms {
            let (k, half) = half_integer_parts(e).expect("validated exponent");
            let term = if half {
                let rad = n.pow(2 * k + 1);
                match RadicalForm::from_expr(c).and_then(|f| f.single_term()) {
                    Some((q, s)) => {
                        let root = ConstExpr::sqrt_int(s * rad);
                        if q.is_one() {
                            root
                        } else {
                            ConstExpr::rational(q) * root
                        }
                    }
                    None => c * ConstExpr::sqrt_int(rad),
                }
            } else {
                let p = n.pow(k);
                if p.is_one() {
                    c.clone()
                } else if c.as_literal().is_some_and(|q| q.is_one()) {
                    ConstExpr::int(p)
                } else {
                    c * ConstExpr::int(p)
                }
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(ConstExpr::zero)
    }
}

fn exp(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl fmt::Display for HardyCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, e)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*t^({e})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Floor,
    /// `⌊x + 1/2⌋`.
    Nearest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateSeq {
    pub function: HardyCombo,
    pub mode: Rounding,
}

impl IterateSeq {
    pub fn new(function: HardyCombo, mode: Rounding) -> Self {
        IterateSeq { function, mode }
    }

    pub fn iterate(&self, n: u64, cap_bits: u32) -> Result<BigInt, ExactError> {
        let mut value = self.function.evaluate(n);
        if self.mode == Rounding::Nearest {
            value = value + ConstExpr::rational(BigRational::new(1.into(), 2.into()));
        }
        if let Some(fl) = RadicalForm::from_expr(&value).and_then(|f| floor_one_radical(&f)) {
            return Ok(fl);
        }
        floor_exact(&value, cap_bits)
    }
}

/// Exact floor of `r + q√s` through one integer square root.
fn floor_one_radical(f: &RadicalForm) -> Option<BigInt> {
    let mut rational = BigRational::zero();
    let mut radical: Option<(BigRational, BigInt)> = None;
    for (s, c) in f.terms() {
        if s.is_one() {
            rational = c.clone();
        } else if radical.is_some() {
            return None;
        } else {
            radical = Some((c.clone(), s.clone()));
        }
    }
    let Some((q, s)) = radical else {
        return Some(rational.floor().to_integer());
    };
    // r + q√s = (±√(d²a²s) + b·c)/(b·d) with q = a/b, r = c/d
    let (a, b) = (q.numer().clone(), q.denom().clone());
    let (c, d) = (rational.numer().clone(), rational.denom().clone());
    let m = &d * &d * &a * &a * s;
    let root = isqrt(&m);
    let exact = &root * &root == m;
    let floor_root = if a.is_positive() {
        root
    } else if exact {
        -root
    } else {
        -root - 1
    };
    Some((floor_root + &b * c).div_floor(&(b * d)))
}

/// Polynomial with constant-expression coefficients; `coeffs[i]` multiplies `t^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<ConstExpr>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ConstExpr>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(is_literal_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// `t`.
    pub fn identity() -> Self {
        Polynomial::new(vec![ConstExpr::zero(), ConstExpr::one()])
    }

    /// `L(t + ξ)`.
    pub fn affine(l: &ConstExpr, xi: &ConstExpr) -> Self {
        Polynomial::new(vec![l * xi, l.clone()])
    }

    pub fn coeffs(&self) -> &[ConstExpr] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> ConstExpr {
        self.coeffs.last().cloned().unwrap_or_else(ConstExpr::zero)
    }

    pub fn eval(&self, x: &BigInt) -> ConstExpr {
        let mut acc: Option<ConstExpr> = None;
        let mut pow = BigInt::one();
        for c in &self.coeffs {
            if !is_literal_zero(c) {
                let term = if pow.is_one() {
                    c.clone()
                } else {
                    c * ConstExpr::int(pow.clone())
                };
                acc = Some(match acc {
                    None => term,
                    Some(a) => a + term,
                });
            }
            pow *= x;
        }
        acc.unwrap_or_else(ConstExpr::zero)
    }

    /// Exact value when every coefficient is rational.
    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            let c = RadicalForm::from_expr(c)?.as_rational()?;
            acc = acc * x + c;
        }
        Some(acc)
    }
}

fn is_literal_zero(c: &ConstExpr) -> bool {
    c.as_literal().is_some_and(|q| q.is_zero())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if is_literal_zero(c) && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Rigorous enclosure of `max_n |Σθ_i u_i(n) − P(n)|` over a finite range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationReport {
    pub max: DyadicInterval,
    pub argmax: u64,
    pub range: (u64, u64),
}

impl DeviationReport {
    /// Certified `max < bound`; `Equal` is never returned.
    pub fn below(&self, bound: &ConstExpr) -> Result<Comparison, ExactError> {
        let b = eval_interval(bound, 96)?;
        Ok(if self.max.hi() < b.lo() {
            Comparison::Below
        } else if self.max.lo() > b.hi() {
            Comparison::Above
        } else {
            Comparison::Unknown
        })
    }
}

const DEVIATION_BITS: u32 = 64;

fn deviation_at(
    seqs: &[IterateSeq],
    thetas: &[ConstExpr],
    p: &Polynomial,
    n: u64,
    cap_bits: u32,
) -> Result<DyadicInterval, ExactError> {
    let mut e = ConstExpr::zero() - p.eval(&BigInt::from(n));
    for (s, th) in seqs.iter().zip(thetas) {
        e = e + th * ConstExpr::int(s.iterate(n, cap_bits)?);
    }
    Ok(eval_interval(&e, DEVIATION_BITS)?.abs())
}

pub fn combo_deviation(
    seqs: &[IterateSeq],
    thetas: &[ConstExpr],
    p: &Polynomial,
    range: (u64, u64),
    cap_bits: u32,
) -> Result<DeviationReport, HardyError> {
    if seqs.len() != thetas.len() {
        return Err(HardyError::LengthMismatch {
            what: "theta list",
            expected: seqs.len(),
            got: thetas.len(),
        });
    }
    let (a, b) = range;
    let per_n: Vec<(u64, DyadicInterval)> = (a.max(1)..=b)
        .into_par_iter()
        .map(|n| deviation_at(seqs, thetas, p, n, cap_bits).map(|iv| (n, iv)))
        .collect::<Result<_, _>>()?;
    let mut max_lo = Dyadic::zero();
    let mut best: Option<(u64, DyadicInterval)> = None;
    for (n, iv) in per_n {
        if *iv.lo() > max_lo {
            max_lo = iv.lo().clone();
        }
        if best.as_ref().is_none_or(|(_, b)| iv.hi() > b.hi()) {
            best = Some((n, iv));
        }
    }
    let Some((argmax, top)) = best else {
        return Ok(DeviationReport {
            max: DyadicInterval::point(Dyadic::zero()),
            argmax: 0,
            range,
        });
    };
    Ok(DeviationReport {
        max: DyadicInterval::new(max_lo, top.hi().clone()),
        argmax,
        range,
    })
}
