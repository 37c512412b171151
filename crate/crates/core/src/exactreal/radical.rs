//! Exact normal form for Q-linear combinations of square roots of positive
//! integers. Radicands are kept pairwise non-equivalent (no two have a
//! product that is a perfect square), so by linear independence of such
//! square roots over Q the form is zero iff every coefficient is zero and
//! rational iff only the radicand `1` remains.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::{ConstExpr, Node};
use super::isqrt::isqrt;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadicalForm {
    terms: BTreeMap<BigInt, BigRational>,
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = isqrt(n);
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl RadicalForm {
    pub fn zero() -> Self {
        RadicalForm::default()
    }

    pub fn rational(q: BigRational) -> Self {
        let mut f = RadicalForm::zero();
        f.insert(BigInt::one(), q);
        f
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `√q` for a nonnegative rational `q`.
    pub fn sqrt_of_rational(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        let mut f = RadicalForm::zero();
        if q.is_zero() {
            return Some(f);
        }
        // √(p/d) = √(p·d)/d
        let d = q.denom().clone();
        f.insert(q.numer() * &d, BigRational::new(BigInt::one(), d));
        Some(f)
    }

    /// `c·√r` as a form.
    pub fn term(c: BigRational, r: BigInt) -> Self {
        let mut f = RadicalForm::zero();
        f.insert(r, c);
        f
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    /// `(c, r)` when the form is the single term `c·√r`.
    pub fn single_term(&self) -> Option<(BigRational, BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(r, c)| (c.clone(), r.clone()))
        } else {
            None
        }
    }

    /// Coefficient of the radicand class of `√r` (after reduction), zero if absent.
    pub fn coefficient(&self, r: &BigInt) -> BigRational {
        self.terms.get(r).cloned().unwrap_or_else(BigRational::zero)
    }

    fn insert(&mut self, r: BigInt, c: BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert!(r.is_positive());
        let mut r = r;
        let mut c = c;
        for p in SMALL_PRIMES {
            let p2 = BigInt::from(p * p);
            while r.is_multiple_of(&p2) {
                r /= &p2;
                c *= BigRational::from_integer(p.into());
            }
        }
        if let Some(k) = exact_sqrt(&r) {
            r = BigInt::one();
            c *= BigRational::from_integer(k);
        }
        if !r.is_one() && !self.terms.contains_key(&r) {
            let mut merged = None;
            for s in self.terms.keys() {
                if s.is_one() {
                    continue;
                }
                if let Some(t) = exact_sqrt(&(&r * s)) {
                    // √r = (t/s)·√s
                    merged = Some((s.clone(), BigRational::new(t, s.clone())));
                    break;
                }
            }
            if let Some((s, factor)) = merged {
                r = s;
                c *= factor;
            }
        }
        let entry = self.terms.entry(r.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&r);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.insert(r.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        RadicalForm {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return RadicalForm::zero();
        }
        RadicalForm {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), c * q)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = RadicalForm::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                let g = r1.gcd(r2);
                let r = (r1 / &g) * (r2 / &g);
                out.insert(r, c1 * c2 * BigRational::from_integer(g));
            }
        }
        out
    }

    /// Division by a single-term or rational form; `None` otherwise.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let (c, s) = other.single_term()?;
        if c.is_zero() {
            return None;
        }
        // x / (c√s) = x·√s / (c·s)
        let inv = RadicalForm::term(BigRational::one() / (&c * BigRational::from_integer(s.clone())), s);
        Some(self.mul(&inv))
    }

    /// Normal form of an expression, when it lies in the supported fragment
    /// (square roots of rationals, no division by multi-term forms).
    pub fn from_expr(e: &ConstExpr) -> Option<Self> {
        Some(match e.node() {
            Node::Int(n) => RadicalForm::integer(n.clone()),
            Node::Rat(q) => RadicalForm::rational(q.clone()),
            Node::Sqrt(a) => {
                let inner = Self::from_expr(a)?.as_rational()?;
                Self::sqrt_of_rational(&inner)?
            }
            Node::Neg(a) => Self::from_expr(a)?.neg(),
            Node::Add(a, b) => Self::from_expr(a)?.add(&Self::from_expr(b)?),
            Node::Sub(a, b) => Self::from_expr(a)?.sub(&Self::from_expr(b)?),
            Node::Mul(a, b) => Self::from_expr(a)?.mul(&Self::from_expr(b)?),
            Node::Div(a, b) => Self::from_expr(a)?.div(&Self::from_expr(b)?)?,
        })
    }

    pub fn to_expr(&self) -> ConstExpr {
        let mut acc: Option<ConstExpr> = None;
        for (r, c) in &self.terms {
            let term = if r.is_one() {
                ConstExpr::rational(c.clone())
            } else if c.is_one() {
                ConstExpr::sqrt_int(r.clone())
            } else {
                ConstExpr::rational(c.clone()) * ConstExpr::sqrt_int(r.clone())
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(ConstExpr::zero)
    }
}
