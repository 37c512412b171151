//! Dyadic rationals `m·2^e` with arbitrary-size mantissas, and closed
//! intervals over them with outward (directed) rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// `mant · 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn shr_floor(m: &BigInt, s: u64) -> BigInt {
    if m.is_negative() {
        let t: BigInt = (-m - 1u32) >> s;
        -t - 1u32
    } else {
        m >> s
    }
}

fn shr_round(m: &BigInt, s: u64, dir: Round) -> BigInt {
    match dir {
        Round::Down => shr_floor(m, s),
        Round::Up => -shr_floor(&-m, s),
    }
}

fn div_round(a: &BigInt, b: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => a.div_floor(b),
        Round::Up => -((-a).div_floor(b)),
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Exact conversion when the denominator of `q` is a power of two.
    pub fn from_rational_exact(q: &BigRational) -> Option<Self> {
        let den = q.denom();
        if den.is_zero() || (den & (den - BigInt::one())) != BigInt::zero() {
            return None;
        }
        let k = den.bits() - 1;
        Some(Dyadic::new(q.numer().clone(), -(k as i64)))
    }

    /// Rounds `q` to a dyadic with at least `bits` significant bits.
    pub fn from_rational(q: &BigRational, bits: u64, dir: Round) -> Self {
        if let Some(d) = Self::from_rational_exact(q) {
            return d;
        }
        let num = q.numer();
        let den = q.denom();
        let k = (bits as i64 + den.bits() as i64 - num.bits() as i64 + 2).max(0);
        let scaled = num << (k as u64);
        Dyadic::new(div_round(&scaled, den, dir), -k).round(bits, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            let s = bits - 60;
            (shr_floor(&self.mant, s), self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m: f64 = num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN);
        m * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Keeps at most `bits` significant bits, rounding in direction `dir`.
    pub fn round(self, bits: u64, dir: Round) -> Self {
        let b = self.mant.bits();
        if b <= bits {
            return self;
        }
        let s = b - bits;
        Dyadic::new(shr_round(&self.mant, s, dir), self.exp + s as i64)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exp.min(b.exp);
        let am = &a.mant << ((a.exp - e) as u64);
        let bm = &b.mant << ((b.exp - e) as u64);
        (am, bm, e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Self::aligned(self, other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.mant, self.exp)
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.mant.abs(), self.exp)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.exp + k)
    }

    /// `self / other` rounded to `bits` significant bits. `other` must be nonzero.
    pub fn div(&self, other: &Dyadic, bits: u64, dir: Round) -> Dyadic {
        debug_assert!(!other.is_zero());
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = (bits as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2).max(0);
        let num = &self.mant << (k as u64);
        let q = div_round(&num, &other.mant, dir);
        Dyadic::new(q, self.exp - k - other.exp).round(bits, dir)
    }

    /// Square root of a nonnegative dyadic, rounded in direction `dir`.
    pub fn sqrt(&self, bits: u64, dir: Round) -> Dyadic {
        debug_assert!(!self.is_negative());
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut k = (2 * bits as i64 + 2 - self.mant.bits() as i64).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let n = &self.mant << (k as u64);
        let mut r = n.sqrt();
        if dir == Round::Up && &r * &r != n {
            r += 1u32;
        }
        Dyadic::new(r, (self.exp - k) / 2).round(bits, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn is_integer(&self) -> bool {
        self.floor() == self.ceil()
    }

    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        // self = m·2^e  vs  p/d
        let p = q.numer();
        let d = q.denom();
        if self.exp >= 0 {
            ((&self.mant << (self.exp as u64)) * d).cmp(p)
        } else {
            (&self.mant * d).cmp(&(p << ((-self.exp) as u64)))
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Self::aligned(self, other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    /// Prints the exact value in the constant-expression grammar (`p/q` with `q = 2^k`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.to_rational();
        if q.denom().is_one() {
            write!(f, "{}", q.numer())
        } else {
            write!(f, "{}/{}", q.numer(), q.denom())
        }
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

/// Raised by interval division when the divisor enclosure contains zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StraddlesZero;

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        DyadicInterval { lo: d.clone(), hi: d }
    }

    pub fn from_rational(q: &BigRational, bits: u64) -> Self {
        DyadicInterval {
            lo: Dyadic::from_rational(q, bits, Round::Down),
            hi: Dyadic::from_rational(q, bits, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.cmp_rational(q) != Ordering::Greater && self.hi.cmp_rational(q) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &DyadicInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Smallest absolute value over the interval.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        self.lo.add(&self.hi).mul_pow2(-1).to_f64()
    }

    pub fn neg(&self) -> Self {
        DyadicInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            DyadicInterval {
                lo: Dyadic::zero(),
                hi: self.mag(),
            }
        } else if self.lo.is_positive() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn add(&self, other: &Self, bits: u64) -> Self {
        DyadicInterval {
            lo: self.lo.add(&other.lo).round(bits, Round::Down),
            hi: self.hi.add(&other.hi).round(bits, Round::Up),
        }
    }

    pub fn sub(&self, other: &Self, bits: u64) -> Self {
        self.add(&other.neg(), bits)
    }

    pub fn mul(&self, other: &Self, bits: u64) -> Self {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = products.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        DyadicInterval {
            lo: lo.round(bits, Round::Down),
            hi: hi.round(bits, Round::Up),
        }
    }

    pub fn div(&self, other: &Self, bits: u64) -> Result<Self, StraddlesZero> {
        if other.contains_zero() {
            return Err(StraddlesZero);
        }
        let mut lows = Vec::with_capacity(4);
        let mut highs = Vec::with_capacity(4);
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                lows.push(a.div(b, bits, Round::Down));
                highs.push(a.div(b, bits, Round::Up));
            }
        }
        let lo = lows.into_iter().min().unwrap_or_else(Dyadic::zero);
        let hi = highs.into_iter().max().unwrap_or_else(Dyadic::zero);
        Ok(DyadicInterval { lo, hi })
    }

    /// Square root, clamping a slightly negative lower endpoint to zero.
    /// Returns `None` when the whole interval is negative.
    pub fn sqrt(&self, bits: u64) -> Option<Self> {
        if self.hi.is_negative() {
            return None;
        }
        let lo = if self.lo.is_negative() {
            Dyadic::zero()
        } else {
            self.lo.sqrt(bits, Round::Down)
        };
        Some(DyadicInterval {
            lo,
            hi: self.hi.sqrt(bits, Round::Up),
        })
    }

    /// Translates the interval by an integer.
    pub fn shift_int(&self, k: &BigInt) -> Self {
        let d = Dyadic::from_int(k.clone());
        DyadicInterval {
            lo: self.lo.add(&d),
            hi: self.hi.add(&d),
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
