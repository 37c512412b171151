//! Fast certified torus-norm tests for scans over millions of integers.
//!
//! `‖φ·m‖ < t` is decided from a 128-bit fixed-point enclosure of `frac(φ)`:
//! multiplying the enclosure by `m` with wrapping arithmetic gives a rigorous
//! enclosure of `frac(φ·m)` whose width is `m` ulps, with no accumulated
//! error. Rational frequencies use exact residues. Anything the fast path
//! cannot settle falls through to the refining interval evaluator.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{eval_interval, isqrt, torus_norm_below, Comparison, ConstExpr, Enclose, ExactError, RadicalForm};

const FRAC_BITS: u32 = 128;
const MAX_RESIDUE_TABLE: u64 = 1 << 20;

/// Certified decision of `‖value‖ < t` for a value known only through the
/// rational interval `[lo, hi]/den`; `None` when the interval straddles.
pub fn interval_norm_below(lo: &BigInt, hi: &BigInt, den: &BigInt, t: &BigRational) -> Option<bool> {
    debug_assert!(den.is_positive() && lo <= hi);
    let k = lo.div_floor(den);
    let base = &k * den;
    let ylo = lo - &base;
    let yhi = hi - base;
    let (tn, td) = (t.numer(), t.denom());
    // y/den < t  ⟺  y·td < tn·den
    let below = |y: &BigInt, num: &BigInt| y * td < num * den;
    let tn_den = tn.clone();
    let one_minus_t = td - tn;
    let one_plus_t = td + tn;
    if below(&yhi, &tn_den) {
        return Some(true);
    }
    if ylo.clone() * td > &one_minus_t * den && below(&yhi, &one_plus_t) {
        return Some(true);
    }
    if ylo.clone() * td >= tn * den && yhi * td <= one_minus_t * den {
        return Some(false);
    }
    None
}

#[derive(Clone, Debug)]
enum Kind {
    /// Admissible residues `x = m·p mod q`.
    Residues {
        p: u64,
        q: u64,
        admissible: Vec<bool>,
    },
    RationalBig {
        p: BigInt,
        q: BigInt,
    },
    /// `frac(φ) ∈ [base, base + width]·2^-128`, threshold `T = t·2^128`.
    Fixed {
        base: u128,
        width: u128,
        t_fixed: u128,
    },
    Constant(bool),
    Slow,
}

/// Precomputed test `m ↦ ‖φ·m‖ < t`.
#[derive(Clone, Debug)]
pub struct NormTest {
    phi: ConstExpr,
    t: BigRational,
    kind: Kind,
    cap_bits: u32,
}

fn to_u128(n: &BigInt) -> Option<u128> {
    n.to_u128()
}

impl NormTest {
    pub fn new(phi: &ConstExpr, t: &BigRational, cap_bits: u32) -> Result<Self, ExactError> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let kind = if !t.is_positive() || *t > half {
            Kind::Constant(t.is_positive())
        } else if let Some(q) = phi.exact_rational() {
            let den = q.denom().clone();
            let num = q.numer().mod_floor(&den);
            match (num.to_u64(), den.to_u64()) {
                (Some(p), Some(qq)) if qq <= MAX_RESIDUE_TABLE => {
                    let admissible = (0..qq)
                        .map(|x| {
                            let v = BigRational::new(BigInt::from(x), BigInt::from(qq));
                            super::rational_torus_norm(&v) < *t
                        })
                        .collect();
                    Kind::Residues { p, q: qq, admissible }
                }
                _ => Kind::RationalBig { p: num, q: den },
            }
        } else {
            let scale = BigInt::one() << FRAC_BITS;
            let dyadic_t =
                t.denom() & (t.denom() - BigInt::one()) == BigInt::zero() && t.denom().bits() <= FRAC_BITS as u64 + 1;
            if dyadic_t && t.is_positive() && *t < half {
                let iv = eval_interval(phi, FRAC_BITS + 64)?;
                let lo = (iv.lo().to_rational() * BigRational::from_integer(scale.clone()))
                    .floor()
                    .to_integer();
                let hi = (iv.hi().to_rational() * BigRational::from_integer(scale.clone()))
                    .ceil()
                    .to_integer();
                let width = to_u128(&(&hi - &lo));
                let base = to_u128(&lo.mod_floor(&scale));
                let t_fixed = to_u128(&(t * BigRational::from_integer(scale)).to_integer());
                match (base, width, t_fixed) {
                    (Some(base), Some(width), Some(t_fixed)) => Kind::Fixed { base, width, t_fixed },
                    _ => Kind::Slow,
                }
            } else {
                Kind::Slow
            }
        };
        Ok(NormTest {
            phi: phi.clone(),
            t: t.clone(),
            kind,
            cap_bits,
        })
    }

    pub fn frequency(&self) -> &ConstExpr {
        &self.phi
    }

    pub fn threshold(&self) -> &BigRational {
        &self.t
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, Kind::Residues { .. } | Kind::RationalBig { .. })
    }

    /// Denominator of a rational frequency.
    pub fn rational_period(&self) -> Option<u64> {
        match &self.kind {
            Kind::Residues { q, .. } => Some(*q),
            _ => None,
        }
    }

    /// Residue classes `m mod q` that pass, for rational frequencies with a table.
    pub fn admissible_residues(&self) -> Option<Vec<u64>> {
        match &self.kind {
            Kind::Residues { p, q, admissible } => Some(
                (0..*q)
                    .filter(|&m| admissible[((m as u128 * *p as u128) % *q as u128) as usize])
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Fast-path verdict only; `None` means the slow path is needed.
    pub fn quick(&self, m: u64) -> Option<bool> {
        match &self.kind {
            Kind::Residues { p, q, admissible } => {
                let x = ((m as u128 % *q as u128) * *p as u128 % *q as u128) as usize;
                Some(admissible[x])
            }
            Kind::RationalBig { p, q } => {
                let x = (BigInt::from(m) * p).mod_floor(q);
                interval_norm_below(&x, &x, q, &self.t)
            }
            Kind::Fixed { base, width, t_fixed } => {
                let m = m as u128;
                let e = m.checked_mul(*width)?;
                let x = m.wrapping_mul(*base).wrapping_add(*t_fixed);
                let two_t = t_fixed * 2;
                if x > 0 && x.checked_add(e).is_some_and(|hi| hi < two_t) {
                    Some(true)
                } else if x >= two_t && x.checked_add(e).is_some() {
                    Some(false)
                } else {
                    None
                }
            }
            Kind::Constant(v) => Some(*v),
            Kind::Slow => None,
        }
    }

    /// Certified `‖φ·m‖ < t`.
    pub fn test(&self, m: u64) -> Result<bool, ExactError> {
        if let Some(v) = self.quick(m) {
            return Ok(v);
        }
        self.test_slow(&BigInt::from(m))
    }

    pub fn test_big(&self, m: &BigInt) -> Result<bool, ExactError> {
        if let Some(small) = m.to_u64() {
            return self.test(small);
        }
        self.test_slow(m)
    }

    fn test_slow(&self, m: &BigInt) -> Result<bool, ExactError> {
        let e = &self.phi * ConstExpr::int(m.clone());
        match torus_norm_below(&e, &self.t, self.cap_bits)? {
            Comparison::Below => Ok(true),
            Comparison::Above | Comparison::Equal => Ok(false),
            Comparison::Unknown => Err(ExactError::PrecisionExhausted {
                bits: self.cap_bits as u64,
            }),
        }
    }
}

/// Test `N ↦ ‖c·√N‖ < t` for a coefficient `c = q·√s` in the exact fragment,
/// used for `c·n^{3/2} = q·√(s·n³)` scans.
#[derive(Clone, Debug)]
pub struct ScaledRootTest {
    coef: ConstExpr,
    q: Option<(BigRational, BigInt)>,
    t: BigRational,
    cap_bits: u32,
}

const ROOT_FRAC_BITS: u32 = 64;

impl ScaledRootTest {
    pub fn new(coef: &ConstExpr, t: &BigRational, cap_bits: u32) -> Self {
        let q = RadicalForm::from_expr(coef).and_then(|f| {
            if f.is_zero() {
                Some((BigRational::zero(), BigInt::one()))
            } else {
                f.single_term()
            }
        });
        ScaledRootTest {
            coef: coef.clone(),
            q,
            t: t.clone(),
            cap_bits,
        }
    }

    pub fn quick(&self, radicand: &BigInt) -> Option<bool> {
        let (c, s) = self.q.as_ref()?;
        if c.is_zero() {
            return Some(BigRational::zero() < self.t);
        }
        let n = (s * radicand) << (2 * ROOT_FRAC_BITS);
        let x = isqrt(&n);
        let exact = &x * &x == n;
        let (a, b) = (c.numer(), c.denom());
        let x_hi = if exact { x.clone() } else { &x + 1u32 };
        let (mut lo, mut hi) = (a * &x, a * &x_hi);
        if a.sign() == Sign::Minus {
            std::mem::swap(&mut lo, &mut hi);
        }
        let den = b << ROOT_FRAC_BITS;
        interval_norm_below(&lo, &hi, &den, &self.t)
    }

    /// Certified `‖c·√radicand‖ < t`.
    pub fn test(&self, radicand: &BigInt) -> Result<bool, ExactError> {
        if let Some(v) = self.quick(radicand) {
            return Ok(v);
        }
        let e = &self.coef * ConstExpr::sqrt_int(radicand.clone());
        match torus_norm_below(&e, &self.t, self.cap_bits)? {
            Comparison::Below => Ok(true),
            Comparison::Above | Comparison::Equal => Ok(false),
            Comparison::Unknown => Err(ExactError::PrecisionExhausted {
                bits: self.cap_bits as u64,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{parse_const, DEFAULT_CAP_BITS};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn slow(phi: &str, m: u64, t: &BigRational) -> bool {
        let e = parse_const(phi).unwrap() * ConstExpr::int(m);
        torus_norm_below(&e, t, DEFAULT_CAP_BITS).unwrap() == Comparison::Below
    }

    #[test]
    fn fixed_path_agrees_with_interval_path() {
        let t = q(3, 64);
        let test = NormTest::new(&parse_const("sqrt(3)/4096").unwrap(), &t, DEFAULT_CAP_BITS).unwrap();
        assert!(matches!(test.kind, Kind::Fixed { .. }));
        for m in (1..200_000u64).step_by(97).chain([2448, 1 << 40, 123_456_789_012]) {
            assert_eq!(test.test(m).unwrap(), slow("sqrt(3)/4096", m, &t), "m={m}");
        }
    }

    #[test]
    fn rational_residues() {
        let t = q(1, 512);
        let test = NormTest::new(&parse_const("1/6").unwrap(), &t, DEFAULT_CAP_BITS).unwrap();
        assert_eq!(test.admissible_residues(), Some(vec![0]));
        assert!(test.test(12).unwrap());
        assert!(!test.test(13).unwrap());
        let neg = NormTest::new(&parse_const("-5/6").unwrap(), &q(1, 5), DEFAULT_CAP_BITS).unwrap();
        assert_eq!(neg.admissible_residues(), Some(vec![0, 1, 5]));
    }

    #[test]
    fn convergent_of_sqrt2_is_small() {
        let t = q(1, 512);
        let test = NormTest::new(&parse_const("sqrt(2)/6").unwrap(), &t, DEFAULT_CAP_BITS).unwrap();
        assert!(test.test(2448).unwrap());
        assert!(!test.test(6).unwrap());
    }

    #[test]
    fn scaled_root_agrees_with_interval_path() {
        let t = q(23, 512);
        let coef = parse_const("sqrt(6)/4096").unwrap();
        let test = ScaledRootTest::new(&coef, &t, DEFAULT_CAP_BITS);
        for n in (1..5000u64).step_by(7).chain([10_048_136]) {
            let rad = BigInt::from(n).pow(3);
            let e = &coef * ConstExpr::sqrt_int(rad.clone());
            let want = torus_norm_below(&e, &t, DEFAULT_CAP_BITS).unwrap() == Comparison::Below;
            assert_eq!(test.test(&rad).unwrap(), want, "n={n}");
        }
    }

    #[test]
    fn interval_norm_boundaries() {
        let den = BigInt::from(100);
        let t = q(1, 10);
        let b = |lo: i64, hi: i64| interval_norm_below(&lo.into(), &hi.into(), &den, &t);
        assert_eq!(b(5, 9), Some(true));
        assert_eq!(b(10, 10), Some(false));
        assert_eq!(b(95, 105), Some(true));
        assert_eq!(b(85, 95), None);
        assert_eq!(b(-3, 4), Some(true));
        assert_eq!(b(20, 80), Some(false));
    }
}
