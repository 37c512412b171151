//! Checkable certificates: non-thickness of `{n : ‖γP(n)‖ < η}`, emptiness of
//! return-set intersections, and verified long intervals inside
//! `{n : ‖c_j n^{3/2}‖ < η}`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bohr::TruncatedSet;
use crate::exactreal::fixed::{NormTest, ScaledRootTest};
use crate::exactreal::{
    compare_exprs, compare_threshold, eval_interval, parse_const, torus_norm, torus_norm_below, torus_norm_expr,
    Comparison, ConstExpr, DyadicInterval, ExactError, RadicalForm, TorusNormOf,
};
use crate::hardy::{combo_deviation, DeviationReport, HardyError, IterateSeq, Polynomial};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("no certificate found up to {0}")]
    NotFound(u64),
    #[error("certificate invalid: {0}")]
    CertInvalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
}

fn factorial(d: usize) -> BigInt {
    (1..=d as u64).fold(BigInt::one(), |acc, k| acc * k)
}

fn interval_strings(iv: &DyadicInterval) -> [String; 2] {
    [iv.lo().to_string(), iv.hi().to_string()]
}

fn parse(s: &str) -> Result<ConstExpr, CertifyError> {
    Ok(parse_const(s)?)
}

fn parse_rational(s: &str) -> Result<BigRational, CertifyError> {
    parse(s)?
        .as_literal()
        .ok_or_else(|| CertifyError::CertInvalid(format!("{s} is not a rational literal")))
}

/// `‖d!·a_d·γ·h^d‖ > 2^d·η` for the polynomial `P` of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonThickCert {
    pub gamma: ConstExpr,
    pub poly: Polynomial,
    pub eta: BigRational,
    pub h: u64,
    pub norm: DyadicInterval,
}

/// Serialized form: every constant as a grammar string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonThickRecord {
    pub gamma: String,
    pub poly: Vec<String>,
    pub eta: String,
    pub h: u64,
    pub degree: usize,
    /// Enclosure of the torus norm of `d!·a_d·γ·h^d`.
    pub norm: [String; 2],
    pub threshold: String,
    /// No run longer than `d·h` in the set.
    pub max_run: u64,
}

impl NonThickCert {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Runs in `{n : ‖γP(n)‖ < η}` are at most this long.
    pub fn max_run(&self) -> u64 {
        self.degree() as u64 * self.h
    }

    fn scaled_leading(&self) -> ConstExpr {
        ConstExpr::int(factorial(self.degree())) * self.poly.leading() * &self.gamma
    }

    fn threshold(&self) -> BigRational {
        &self.eta * BigRational::from_integer(BigInt::from(2).pow(self.degree() as u32))
    }

    pub fn record(&self) -> NonThickRecord {
        NonThickRecord {
            gamma: self.gamma.to_string(),
            poly: self.poly.coeffs().iter().map(|c| c.to_string()).collect(),
            eta: self.eta.to_string(),
            h: self.h,
            degree: self.degree(),
            norm: interval_strings(&self.norm),
            threshold: self.threshold().to_string(),
            max_run: self.max_run(),
        }
    }

    pub fn from_record(r: &NonThickRecord, cap_bits: u32) -> Result<Self, CertifyError> {
        let gamma = parse(&r.gamma)?;
        let poly = Polynomial::new(r.poly.iter().map(|s| parse(s)).collect::<Result<_, _>>()?);
        let eta = parse_rational(&r.eta)?;
        let cert = NonThickCert {
            norm: torus_norm(
                &(nonthick_frequency(&gamma, &poly) * ConstExpr::int(BigInt::from(r.h).pow(poly.degree() as u32))),
                64,
            )?
            .interval()
            .clone(),
            gamma,
            poly,
            eta,
            h: r.h,
        };
        cert.verify(cap_bits)?;
        Ok(cert)
    }

    /// Re-certifies the defining inequality.
    pub fn verify(&self, cap_bits: u32) -> Result<(), CertifyError> {
        let x = self.scaled_leading() * ConstExpr::int(BigInt::from(self.h).pow(self.degree() as u32));
        match compare_threshold(&TorusNormOf(&x), &self.threshold(), cap_bits)? {
            Comparison::Above => Ok(()),
            other => Err(CertifyError::CertInvalid(format!(
                "norm of {x} is {other:?} the threshold {}",
                self.threshold()
            ))),
        }
    }
}

fn nonthick_frequency(gamma: &ConstExpr, p: &Polynomial) -> ConstExpr {
    ConstExpr::int(factorial(p.degree())) * p.leading() * gamma
}

/// Smallest `h ≤ h_max` with `‖d!·a_d·γ·h^d‖ > 2^d·η`.
pub fn find_nonthick_h(
    gamma: &ConstExpr,
    p: &Polynomial,
    eta: &BigRational,
    h_max: u64,
    cap_bits: u32,
) -> Result<NonThickCert, CertifyError> {
    let d = p.degree();
    if d == 0 {
        return Err(CertifyError::Precondition("polynomial must be nonconstant".into()));
    }
    let limit = BigRational::new(BigInt::one(), BigInt::from(2).pow(d as u32 + 1));
    if !eta.is_positive() || *eta >= limit {
        return Err(CertifyError::Precondition(format!("need 0 < eta < {limit}, got {eta}")));
    }
    let lead = p.leading() * gamma;
    if RadicalForm::from_expr(&lead).is_some_and(|f| f.as_rational().is_some()) {
        return Err(CertifyError::Precondition(format!("gamma*a_d = {lead} is rational")));
    }
    let phi = nonthick_frequency(gamma, p);
    let threshold = eta * BigRational::from_integer(BigInt::from(2).pow(d as u32));
    let test = NormTest::new(&phi, &threshold, cap_bits)?;
    for h in 1..=h_max {
        let m = BigInt::from(h).pow(d as u32);
        if test.test_big(&m)? {
            continue;
        }
        let x = &phi * ConstExpr::int(m);
        if compare_threshold(&TorusNormOf(&x), &threshold, cap_bits)? == Comparison::Above {
            let norm = torus_norm(&x, 64)?.interval().clone();
            return Ok(NonThickCert {
                gamma: gamma.clone(),
                poly: p.clone(),
                eta: eta.clone(),
                h,
                norm,
            });
        }
    }
    Err(CertifyError::NotFound(h_max))
}

/// `Σ_j (−1)^{d−j}·C(d,j)·P(N + jh) = d!·a_d·h^d`, decided exactly.
///
/// Coefficients in the radical fragment are summed symbolically; otherwise
/// the identity is checked on the monomial basis, where it is a statement
/// about integer weights and holds for every coefficient vector.
pub fn finite_difference_check(p: &Polynomial, n: &BigInt, h: &BigInt) -> bool {
    let d = p.degree();
    let weights: Vec<BigInt> = (0..=d)
        .map(|j| {
            let b = binomial(BigInt::from(d), BigInt::from(j));
            if (d - j).is_multiple_of(2) {
                b
            } else {
                -b
            }
        })
        .collect();
    let points: Vec<BigInt> = (0..=d).map(|j| n + h * BigInt::from(j)).collect();
    let rhs_scale = factorial(d) * h.pow(d as u32);
    let forms: Option<Vec<RadicalForm>> = p.coeffs().iter().map(RadicalForm::from_expr).collect();
    match forms {
        Some(coeffs) => {
            let mut lhs = RadicalForm::zero();
            for (w, x) in weights.iter().zip(&points) {
                let mut value = RadicalForm::zero();
                let mut pow = BigInt::one();
                for c in &coeffs {
                    value = value.add(&c.scale(&BigRational::from_integer(pow.clone())));
                    pow *= x;
                }
                lhs = lhs.add(&value.scale(&BigRational::from_integer(w.clone())));
            }
            let rhs = coeffs[d].scale(&BigRational::from_integer(rhs_scale));
            lhs.sub(&rhs).is_zero()
        }
        None => (0..=d).all(|k| {
            let s: BigInt = weights.iter().zip(&points).map(|(w, x)| w * x.pow(k as u32)).sum();
            if k < d {
                s.is_zero()
            } else {
                s == rhs_scale
            }
        }),
    }
}

/// Elements `n` of `s` with `‖βP(n)‖ ≥ η`.
pub fn verify_inclusion(
    s: &TruncatedSet,
    beta: &ConstExpr,
    p: &Polynomial,
    eta: &BigRational,
    cap_bits: u32,
) -> Result<Vec<u64>, ExactError> {
    let linear = p.degree() == 1 && p.coeffs()[0].as_literal().is_some_and(|q| q.is_zero());
    let fast = if linear {
        Some(NormTest::new(&(beta * p.leading()), eta, cap_bits)?)
    } else {
        None
    };
    let checks: Vec<(u64, bool)> = s
        .elements()
        .par_iter()
        .map(|&n| {
            let below = match &fast {
                Some(t) => t.test(n)?,
                None => {
                    let x = beta * p.eval(&BigInt::from(n));
                    match torus_norm_below(&x, eta, cap_bits)? {
                        Comparison::Below => true,
                        Comparison::Above | Comparison::Equal => false,
                        Comparison::Unknown => return Err(ExactError::PrecisionExhausted { bits: cap_bits as u64 }),
                    }
                }
            };
            Ok((n, below))
        })
        .collect::<Result<_, ExactError>>()?;
    Ok(checks.into_iter().filter(|(_, below)| !below).map(|(n, _)| n).collect())
}

/// Data of the emptiness obstruction: `βD̄ < ρ ≤ ‖βP(n)‖` for all `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmptyCert {
    pub thetas: Vec<ConstExpr>,
    pub poly: Polynomial,
    pub d_bar: ConstExpr,
    pub beta: ConstExpr,
    pub rho: ConstExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptyRecord {
    pub thetas: Vec<String>,
    pub poly: Vec<String>,
    pub d_bar: String,
    pub beta: String,
    pub rho: String,
}

impl EmptyCert {
    pub fn record(&self) -> EmptyRecord {
        EmptyRecord {
            thetas: self.thetas.iter().map(|t| t.to_string()).collect(),
            poly: self.poly.coeffs().iter().map(|c| c.to_string()).collect(),
            d_bar: self.d_bar.to_string(),
            beta: self.beta.to_string(),
            rho: self.rho.to_string(),
        }
    }

    pub fn from_record(r: &EmptyRecord) -> Result<Self, CertifyError> {
        Ok(EmptyCert {
            thetas: r.thetas.iter().map(|s| parse(s)).collect::<Result<_, _>>()?,
            poly: Polynomial::new(r.poly.iter().map(|s| parse(s)).collect::<Result<_, _>>()?),
            d_bar: parse(&r.d_bar)?,
            beta: parse(&r.beta)?,
            rho: parse(&r.rho)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormBound {
    /// `β·a_1 ∈ Z`, so `‖βP(n)‖` is constant in `n`.
    Symbolic,
    /// Checked at every `n` of the deviation range only.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmptyVerdict {
    pub beta_d_bar: [String; 2],
    pub rho: [String; 2],
    pub margin: [String; 2],
    pub norm_bound: NormBound,
    pub deviation_max: [String; 2],
    pub deviation_argmax: u64,
    pub deviation_range: (u64, u64),
}

/// Checks `βD̄ < ρ`, `‖βP(n)‖ ≥ ρ` and the deviation bound `≤ D̄` on `range`.
pub fn check_empty_cert(
    cert: &EmptyCert,
    seqs: &[IterateSeq],
    range: (u64, u64),
    cap_bits: u32,
) -> Result<EmptyVerdict, CertifyError> {
    let beta_d = &cert.beta * &cert.d_bar;
    if compare_exprs(&beta_d, &cert.rho, cap_bits)? != Comparison::Below {
        return Err(CertifyError::CertInvalid(format!(
            "beta*D = {beta_d} is not below rho = {}",
            cert.rho
        )));
    }
    let norm_bound = norm_lower_bound(cert, range, cap_bits)?;
    let dev: DeviationReport = combo_deviation(seqs, &cert.thetas, &cert.poly, range, cap_bits)?;
    if dev.below(&cert.d_bar)? != Comparison::Below {
        return Err(CertifyError::CertInvalid(format!(
            "deviation reaches [{}, {}] at n = {}, bound {}",
            dev.max.lo(),
            dev.max.hi(),
            dev.argmax,
            cert.d_bar
        )));
    }
    let bd = eval_interval(&beta_d, 64)?;
    let rho = eval_interval(&cert.rho, 64)?;
    let margin = eval_interval(&(&cert.rho - &beta_d), 64)?;
    Ok(EmptyVerdict {
        beta_d_bar: interval_strings(&bd),
        rho: interval_strings(&rho),
        margin: interval_strings(&margin),
        norm_bound,
        deviation_max: interval_strings(&dev.max),
        deviation_argmax: dev.argmax,
        deviation_range: range,
    })
}

fn norm_lower_bound(cert: &EmptyCert, range: (u64, u64), cap_bits: u32) -> Result<NormBound, CertifyError> {
    let p = &cert.poly;
    let integral_slope = p.degree() <= 1
        && (p.degree() == 0
            || RadicalForm::from_expr(&(&cert.beta * p.leading()))
                .and_then(|f| f.as_rational())
                .is_some_and(|q| q.is_integer()));
    if integral_slope {
        let constant = &cert.beta * &p.coeffs()[0];
        let norm = torus_norm_expr(&constant, cap_bits)?;
        return match compare_exprs(&norm, &cert.rho, cap_bits)? {
            Comparison::Above | Comparison::Equal => Ok(NormBound::Symbolic),
            other => Err(CertifyError::CertInvalid(format!(
                "||beta*P(n)|| = {norm} is {other:?} rho"
            ))),
        };
    }
    for n in range.0.max(1)..=range.1 {
        let x = &cert.beta * p.eval(&BigInt::from(n));
        let norm = torus_norm_expr(&x, cap_bits)?;
        if !compare_exprs(&norm, &cert.rho, cap_bits)?.is_at_least() {
            return Err(CertifyError::CertInvalid(format!("||beta*P({n})|| < rho")));
        }
    }
    Ok(NormBound::Sampled)
}

/// A verified block `{N, …, N+H}` inside `{n : ‖c_j n^{3/2}‖ < η ∀j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThickInterval {
    pub start: u64,
    pub length: u64,
}

/// `N` from which the Taylor remainder `(3/8)H²·max|c_j|·N^{−1/2}` is below `η/3`.
fn remainder_start(cs: &[ConstExpr], eta: &BigRational, h: u64) -> Result<u64, ExactError> {
    let mut max_c = BigRational::zero();
    for c in cs {
        let hi = eval_interval(c, 64)?.abs().hi().to_rational();
        if hi > max_c {
            max_c = hi;
        }
    }
    if max_c.is_zero() {
        return Ok(1);
    }
    // N > ((9/8)·H²·max|c|/η)²
    let root = BigRational::new(9.into(), 8.into()) * BigRational::from_integer(BigInt::from(h) * h) * max_c / eta;
    let bound = &root * &root;
    Ok((bound.floor().to_integer() + 1u32).to_u64().unwrap_or(u64::MAX).max(1))
}

const THICK_BLOCK: u64 = 1 << 14;

pub fn find_thick_interval(
    cs: &[ConstExpr],
    eta: &BigRational,
    h: u64,
    search_cap: u64,
    cap_bits: u32,
) -> Result<ThickInterval, CertifyError> {
    if !eta.is_positive() {
        return Err(CertifyError::Precondition("eta must be positive".into()));
    }
    let third = eta / BigRational::from_integer(3.into());
    let slope_t = eta / BigRational::from_integer(BigInt::from(3) * h.max(1));
    let value_tests: Vec<ScaledRootTest> = cs.iter().map(|c| ScaledRootTest::new(c, &third, cap_bits)).collect();
    let three_halves = ConstExpr::rational(BigRational::new(3.into(), 2.into()));
    let slope_tests: Vec<ScaledRootTest> = cs
        .iter()
        .map(|c| ScaledRootTest::new(&(&three_halves * c), &slope_t, cap_bits))
        .collect();
    let full_tests: Vec<ScaledRootTest> = cs.iter().map(|c| ScaledRootTest::new(c, eta, cap_bits)).collect();
    let start = remainder_start(cs, eta, h)?;
    let candidate = |n: u64| -> Result<bool, ExactError> {
        let n_big = BigInt::from(n);
        let cube = n_big.pow(3);
        for t in &value_tests {
            if !t.test(&cube)? {
                return Ok(false);
            }
        }
        for t in &slope_tests {
            if !t.test(&n_big)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let verified = |n: u64| -> Result<bool, ExactError> {
        for k in n..=n + h {
            let cube = BigInt::from(k).pow(3);
            for t in &full_tests {
                if !t.test(&cube)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let mut lo = start;
    while lo <= search_cap {
        let hi = (lo + THICK_BLOCK - 1).min(search_cap);
        let hit = (lo..=hi)
            .into_par_iter()
            .find_first(|&n| !matches!(candidate(n), Ok(false)));
        match hit {
            Some(n) if candidate(n)? => {
                if verified(n)? {
                    return Ok(ThickInterval {
                        start: n,
                        length: h + 1,
                    });
                }
                return Err(CertifyError::CertInvalid(format!(
                    "Taylor candidate {n} failed direct verification"
                )));
            }
            Some(_) => unreachable!("candidate errors are returned above"),
            None => lo = hi + 1,
        }
    }
    Err(CertifyError::NotFound(search_cap))
}

/// Re-checks every element of a found interval on the refining interval path.
pub fn reverify_thick_interval(
    cs: &[ConstExpr],
    eta: &BigRational,
    iv: &ThickInterval,
    cap_bits: u32,
) -> Result<bool, ExactError> {
    for k in iv.start..iv.start + iv.length {
        let root = ConstExpr::sqrt_int(BigInt::from(k).pow(3));
        for c in cs {
            if torus_norm_below(&(c * &root), eta, cap_bits)? != Comparison::Below {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSum {
    pub magnitude: f64,
    pub n: u64,
    /// Always false: evaluated in double precision.
    pub rigorous: bool,
}

const WEYL_BLOCK: u64 = 1 << 15;

/// `|(1/N)·Σ_{n≤N} e^{2πi·c·n^γ}|` for `γ ∈ {1/2, 3/2}`, in floating point.
pub fn weyl_sum(c: &ConstExpr, gamma: &BigRational, n: u64) -> Result<WeylSum, CertifyError> {
    let half = BigRational::new(1.into(), 2.into());
    let three_halves = BigRational::new(3.into(), 2.into());
    if *gamma != half && *gamma != three_halves {
        return Err(CertifyError::Precondition(format!(
            "exponent {gamma} not in {{1/2, 3/2}}"
        )));
    }
    let cf = eval_interval(c, 64)?.midpoint_f64();
    let cube = *gamma == three_halves;
    let blocks: Vec<(u64, u64)> = (1..=n)
        .step_by(WEYL_BLOCK as usize)
        .map(|a| (a, (a + WEYL_BLOCK - 1).min(n)))
        .collect();
    let parts: Vec<(f64, f64)> = blocks
        .into_par_iter()
        .map(|(a, b)| {
            let (mut re, mut im) = (0.0, 0.0);
            for k in a..=b {
                let x = k as f64;
                let p = if cube { x * x.sqrt() } else { x.sqrt() };
                // reduce the integer part of c·p before the trig call
                let phase = (cf * p).fract() * std::f64::consts::TAU;
                re += phase.cos();
                im += phase.sin();
            }
            (re, im)
        })
        .collect();
    let (re, im) = parts.iter().fold((0.0, 0.0), |(r, i), (a, b)| (r + a, i + b));
    Ok(WeylSum {
        magnitude: (re * re + im * im).sqrt() / n.max(1) as f64,
        n,
        rigorous: false,
    })
}

/// Margins for the parameter choice `βa_d ∉ Q`, `βD < 2^{−(d+1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionCheck {
    pub leading_irrational: Option<bool>,
    pub beta_d: [String; 2],
    pub limit: String,
}

pub fn check_obstruction_params(
    beta: &ConstExpr,
    leading: &ConstExpr,
    d: &ConstExpr,
    degree: usize,
    cap_bits: u32,
) -> Result<ObstructionCheck, CertifyError> {
    let lead = beta * leading;
    let leading_irrational = RadicalForm::from_expr(&lead).map(|f| f.as_rational().is_none());
    if leading_irrational == Some(false) {
        return Err(CertifyError::Precondition(format!("beta*a_d = {lead} is rational")));
    }
    let limit = BigRational::new(BigInt::one(), BigInt::from(2).pow(degree as u32 + 1));
    let bd = beta * d;
    if compare_threshold(&bd, &limit, cap_bits)? != Comparison::Below {
        return Err(CertifyError::CertInvalid(format!("beta*D = {bd} is not below {limit}")));
    }
    Ok(ObstructionCheck {
        leading_irrational,
        beta_d: interval_strings(&eval_interval(&bd, 64)?),
        limit: limit.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::DEFAULT_CAP_BITS;
    use crate::hardy::{HardyCombo, Rounding};

    fn c(s: &str) -> ConstExpr {
        parse_const(s).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn poly(cs: &[&str]) -> Polynomial {
        Polynomial::new(cs.iter().map(|s| c(s)).collect())
    }

    #[test]
    fn nonthick_examples() {
        let cert = find_nonthick_h(&c("sqrt(2)"), &Polynomial::identity(), &q(1, 8), 10, DEFAULT_CAP_BITS).unwrap();
        assert_eq!(cert.h, 1);
        let cert = find_nonthick_h(&c("sqrt(2)"), &poly(&["0", "0", "1"]), &q(1, 16), 10, DEFAULT_CAP_BITS).unwrap();
        assert_eq!(cert.h, 2);
        assert_eq!(cert.max_run(), 4);
    }

    #[test]
    fn nonthick_thm_main_h_matches_direct_scan() {
        let gamma = c("sqrt(3)/4096");
        let cert = find_nonthick_h(&gamma, &Polynomial::identity(), &q(15, 64), 5000, DEFAULT_CAP_BITS).unwrap();
        // oracle: first h with ‖√3·h/4096‖ > 15/32, scanned on the interval path
        let want = (1..5000u64)
            .find(|&h| {
                let x = &gamma * ConstExpr::int(h);
                compare_threshold(&TorusNormOf(&x), &q(15, 32), DEFAULT_CAP_BITS).unwrap() == Comparison::Above
            })
            .unwrap();
        assert_eq!(cert.h, want);
        assert!((1100..=1140).contains(&cert.h));
        let back = NonThickCert::from_record(&cert.record(), DEFAULT_CAP_BITS).unwrap();
        assert_eq!(back.record(), cert.record());
    }

    #[test]
    fn nonthick_preconditions() {
        let err = find_nonthick_h(&c("1/3"), &Polynomial::identity(), &q(1, 8), 10, DEFAULT_CAP_BITS);
        assert!(matches!(err, Err(CertifyError::Precondition(_))));
        let err = find_nonthick_h(&c("sqrt(2)"), &Polynomial::identity(), &q(1, 4), 10, DEFAULT_CAP_BITS);
        assert!(matches!(err, Err(CertifyError::Precondition(_))));
    }

    #[test]
    fn finite_difference_examples() {
        let n = |x: i64| BigInt::from(x);
        assert!(finite_difference_check(&poly(&["0", "0", "1"]), &n(5), &n(3)));
        assert!(finite_difference_check(&Polynomial::identity(), &n(7), &n(4)));
        assert!(finite_difference_check(
            &poly(&["sqrt(2)", "1/3", "sqrt(3)", "7"]),
            &n(11),
            &n(2)
        ));
        assert!(finite_difference_check(
            &poly(&["sqrt(sqrt(2))", "1", "sqrt(1+sqrt(5))"]),
            &n(3),
            &n(9)
        ));
    }

    #[test]
    fn inclusion_violations() {
        let s = TruncatedSet::new(vec![1, 2, 1000], 1000, "t").unwrap();
        let bad = verify_inclusion(
            &s,
            &c("sqrt(3)/4096"),
            &Polynomial::identity(),
            &q(15, 64),
            DEFAULT_CAP_BITS,
        );
        assert_eq!(bad.unwrap(), vec![1000]);
        let none = TruncatedSet::new(vec![], 10, "t").unwrap();
        assert!(verify_inclusion(&none, &c("1"), &Polynomial::identity(), &q(1, 8), 64)
            .unwrap()
            .is_empty());
        let affine = verify_inclusion(&s, &c("1/6"), &poly(&["6*sqrt(2)", "6"]), &q(1, 8), DEFAULT_CAP_BITS);
        // ‖(6n + 6√2)/6‖ = √2 − 1 for every n
        assert_eq!(affine.unwrap(), vec![1, 2, 1000]);
    }

    fn empty_cert(l: &str) -> (EmptyCert, Vec<IterateSeq>) {
        let lambda = c("sqrt(2)");
        let l = c(l);
        let cert = EmptyCert {
            thetas: vec![-&lambda, c("1")],
            poly: Polynomial::affine(&l, &lambda),
            d_bar: c("1+sqrt(2)"),
            beta: ConstExpr::one() / &l,
            rho: c("sqrt(2)-1"),
        };
        let seqs = vec![
            IterateSeq::new(HardyCombo::three_halves(), Rounding::Floor),
            IterateSeq::new(HardyCombo::lambda_plus_affine(&lambda, &l, &lambda), Rounding::Floor),
        ];
        (cert, seqs)
    }

    #[test]
    fn empty_cert_valid_and_invalid() {
        let (cert, seqs) = empty_cert("6");
        let v = check_empty_cert(&cert, &seqs, (1, 300), DEFAULT_CAP_BITS).unwrap();
        assert_eq!(v.norm_bound, NormBound::Symbolic);
        assert_eq!(EmptyCert::from_record(&cert.record()).unwrap().record(), cert.record());
        let (cert5, seqs5) = empty_cert("5");
        assert!(matches!(
            check_empty_cert(&cert5, &seqs5, (1, 10), DEFAULT_CAP_BITS),
            Err(CertifyError::CertInvalid(_))
        ));
    }

    #[test]
    fn thick_interval_diagnostic_and_zero() {
        let cs = [c("1/100")];
        let iv = find_thick_interval(&cs, &q(3, 10), 10, 1_000_000, DEFAULT_CAP_BITS).unwrap();
        assert_eq!(iv.length, 11);
        assert!(reverify_thick_interval(&cs, &q(3, 10), &iv, 2 * DEFAULT_CAP_BITS).unwrap());
        let zero = find_thick_interval(&[c("0")], &q(1, 8), 5, 10, DEFAULT_CAP_BITS).unwrap();
        assert_eq!(zero, ThickInterval { start: 1, length: 6 });
    }

    #[test]
    fn weyl_diagnostics() {
        let zero = weyl_sum(&c("0"), &q(3, 2), 1000).unwrap();
        assert!((zero.magnitude - 1.0).abs() < 1e-12);
        assert!(weyl_sum(&c("1/2"), &q(3, 2), 100_000).unwrap().magnitude < 0.05);
        assert!(weyl_sum(&c("1"), &q(1, 1), 10).is_err());
    }

    #[test]
    fn obstruction_params() {
        let ok = check_obstruction_params(&c("sqrt(3)/4096"), &c("1"), &c("1+sqrt(2)"), 1, DEFAULT_CAP_BITS);
        assert!(ok.is_ok());
        let bad = check_obstruction_params(&c("1/6"), &c("6"), &c("1+sqrt(2)"), 1, DEFAULT_CAP_BITS);
        assert!(matches!(bad, Err(CertifyError::Precondition(_))));
    }
}
