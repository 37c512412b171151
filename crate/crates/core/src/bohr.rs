//! Bohr sets `E = {m ≥ 1 : ‖φ_i·m‖ < δ_i for all i}`.

use std::fmt;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactreal::fixed::NormTest;
use crate::exactreal::relation::{find_small_relation, relation_to_i64};
use crate::exactreal::{torus_norm_below, Comparison, ConstExpr, Enclose, ExactError, DEFAULT_CAP_BITS};

/// Coefficient bound and precision of the independence sanity search.
pub const RELATION_BOUND: u64 = 1_000_000;
pub const RELATION_BITS: u32 = 256;
const MAX_PERIOD: u64 = 1 << 20;
const SCAN_BLOCK: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BohrError {
    #[error("need one radius per frequency ({freqs} frequencies, {radii} radii)")]
    LengthMismatch { freqs: usize, radii: usize },
    #[error("a Bohr set needs at least one frequency")]
    NoFrequencies,
    #[error("radius {0} must be a dyadic rational in (0, 1/2)")]
    InvalidRadius(String),
    #[error("radius {radius} lies on the grid j/{den} of rational frequency {freq}")]
    RadiusOnGrid { radius: String, freq: String, den: String },
    #[error("frequencies declared independent satisfy the integer relation {0:?}")]
    DependentFrequencies(Vec<i64>),
    #[error("density formula needs the irrational frequencies declared independent")]
    UnsupportedStructure,
    #[error("malformed set dump: {0}")]
    Format(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FreqClass {
    Rational(String),
    Irrational,
}

fn is_dyadic(q: &BigRational) -> bool {
    let d = q.denom();
    (d & (d - BigInt::one())).is_zero()
}

#[derive(Clone, Debug)]
pub struct BohrSpec {
    frequencies: Vec<ConstExpr>,
    radii: Vec<BigRational>,
    classes: Vec<FreqClass>,
    independent: bool,
    tests: Vec<NormTest>,
    double_tests: Vec<NormTest>,
    period: Option<(u64, Vec<bool>)>,
}

impl BohrSpec {
    /// Validates the spec. `independent` declares that `1` and the irrational
    /// frequencies are linearly independent over Q; the declaration is
    /// sanity-checked by a small-relation search.
    pub fn new(frequencies: Vec<ConstExpr>, radii: Vec<BigRational>, independent: bool) -> Result<Self, BohrError> {
        if frequencies.len() != radii.len() {
            return Err(BohrError::LengthMismatch {
                freqs: frequencies.len(),
                radii: radii.len(),
            });
        }
        if frequencies.is_empty() {
            return Err(BohrError::NoFrequencies);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut classes = Vec::new();
        for (phi, d) in frequencies.iter().zip(&radii) {
            if !d.is_positive() || *d >= half || !is_dyadic(d) {
                return Err(BohrError::InvalidRadius(d.to_string()));
            }
            match phi.exact_rational() {
                Some(q) => {
                    if (d * BigRational::from_integer(q.denom().clone())).is_integer() {
                        return Err(BohrError::RadiusOnGrid {
                            radius: d.to_string(),
                            freq: phi.to_string(),
                            den: q.denom().to_string(),
                        });
                    }
                    classes.push(FreqClass::Rational(q.to_string()));
                }
                None => classes.push(FreqClass::Irrational),
            }
        }
        if independent {
            let mut vals = vec![ConstExpr::one()];
            vals.extend(
                frequencies
                    .iter()
                    .zip(&classes)
                    .filter(|(_, c)| **c == FreqClass::Irrational)
                    .map(|(f, _)| f.clone()),
            );
            if vals.len() > 1 {
                if let Some(rel) = find_small_relation(&vals, RELATION_BOUND, RELATION_BITS)? {
                    return Err(BohrError::DependentFrequencies(relation_to_i64(&rel)));
                }
            }
        }
        let tests = frequencies
            .iter()
            .zip(&radii)
            .map(|(f, d)| NormTest::new(f, d, DEFAULT_CAP_BITS))
            .collect::<Result<Vec<_>, _>>()?;
        let double_tests = frequencies
            .iter()
            .zip(&radii)
            .map(|(f, d)| NormTest::new(f, &(d * BigRational::from_integer(2.into())), DEFAULT_CAP_BITS))
            .collect::<Result<Vec<_>, _>>()?;
        let period = rational_filter(&tests);
        Ok(BohrSpec {
            frequencies,
            radii,
            classes,
            independent,
            tests,
            double_tests,
            period,
        })
    }

    pub fn frequencies(&self) -> &[ConstExpr] {
        &self.frequencies
    }

    pub fn radii(&self) -> &[BigRational] {
        &self.radii
    }

    pub fn classes(&self) -> &[FreqClass] {
        &self.classes
    }

    pub fn declared_independent(&self) -> bool {
        self.independent
    }

    fn has_rational(&self) -> bool {
        self.classes.iter().any(|c| matches!(c, FreqClass::Rational(_)))
    }

    /// Period and admissibility table of the rational frequencies combined.
    pub fn residue_filter(&self) -> Option<(u64, &[bool])> {
        self.period.as_ref().map(|(q, t)| (*q, t.as_slice()))
    }

    fn passes_filter(&self, m: u64) -> bool {
        match &self.period {
            Some((q, table)) => table[(m % q) as usize],
            None => true,
        }
    }

    pub fn member(&self, m: u64) -> Result<bool, ExactError> {
        if !self.passes_filter(m) {
            return Ok(false);
        }
        for t in &self.tests {
            if !t.test(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn member_big(&self, m: &BigInt) -> Result<bool, ExactError> {
        for t in &self.tests {
            if !t.test_big(m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `E ∩ [1, n]` and its relative size.
    pub fn enumerate_with_density(&self, n: u64) -> Result<(TruncatedSet, BigRational), ExactError> {
        let elements = self.scan(1, n)?;
        let density = BigRational::new(BigInt::from(elements.len()), BigInt::from(n.max(1)));
        let set = TruncatedSet::new(elements, n, self.to_string()).expect("scan output is sorted and bounded");
        Ok((set, density))
    }

    /// Sorted members of `E` in `[lo, hi]`.
    pub fn scan(&self, lo: u64, hi: u64) -> Result<Vec<u64>, ExactError> {
        let lo = lo.max(1);
        if lo > hi {
            return Ok(Vec::new());
        }
        let blocks: Vec<(u64, u64)> = (lo..=hi)
            .step_by(SCAN_BLOCK as usize)
            .map(|a| (a, (a + SCAN_BLOCK - 1).min(hi)))
            .collect();
        let parts: Vec<Vec<u64>> = blocks
            .into_par_iter()
            .map(|(a, b)| {
                let mut out = Vec::new();
                for m in a..=b {
                    if self.member(m)? {
                        out.push(m);
                    }
                }
                Ok(out)
            })
            .collect::<Result<_, ExactError>>()?;
        Ok(parts.concat())
    }

    /// Natural density from the product formula.
    pub fn density_theoretical(&self) -> Result<BigRational, BohrError> {
        let irrational: Vec<&BigRational> = self
            .classes
            .iter()
            .zip(&self.radii)
            .filter(|(c, _)| **c == FreqClass::Irrational)
            .map(|(_, d)| d)
            .collect();
        if !irrational.is_empty() && !self.independent {
            return Err(BohrError::UnsupportedStructure);
        }
        let mut density = irrational.iter().fold(BigRational::one(), |acc, d| {
            acc * *d * BigRational::from_integer(2.into())
        });
        if self.has_rational() {
            let (q, table) = self.residue_filter().ok_or(BohrError::UnsupportedStructure)?;
            let admissible = table.iter().filter(|&&b| b).count();
            density *= BigRational::new(BigInt::from(admissible), BigInt::from(q));
        }
        Ok(density)
    }

    /// Routes a shift `r` through the necessary condition `‖φ_i r‖ < 2δ_i`,
    /// which is also sufficient when every frequency is irrational and
    /// independent together with 1.
    pub fn return_diff_test(&self, r: u64) -> Result<DiffStatus, ExactError> {
        for t in &self.double_tests {
            if !t.test(r)? {
                return Ok(DiffStatus::CertOut);
            }
        }
        if self.independent && !self.has_rational() {
            Ok(DiffStatus::CertIn)
        } else {
            Ok(DiffStatus::NeedWitness)
        }
    }

    /// Membership decided by the refining interval path alone, at `cap_bits`.
    pub fn member_slow(&self, m: u64, cap_bits: u32) -> Result<bool, ExactError> {
        for (phi, d) in self.frequencies.iter().zip(&self.radii) {
            let e = phi * ConstExpr::int(m);
            match torus_norm_below(&e, d, cap_bits)? {
                Comparison::Below => {}
                Comparison::Above | Comparison::Equal => return Ok(false),
                Comparison::Unknown => return Err(ExactError::PrecisionExhausted { bits: cap_bits as u64 }),
            }
        }
        Ok(true)
    }

    /// Smallest `m ≤ bound` with `m, m + r ∈ E`, probing only the listed
    /// members of `E`; `members` must cover `[1, bound]`.
    pub fn witness_search_in(&self, members: &TruncatedSet, r: u64, bound: u64) -> Result<Witness, ExactError> {
        debug_assert!(members.horizon() >= bound);
        let end = members.elements().partition_point(|&m| m <= bound);
        let cands = &members.elements()[..end];
        let check = |m: u64| -> Result<bool, ExactError> { Ok(self.passes_filter(m + r) && self.member(m + r)?) };
        match cands.par_iter().position_first(|&m| !matches!(check(m), Ok(false))) {
            Some(i) => {
                check(cands[i])?;
                Ok(Witness::Found(cands[i]))
            }
            None => Ok(Witness::NotFoundUpTo(bound)),
        }
    }

    /// Smallest `m ≤ bound` with `m, m + r ∈ E`.
    pub fn witness_search(&self, r: u64, bound: u64) -> Result<Witness, ExactError> {
        let mut lo = 1;
        while lo <= bound {
            let hi = (lo + SCAN_BLOCK - 1).min(bound);
            let check = |m: u64| -> Result<bool, ExactError> {
                Ok(self.passes_filter(m) && self.passes_filter(m + r) && self.member(m)? && self.member(m + r)?)
            };
            // first position that is a hit or an error, so failures are never skipped
            if let Some(m) = (lo..=hi)
                .into_par_iter()
                .find_first(|&m| !matches!(check(m), Ok(false)))
            {
                check(m)?;
                return Ok(Witness::Found(m));
            }
            lo = hi + 1;
        }
        Ok(Witness::NotFoundUpTo(bound))
    }
}

fn rational_filter(tests: &[NormTest]) -> Option<(u64, Vec<bool>)> {
    let rational: Vec<&NormTest> = tests.iter().filter(|t| t.is_rational()).collect();
    if rational.is_empty() {
        return None;
    }
    let mut q = 1u64;
    for t in &rational {
        q = q.lcm(&t.rational_period()?);
        if q > MAX_PERIOD {
            return None;
        }
    }
    let table = (0..q)
        .map(|m| rational.iter().all(|t| t.quick(m).unwrap_or(true)))
        .collect();
    Some((q, table))
}

impl fmt::Display for BohrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let freqs: Vec<String> = self.frequencies.iter().map(|e| e.to_string()).collect();
        let radii: Vec<String> = self.radii.iter().map(|d| d.to_string()).collect();
        write!(f, "freq=[{}];radii=[{}]", freqs.join(","), radii.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiffStatus {
    CertIn,
    CertOut,
    NeedWitness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    Found(u64),
    NotFoundUpTo(u64),
}

/// Sorted finite view of a set, with the horizon it was computed up to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedSet {
    elements: Vec<u64>,
    horizon: u64,
    provenance: String,
}

impl TruncatedSet {
    pub fn new(elements: Vec<u64>, horizon: u64, provenance: impl Into<String>) -> Result<Self, BohrError> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BohrError::Format("elements must be strictly increasing".into()));
        }
        if elements.first().is_some_and(|&x| x == 0) || elements.last().is_some_and(|&x| x > horizon) {
            return Err(BohrError::Format(format!("elements must lie in [1, {horizon}]")));
        }
        Ok(TruncatedSet {
            elements,
            horizon,
            provenance: provenance.into(),
        })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# spec={} N={}", self.provenance, self.horizon)?;
        for x in &self.elements {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, BohrError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| BohrError::Format("missing header".into()))?
            .map_err(|e| BohrError::Format(e.to_string()))?;
        let body = header
            .strip_prefix("# spec=")
            .ok_or_else(|| BohrError::Format("bad header".into()))?;
        let (spec, n) = body
            .rsplit_once(" N=")
            .ok_or_else(|| BohrError::Format("header lacks N=".into()))?;
        let horizon: u64 = n
            .trim()
            .parse()
            .map_err(|_| BohrError::Format(format!("bad horizon {n}")))?;
        let mut elements = Vec::new();
        for line in lines {
            let line = line.map_err(|e| BohrError::Format(e.to_string()))?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            elements.push(t.parse().map_err(|_| BohrError::Format(format!("bad element {t}")))?);
        }
        TruncatedSet::new(elements, horizon, spec)
    }
}
