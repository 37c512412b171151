//! Integer derivative-span combinations of generalized power sums, their
//! limit classification, integer polynomial shadows and joint intersectivity.
//!
//! Coefficients live in the field spanned by square roots of rationals
//! (`RadicalForm`), whose radicand basis is linearly independent over Q by
//! construction, so "coefficient is zero" is decided exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactreal::relation::lll_reduce;
use crate::exactreal::{eval_interval, ConstExpr, DyadicInterval, ExactError, RadicalForm};
use crate::hardy::HardyCombo;

pub type SymCoeff = RadicalForm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanError {
    #[error("constant {0} is outside the square-root-of-rational fragment")]
    UnsupportedConstant(String),
    #[error("unsupported generator shape: {0}")]
    UnsupportedShape(String),
    #[error("coefficient matrix has {got} rows, family has {expected} generators")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub fn sym_coeff(e: &ConstExpr) -> Result<SymCoeff, SpanError> {
    RadicalForm::from_expr(e).ok_or_else(|| SpanError::UnsupportedConstant(e.to_string()))
}

/// Generalized power sum: exponent ↦ nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gps {
    terms: BTreeMap<BigRational, SymCoeff>,
}

impl Gps {
    pub fn zero() -> Self {
        Gps::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BigRational, SymCoeff)>) -> Self {
        let mut g = Gps::zero();
        for (e, c) in terms {
            g.add_term(e, &c);
        }
        g
    }

    pub fn terms(&self) -> &BTreeMap<BigRational, SymCoeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &BigRational) -> SymCoeff {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, e: BigRational, c: &SymCoeff) {
        let slot = self.terms.entry(e.clone()).or_default();
        *slot = slot.add(c);
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add_scaled(&mut self, other: &Gps, k: i64) {
        if k == 0 {
            return;
        }
        let q = BigRational::from_integer(k.into());
        for (e, c) in &other.terms {
            self.add_term(e.clone(), &c.scale(&q));
        }
    }

    pub fn derivative(&self) -> Gps {
        let mut out = Gps::zero();
        for (e, c) in &self.terms {
            if !e.is_zero() {
                out.add_term(e - BigRational::one(), &c.scale(e));
            }
        }
        out
    }

    pub fn max_exponent(&self) -> Option<&BigRational> {
        self.terms.keys().next_back()
    }

    /// Exact symbolic value at a positive integer `t`.
    pub fn eval_at(&self, t: u64) -> ConstExpr {
        let mut acc = ConstExpr::zero();
        for (e, c) in &self.terms {
            acc = acc + c.to_expr() * power_expr(t, e);
        }
        acc
    }

    /// Enclosure of the value at `t`.
    pub fn enclose_at(&self, t: u64, bits: u32) -> Result<DyadicInterval, ExactError> {
        eval_interval(&self.eval_at(t), bits)
    }
}

/// `t^e` for a half-integer `e`.
fn power_expr(t: u64, e: &BigRational) -> ConstExpr {
    let twice = (e * BigRational::from_integer(2.into())).to_integer();
    let k = twice.to_i64().expect("small exponent");
    let tb = BigInt::from(t);
    let base = if k % 2 == 0 {
        ConstExpr::int(tb.pow((k.unsigned_abs() / 2) as u32))
    } else {
        ConstExpr::sqrt_int(tb.pow(k.unsigned_abs() as u32))
    };
    if k >= 0 {
        base
    } else {
        ConstExpr::one() / base
    }
}

impl fmt::Display for Gps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*t^({e})", c.to_expr())?;
        }
        Ok(())
    }
}

/// Generators, each a power sum with symbolic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenFamily {
    generators: Vec<Gps>,
}

impl GenFamily {
    pub fn new(generators: Vec<Gps>) -> Self {
        GenFamily { generators }
    }

    pub fn from_combos(combos: &[HardyCombo]) -> Result<Self, SpanError> {
        let generators = combos
            .iter()
            .map(|h| {
                let mut g = Gps::zero();
                for (c, e) in h.terms() {
                    g.add_term(e.clone(), &sym_coeff(c)?);
                }
                Ok(g)
            })
            .collect::<Result<_, SpanError>>()?;
        Ok(GenFamily { generators })
    }

    /// `t^{3/2}`, `λt^{3/2} + t`.
    pub fn f_family(lambda: &ConstExpr) -> Result<Self, SpanError> {
        Self::from_combos(&[HardyCombo::three_halves(), HardyCombo::lambda_plus_linear(lambda)])
    }

    /// `t^{3/2}`, `λt^{3/2} + L(t + ξ)`.
    pub fn g_family(lambda: &ConstExpr, l: &ConstExpr, xi: &ConstExpr) -> Result<Self, SpanError> {
        Self::from_combos(&[
            HardyCombo::three_halves(),
            HardyCombo::lambda_plus_affine(lambda, l, xi),
        ])
    }

    /// `t^{3/2}`, `λt^{3/2} + L(t + √2)`, `t²`.
    pub fn h_family(lambda: &ConstExpr, l: &ConstExpr) -> Result<Self, SpanError> {
        Self::from_combos(&[
            HardyCombo::three_halves(),
            HardyCombo::lambda_plus_affine(lambda, l, &ConstExpr::sqrt_int(2)),
            HardyCombo::square(),
        ])
    }

    pub fn generators(&self) -> &[Gps] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Radicands appearing in any coefficient: the constant basis in use.
    pub fn basis(&self) -> BTreeSet<BigInt> {
        self.generators
            .iter()
            .flat_map(|g| g.terms.values())
            .flat_map(|c| c.terms().map(|(r, _)| r.clone()))
            .collect()
    }

    fn derivatives(&self, order: usize) -> Vec<Vec<Gps>> {
        self.generators
            .iter()
            .map(|g| {
                let mut out = vec![g.clone()];
                for _ in 0..order {
                    let next = out.last().expect("nonempty").derivative();
                    out.push(next);
                }
                out
            })
            .collect()
    }
}

/// `Σ_{i,m} c[i][m]·g_i^{(m)}`.
pub fn integer_combination(fam: &GenFamily, coeffs: &[Vec<i64>]) -> Result<Gps, SpanError> {
    if coeffs.len() != fam.len() {
        return Err(SpanError::ShapeMismatch {
            expected: fam.len(),
            got: coeffs.len(),
        });
    }
    let max_order = coeffs.iter().map(|row| row.len()).max().unwrap_or(0);
    let ders = fam.derivatives(max_order.saturating_sub(1));
    let mut out = Gps::zero();
    for (i, row) in coeffs.iter().enumerate() {
        for (m, &c) in row.iter().enumerate() {
            out.add_scaled(&ders[i][m], c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "limit")]
pub enum LimitClass {
    ZeroFunction,
    LimitZero,
    LimitInfinity,
    /// The function tends to this nonzero constant.
    FiniteNonzero(String),
}

impl LimitClass {
    pub fn name(&self) -> &'static str {
        match self {
            LimitClass::ZeroFunction => "ZeroFunction",
            LimitClass::LimitZero => "LimitZero",
            LimitClass::LimitInfinity => "LimitInfinity",
            LimitClass::FiniteNonzero(_) => "FiniteNonzero",
        }
    }
}

pub fn classify_limit(g: &Gps) -> LimitClass {
    match g.max_exponent() {
        None => LimitClass::ZeroFunction,
        Some(e) if e.is_positive() => LimitClass::LimitInfinity,
        Some(e) if e.is_zero() => LimitClass::FiniteNonzero(g.coefficient(e).to_expr().to_string()),
        Some(_) => LimitClass::LimitZero,
    }
}

/// Category counts over every coefficient matrix with entries in
/// `[-bound, bound]` and derivative orders `0..=max_order`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExhaustiveCounts {
    pub zero_function: u128,
    pub limit_zero: u128,
    pub limit_infinity: u128,
    pub finite_nonzero: u128,
}

impl ExhaustiveCounts {
    pub fn total(&self) -> u128 {
        self.zero_function + self.limit_zero + self.limit_infinity + self.finite_nonzero
    }

    fn add(&mut self, e: Option<&BigRational>, count: u128) {
        match e {
            None => self.zero_function += count,
            Some(e) if e.is_positive() => self.limit_infinity += count,
            Some(e) if e.is_zero() => self.finite_nonzero += count,
            Some(_) => self.limit_zero += count,
        }
    }
}

type DpKey = (Vec<(BigRational, SymCoeff)>, Option<BigRational>);

/// Exhaustive classification by dynamic programming over derivative orders.
///
/// Orders are processed in turn; the state keeps the partial coefficients at
/// exponents that later orders can still change, plus the largest exponent
/// already settled with a nonzero coefficient. Matrices reaching the same
/// state are counted together, so the full `(2b+1)^{k(M+1)}` box is covered
/// without enumerating it.
pub fn exhaustive_classification(fam: &GenFamily, max_order: usize, bound: i64) -> ExhaustiveCounts {
    let k = fam.len();
    let ders = fam.derivatives(max_order);
    let touched: Vec<BTreeSet<BigRational>> = (0..=max_order)
        .map(|m| ders.iter().flat_map(|d| d[m].terms.keys().cloned()).collect())
        .collect();
    let width = (2 * bound + 1) as usize;
    let mut states: HashMap<DpKey, u128> = HashMap::new();
    states.insert((Vec::new(), None), 1);
    for m in 0..=max_order {
        let later: BTreeSet<&BigRational> = touched[m + 1..].iter().flatten().collect();
        let blocks: Vec<Gps> = (0..width.pow(k as u32))
            .map(|mut idx| {
                let mut g = Gps::zero();
                for d in &ders {
                    let c = (idx % width) as i64 - bound;
                    idx /= width;
                    g.add_scaled(&d[m], c);
                }
                g
            })
            .collect();
        let mut next: HashMap<DpKey, u128> = HashMap::new();
        for ((partial, best), count) in &states {
            for block in &blocks {
                let mut g = Gps::from_terms(partial.iter().cloned());
                g.add_scaled(block, 1);
                let mut best = best.clone();
                let mut keep = Vec::new();
                for (e, c) in g.terms {
                    if later.contains(&e) {
                        keep.push((e, c));
                    } else if best.as_ref().is_none_or(|b| e > *b) {
                        best = Some(e);
                    }
                }
                *next.entry((keep, best)).or_insert(0) += count;
            }
        }
        states = next;
    }
    let mut counts = ExhaustiveCounts::default();
    for ((partial, best), count) in states {
        debug_assert!(partial.is_empty());
        counts.add(best.as_ref(), count);
    }
    counts
}

/// Plain enumeration of the same box; only feasible for tiny boxes.
pub fn brute_force_classification(fam: &GenFamily, max_order: usize, bound: i64) -> ExhaustiveCounts {
    let k = fam.len();
    let width = (2 * bound + 1) as u64;
    let cells = (k * (max_order + 1)) as u32;
    let mut counts = ExhaustiveCounts::default();
    for mut idx in 0..width.pow(cells) {
        let mut coeffs = vec![vec![0i64; max_order + 1]; k];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = (idx % width) as i64 - bound;
                idx /= width;
            }
        }
        let g = integer_combination(fam, &coeffs).expect("shape");
        counts.add(g.max_exponent(), 1);
    }
    counts
}

/// Fraction-free Gauss–Jordan elimination; returns the reduced rows and the
/// pivot positions `(row, column)`.
fn gauss_jordan(mat: &[Vec<SymCoeff>], ncols: usize) -> (Vec<Vec<SymCoeff>>, Vec<(usize, usize)>) {
    let mut rows: Vec<Vec<SymCoeff>> = mat.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let p = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = x.mul(&p).sub(&y.mul(&f));
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    (rows, pivots)
}

/// Basis of the right null space over the coefficient field.
fn null_space(mat: &[Vec<SymCoeff>], ncols: usize) -> Vec<Vec<SymCoeff>> {
    let (rows, pivots) = gauss_jordan(mat, ncols);
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut x = vec![SymCoeff::zero(); ncols];
        x[f] = pivots
            .iter()
            .fold(SymCoeff::integer(1), |acc, &(r, c)| acc.mul(&rows[r][c]));
        for &(r, c) in &pivots {
            let others = pivots
                .iter()
                .filter(|&&(r2, _)| r2 != r)
                .fold(SymCoeff::integer(1), |acc, &(r2, c2)| acc.mul(&rows[r2][c2]));
            x[c] = rows[r][f].mul(&others).neg();
        }
        basis.push(x);
    }
    basis
}

fn rank(mat: &[Vec<SymCoeff>], ncols: usize) -> usize {
    gauss_jordan(mat, ncols).1.len()
}

/// Basis of `{z ∈ Z^n : C·z = 0}` by unimodular column reduction.
pub fn integer_kernel(c: &[Vec<BigRational>], n: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = c
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| (q * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // column j of the working matrix is (m[..][j]); u tracks the same operations
    let col_sub = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut().chain(u.iter_mut()) {
            let v = &row[src] * q;
            row[dst] -= v;
        }
    };
    let col_swap = |m: &mut Vec<Vec<BigInt>>, u: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut().chain(u.iter_mut()) {
            row.swap(a, b);
        }
    };
    let mut start = 0;
    for r in 0..m.len() {
        if start == n {
            break;
        }
        loop {
            let nz: Vec<usize> = (start..n).filter(|&j| !m[r][j].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    col_swap(&mut m, &mut u, start, j);
                    start += 1;
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&j| m[r][j].abs()).expect("nonempty");
            col_swap(&mut m, &mut u, start, piv);
            for j in start + 1..n {
                if !m[r][j].is_zero() {
                    let q = m[r][j].div_floor(&m[r][start]);
                    col_sub(&mut m, &mut u, j, start, &q);
                }
            }
        }
    }
    let mut basis: Vec<Vec<BigInt>> = (start..n)
        .map(|j| u.iter().map(|row| row[j].clone()).collect())
        .collect();
    if basis.len() > 1 {
        lll_reduce(&mut basis);
    }
    for v in basis.iter_mut() {
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    basis
}

/// Integer polynomial with coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl IntPoly {
    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn eval_mod(&self, n: u64, m: u64) -> u64 {
        let m_big = BigInt::from(m);
        let n_big = BigInt::from(n);
        let v = self
            .0
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc * &n_big + c).mod_floor(&m_big));
        v.to_u64().expect("reduced")
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            parts.push(match (c.is_one(), i) {
                (_, 0) => c.to_string(),
                (true, _) => mono,
                _ if *c == BigInt::from(-1) => format!("-{mono}"),
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `P_Z` as `{Σ c_j·b_j : c ∈ Z^r}`, minus `0` unless `includes_zero`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowDescription {
    pub basis: Vec<IntPoly>,
    pub includes_zero: bool,
    /// Generators whose real coefficient must vanish in every admissible combination.
    pub forced_zero_generators: Vec<usize>,
    pub description: String,
}

impl ShadowDescription {
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty() && !self.includes_zero
    }

    /// True when the set is exactly the nonzero integer multiples of `p`.
    pub fn is_nonzero_multiples_of(&self, p: &IntPoly) -> bool {
        !self.includes_zero && self.basis.len() == 1 && trim(&self.basis[0]) == trim(p)
    }
}

fn trim(p: &IntPoly) -> Vec<BigInt> {
    let mut v = p.0.clone();
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn describe(basis: &[IntPoly], includes_zero: bool) -> String {
    match (basis.len(), includes_zero) {
        (0, false) => "{}".to_string(),
        (0, true) => "{0}".to_string(),
        (1, z) => format!("{{c*({}) : c in Z{}}}", basis[0], if z { "" } else { ", c != 0" }),
        (_, z) => {
            let sum: Vec<String> = basis
                .iter()
                .enumerate()
                .map(|(j, b)| format!("c{}*({b})", j + 1))
                .collect();
            format!(
                "{{{} : c in Z^{}{}}}",
                sum.join(" + "),
                basis.len(),
                if z { "" } else { ", c != 0" }
            )
        }
    }
}

const SHADOW_DEGREE: usize = 2;

/// Integer polynomials `q` with `Σ a_i g_i − q → 0` for some real `a ≠ 0`.
///
/// Generators must be `α·t^{3/2}` plus a polynomial of degree ≤ 2. The
/// `t^{3/2}` part has to cancel, the surviving polynomial must lie in the
/// real span `V` of the admissible polynomial parts, and `V ∩ Z³` is found
/// by splitting the equations of `V` along the radical basis.
pub fn poly_shadow(fam: &GenFamily) -> Result<ShadowDescription, SpanError> {
    let k = fam.len();
    let three_halves = BigRational::new(3.into(), 2.into());
    let mut alpha = Vec::with_capacity(k);
    let mut polys = Vec::with_capacity(k);
    for g in fam.generators() {
        let mut p = vec![SymCoeff::zero(); SHADOW_DEGREE + 1];
        for (e, c) in g.terms() {
            if *e == three_halves {
                continue;
            }
            let d = (e.is_integer() && !e.is_negative())
                .then(|| e.to_integer().to_usize())
                .flatten();
            match d {
                Some(d) if d <= SHADOW_DEGREE => p[d] = c.clone(),
                _ => return Err(SpanError::UnsupportedShape(format!("exponent {e} in {g}"))),
            }
        }
        alpha.push(g.coefficient(&three_halves));
        polys.push(p);
    }
    let n = SHADOW_DEGREE + 1;
    // w ⊥ V  ⟺  P·w ∈ span(α)  ⟺  (w, μ) ∈ ker [P | −α]
    let stacked: Vec<Vec<SymCoeff>> = (0..k)
        .map(|i| {
            polys[i]
                .iter()
                .cloned()
                .chain(std::iter::once(alpha[i].neg()))
                .collect()
        })
        .collect();
    let perp: Vec<Vec<SymCoeff>> = null_space(&stacked, n + 1)
        .into_iter()
        .map(|v| v[..n].to_vec())
        .collect();
    let mut constraints: Vec<Vec<BigRational>> = Vec::new();
    for w in &perp {
        let radicands: BTreeSet<BigInt> = w.iter().flat_map(|c| c.terms().map(|(r, _)| r.clone())).collect();
        for r in radicands {
            constraints.push(w.iter().map(|c| c.coefficient(&r)).collect());
        }
    }
    let lattice = integer_kernel(&constraints, n);
    let with_alpha: Vec<Vec<SymCoeff>> = (0..k)
        .map(|i| {
            polys[i]
                .iter()
                .cloned()
                .chain(std::iter::once(alpha[i].clone()))
                .collect()
        })
        .collect();
    let includes_zero = rank(&with_alpha, n + 1) < k;
    // admissible a: α·a = 0 and C·Pᵀ·a = 0
    let mut rows = vec![alpha.clone()];
    for c in &constraints {
        rows.push(
            (0..k)
                .map(|i| {
                    polys[i]
                        .iter()
                        .zip(c)
                        .fold(SymCoeff::zero(), |acc, (p, q)| acc.add(&p.scale(q)))
                })
                .collect(),
        );
    }
    let admissible = null_space(&rows, k);
    let forced_zero_generators = (0..k).filter(|&i| admissible.iter().all(|v| v[i].is_zero())).collect();
    let basis: Vec<IntPoly> = lattice.into_iter().map(IntPoly).collect();
    let description = describe(&basis, includes_zero);
    Ok(ShadowDescription {
        basis,
        includes_zero,
        forced_zero_generators,
        description,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusResult {
    pub modulus: u64,
    /// Smallest-preference witness: `n = m` first, then `1..m`.
    pub witness: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectivityReport {
    pub moduli: Vec<ModulusResult>,
    pub first_failure: Option<u64>,
}

impl IntersectivityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Common roots of `polys` modulo every `m ≤ max_modulus`. A lattice family
/// is checked through its basis: a common root of the basis is a common root
/// of every member, and each basis element is itself a member.
pub fn joint_intersective_check(polys: &[IntPoly], max_modulus: u64) -> IntersectivityReport {
    let mut moduli = Vec::new();
    let mut first_failure = None;
    for m in 1..=max_modulus {
        let root = |n: u64| polys.iter().all(|p| p.eval_mod(n, m) == 0);
        let witness = std::iter::once(m).chain(1..m).find(|&n| root(n));
        if witness.is_none() && first_failure.is_none() {
            first_failure = Some(m);
        }
        moduli.push(ModulusResult { modulus: m, witness });
    }
    IntersectivityReport { moduli, first_failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::parse_const;

    fn c(s: &str) -> ConstExpr {
        parse_const(s).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn f_fam() -> GenFamily {
        GenFamily::f_family(&c("sqrt(2)")).unwrap()
    }

    fn g_fam() -> GenFamily {
        GenFamily::g_family(&c("sqrt(2)"), &c("6"), &c("sqrt(2)")).unwrap()
    }

    #[test]
    fn integer_combination_examples() {
        let fam = f_fam();
        let g = integer_combination(&fam, &[vec![1], vec![0]]).unwrap();
        assert_eq!(g, Gps::from_terms([(q(3, 2), SymCoeff::integer(1))]));
        let g = integer_combination(&fam, &[vec![0, 0], vec![0, 1]]).unwrap();
        let want = Gps::from_terms([
            (q(1, 2), sym_coeff(&c("3/2*sqrt(2)")).unwrap()),
            (q(0, 1), SymCoeff::integer(1)),
        ]);
        assert_eq!(g, want);
        let g = integer_combination(&fam, &[vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        assert_eq!(g, Gps::from_terms([(q(-1, 2), SymCoeff::rational(q(3, 4)))]));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_limit(&Gps::zero()), LimitClass::ZeroFunction);
        let g = Gps::from_terms([(q(3, 2), sym_coeff(&c("1+sqrt(2)")).unwrap())]);
        assert_eq!(classify_limit(&g), LimitClass::LimitInfinity);
        let g = Gps::from_terms([
            (q(-1, 2), SymCoeff::rational(q(3, 4))),
            (q(-3, 2), SymCoeff::rational(q(-3, 8))),
        ]);
        assert_eq!(classify_limit(&g), LimitClass::LimitZero);
        let g = Gps::from_terms([(q(0, 1), SymCoeff::integer(6))]);
        assert_eq!(classify_limit(&g), LimitClass::FiniteNonzero("6".into()));
    }

    #[test]
    fn cancellation_needs_the_irrational_coefficient() {
        // with a rational λ the leading term can cancel and leave a constant
        let fam = GenFamily::f_family(&c("1")).unwrap();
        let g = integer_combination(&fam, &[vec![-1, 0], vec![1, 0]]).unwrap();
        assert_eq!(classify_limit(&g), LimitClass::LimitInfinity);
        let g = integer_combination(&fam, &[vec![0, -1], vec![0, 1]]).unwrap();
        assert_eq!(classify_limit(&g), LimitClass::FiniteNonzero("1".into()));
    }

    #[test]
    fn dp_matches_brute_force_on_small_boxes() {
        for fam in [f_fam(), g_fam(), GenFamily::f_family(&c("1")).unwrap()] {
            for (order, bound) in [(0, 3), (1, 2), (2, 2), (3, 1)] {
                let dp = exhaustive_classification(&fam, order, bound);
                let bf = brute_force_classification(&fam, order, bound);
                assert_eq!(dp, bf, "order {order} bound {bound}");
            }
        }
    }

    #[test]
    fn rational_lambda_produces_finite_limits() {
        let fam = GenFamily::f_family(&c("1")).unwrap();
        assert!(exhaustive_classification(&fam, 3, 2).finite_nonzero > 0);
    }

    #[test]
    fn gps_evaluation() {
        let g = Gps::from_terms([(q(3, 2), SymCoeff::integer(1)), (q(-1, 2), SymCoeff::integer(2))]);
        let iv = g.enclose_at(100, 64).unwrap();
        assert!(iv.contains_rational(&q(5001, 5)));
    }

    #[test]
    fn shadow_examples() {
        let lambda = c("sqrt(2)");
        let h = GenFamily::h_family(&lambda, &c("6")).unwrap();
        let s = poly_shadow(&h).unwrap();
        let t2 = IntPoly::from_i64(&[0, 0, 1]);
        assert!(s.is_nonzero_multiples_of(&t2), "{}", s.description);
        assert_eq!(s.forced_zero_generators, vec![0, 1]);
        assert_eq!(s.description, "{c*(t^2) : c in Z, c != 0}");

        let h1 = GenFamily::from_combos(&[HardyCombo::three_halves()]).unwrap();
        assert!(poly_shadow(&h1).unwrap().is_empty());

        let h3 = GenFamily::from_combos(&[HardyCombo::square()]).unwrap();
        assert!(poly_shadow(&h3).unwrap().is_nonzero_multiples_of(&t2));

        let h12 = GenFamily::from_combos(&[
            HardyCombo::three_halves(),
            HardyCombo::lambda_plus_affine(&lambda, &c("6"), &c("sqrt(2)")),
        ])
        .unwrap();
        let s = poly_shadow(&h12).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.forced_zero_generators, vec![0, 1]);
    }

    #[test]
    fn shadow_with_rational_shift_keeps_linear_part() {
        // λt^{3/2} + 6(t + 1/2) with t^{3/2}: q = b·(6t + 3), b ∈ Z/3 ⇒ multiples of 2t + 1
        let fam = GenFamily::from_combos(&[
            HardyCombo::three_halves(),
            HardyCombo::lambda_plus_affine(&c("sqrt(2)"), &c("6"), &c("1/2")),
        ])
        .unwrap();
        let s = poly_shadow(&fam).unwrap();
        assert!(
            s.is_nonzero_multiples_of(&IntPoly::from_i64(&[1, 2])),
            "{}",
            s.description
        );
    }

    #[test]
    fn shadow_rejects_other_exponents() {
        let fam = GenFamily::new(vec![Gps::from_terms([(q(1, 2), SymCoeff::integer(1))])]);
        assert!(matches!(poly_shadow(&fam), Err(SpanError::UnsupportedShape(_))));
    }

    #[test]
    fn zero_combination_is_tracked() {
        // two copies of t^{3/2}: g1 − g2 = 0 is a nonzero tuple giving q = 0
        let fam = GenFamily::from_combos(&[HardyCombo::three_halves(), HardyCombo::three_halves()]).unwrap();
        let s = poly_shadow(&fam).unwrap();
        assert!(s.includes_zero && s.basis.is_empty());
        assert_eq!(s.description, "{0}");
    }

    #[test]
    fn intersectivity_examples() {
        let rep = joint_intersective_check(&[IntPoly::from_i64(&[0, 0, 1])], 100);
        assert!(rep.passed());
        assert!(rep.moduli.iter().all(|r| r.witness == Some(r.modulus)));

        let rep = joint_intersective_check(&[IntPoly::from_i64(&[1, 1])], 5);
        assert!(rep.passed());
        assert_eq!(rep.moduli[4].witness, Some(4));

        let rep = joint_intersective_check(&[IntPoly::from_i64(&[1, 2])], 2);
        assert_eq!(rep.first_failure, Some(2));
    }

    #[test]
    fn integer_kernel_basics() {
        let rows = vec![vec![q(1, 1), q(0, 1), q(0, 1)], vec![q(0, 1), q(-1, 1), q(0, 1)]];
        assert_eq!(
            integer_kernel(&rows, 3),
            vec![vec![BigInt::zero(), BigInt::zero(), BigInt::one()]]
        );
        let rows = vec![vec![q(2, 1), q(3, 1)]];
        let k = integer_kernel(&rows, 2);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] * 2 + &k[0][1] * 3, BigInt::zero());
        assert_eq!(k[0][0].abs(), BigInt::from(3));
    }
}
