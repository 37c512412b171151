//! Configuration-driven pipelines and their JSON reports.

mod pipelines;

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bohr::{BohrError, RELATION_BITS, RELATION_BOUND};
use crate::certify::CertifyError;
use crate::exactreal::relation::find_small_relation;
use crate::exactreal::{
    compare_exprs, eval_interval, parse_const, torus_norm_expr, Comparison, ConstExpr, ExactError, RadicalForm,
    DEFAULT_CAP_BITS,
};
use crate::hardy::HardyError;
use crate::largeness::LargenessError;
use crate::returnsets::ReturnError;
use crate::span::SpanError;

pub use pipelines::{
    reproduce_thm_empty, reproduce_thm_main, reproduce_thm_q65, run_custom, synthetic_agreement, SyntheticAgreement,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("constraint violated: {constraint} ({detail})")]
    ConstraintViolated { constraint: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Bohr(#[from] BohrError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Return(#[from] ReturnError),
    #[error(transparent)]
    Largeness(#[from] LargenessError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    ThmMain,
    ThmEmpty,
    ThmQ65,
    Custom,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ThmMain => "thm-main",
            ExperimentId::ThmEmpty => "thm-empty",
            ExperimentId::ThmQ65 => "thm-q65",
            ExperimentId::Custom => "custom",
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| ExperimentError::Config(format!("unknown experiment {s}")))
    }
}

/// Constants as expression strings; unused ones are ignored by a pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub lambda: String,
    pub xi: String,
    #[serde(rename = "L")]
    pub l: String,
    pub delta: String,
    pub beta: String,
    pub eta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizons {
    /// Horizon for the density of `E`.
    pub n_set: u64,
    /// Range of `n` for the return table.
    pub n_range: [u64; 2],
    pub witness_bound: u64,
    /// Scan cap for `B ∩ T`.
    pub bt_cap: u64,
    pub h_max: u64,
    pub thick_h: u64,
    pub thick_cap: u64,
    pub span_order: usize,
    pub span_bound: i64,
    pub modulus_max: u64,
    pub synthetic_instances: u64,
    pub synthetic_bound: u64,
    pub weyl_n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomFunction {
    /// `(coefficient, exponent)` pairs, both expression strings.
    pub terms: Vec<[String; 2]>,
    pub rounding: crate::hardy::Rounding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub frequencies: Vec<String>,
    pub radii: Vec<String>,
    pub independent: bool,
    pub functions: Vec<CustomFunction>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub report: Option<PathBuf>,
    /// Directory for CSV/JSONL dumps of the enumerated sets.
    pub dump_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub constants: Constants,
    pub horizons: Horizons,
    pub cap_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSpec>,
    #[serde(default)]
    pub output: Output,
}

fn s(x: &str) -> String {
    x.to_string()
}

impl ExperimentConfig {
    pub fn defaults(id: ExperimentId) -> Self {
        let empty_like = matches!(id, ExperimentId::ThmEmpty | ExperimentId::ThmQ65);
        let constants = Constants {
            lambda: s("sqrt(2)"),
            xi: s("sqrt(2)"),
            l: s("6"),
            delta: if empty_like { s("1/512") } else { s("3/64") },
            beta: if empty_like { s("1/6") } else { s("sqrt(3)/4096") },
            eta: s("23/512"),
        };
        let horizons = Horizons {
            n_set: 1_000_000,
            n_range: if empty_like { [1, 10_000] } else { [1, 100_000] },
            witness_bound: 10_000_000,
            bt_cap: 100_000_000,
            h_max: 1_000_000,
            thick_h: 10,
            thick_cap: 1_000_000,
            span_order: 5,
            span_bound: 10,
            modulus_max: 100,
            synthetic_instances: 1000,
            synthetic_bound: 1_000_000,
            weyl_n: 1_000_000,
        };
        let custom = (id == ExperimentId::Custom).then(|| CustomSpec {
            frequencies: vec![s("sqrt(3)/4096"), s("sqrt(6)/4096")],
            radii: vec![s("3/64"), s("3/64")],
            independent: true,
            functions: vec![
                CustomFunction {
                    terms: vec![[s("1"), s("3/2")]],
                    rounding: crate::hardy::Rounding::Floor,
                },
                CustomFunction {
                    terms: vec![[s("sqrt(2)"), s("3/2")], [s("1"), s("1")]],
                    rounding: crate::hardy::Rounding::Floor,
                },
            ],
        });
        let horizons = if id == ExperimentId::Custom {
            Horizons {
                n_range: [1, 10_000],
                witness_bound: 1_000_000,
                ..horizons
            }
        } else {
            horizons
        };
        ExperimentConfig {
            experiment: id,
            constants,
            horizons,
            cap_bits: DEFAULT_CAP_BITS,
            custom,
            output: Output::default(),
        }
    }

    /// Parses a possibly partial config; missing keys take the defaults of
    /// the named experiment.
    pub fn from_json_str(text: &str) -> Result<Self, ExperimentError> {
        let user: Value = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        let id: ExperimentId = user
            .get("experiment")
            .cloned()
            .ok_or_else(|| ExperimentError::Config("missing \"experiment\"".into()))
            .and_then(|v| serde_json::from_value(v).map_err(|e| ExperimentError::Config(e.to_string())))?;
        let mut base = serde_json::to_value(Self::defaults(id)).expect("config serializes");
        merge(&mut base, user);
        serde_json::from_value(base).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ExperimentError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Constants of a config, parsed.
#[derive(Clone, Debug)]
pub(crate) struct Resolved {
    pub lambda: ConstExpr,
    pub xi: ConstExpr,
    pub l: ConstExpr,
    pub delta: BigRational,
    pub beta: ConstExpr,
    pub eta: BigRational,
}

fn parse_field(name: &str, text: &str) -> Result<ConstExpr, ExperimentError> {
    parse_const(text).map_err(|e| ExperimentError::Config(format!("{name}: {e}")))
}

fn rational_field(name: &str, text: &str) -> Result<BigRational, ExperimentError> {
    parse_field(name, text)?
        .as_literal()
        .ok_or_else(|| ExperimentError::Config(format!("{name} must be a rational literal, got {text}")))
}

impl Resolved {
    pub fn from_constants(c: &Constants) -> Result<Self, ExperimentError> {
        Ok(Resolved {
            lambda: parse_field("lambda", &c.lambda)?,
            xi: parse_field("xi", &c.xi)?,
            l: parse_field("L", &c.l)?,
            delta: rational_field("delta", &c.delta)?,
            beta: parse_field("beta", &c.beta)?,
            eta: rational_field("eta", &c.eta)?,
        })
    }
}

/// One certified inequality `lhs < rhs` (or an equality / a decided fact).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: String,
    /// Enclosure of `rhs − lhs`.
    pub margin: Option<[String; 2]>,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub constraints: Vec<Constraint>,
}

impl ConstraintReport {
    pub fn all_hold(&self) -> bool {
        self.constraints.iter().all(|c| c.holds)
    }

    fn first_failure(&self) -> Option<&Constraint> {
        self.constraints.iter().find(|c| !c.holds)
    }

    fn less(&mut self, name: &str, lhs: ConstExpr, rhs: ConstExpr, cap_bits: u32) -> Result<(), ExactError> {
        let cmp = compare_exprs(&lhs, &rhs, cap_bits)?;
        let m = eval_interval(&(&rhs - &lhs), 64)?;
        self.constraints.push(Constraint {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: verdict_name(cmp).into(),
            margin: Some([m.lo().to_string(), m.hi().to_string()]),
            holds: cmp == Comparison::Below,
        });
        Ok(())
    }

    fn equal(&mut self, name: &str, lhs: ConstExpr, rhs: ConstExpr, cap_bits: u32) -> Result<(), ExactError> {
        let cmp = compare_exprs(&lhs, &rhs, cap_bits)?;
        self.constraints.push(Constraint {
            name: name.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: verdict_name(cmp).into(),
            margin: None,
            holds: cmp == Comparison::Equal,
        });
        Ok(())
    }

    fn fact(&mut self, name: &str, subject: String, verdict: &str, holds: bool) {
        self.constraints.push(Constraint {
            name: name.into(),
            lhs: subject,
            rhs: String::new(),
            verdict: verdict.into(),
            margin: None,
            holds,
        });
    }

    /// No relation `a_0 + Σ a_i x_i = 0` with `|a| ≤` the search bound.
    fn independent(&mut self, name: &str, xs: &[ConstExpr]) -> Result<(), ExactError> {
        let mut vals = vec![ConstExpr::one()];
        vals.extend(xs.iter().cloned());
        let rel = find_small_relation(&vals, RELATION_BOUND, RELATION_BITS)?;
        let subject = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match rel {
            None => self.fact(name, subject, "NO_SMALL_RELATION", true),
            Some(r) => {
                let r: Vec<String> = r.iter().map(|a| a.to_string()).collect();
                self.fact(name, subject, &format!("RELATION[{}]", r.join(",")), false)
            }
        }
        Ok(())
    }

    fn irrational(&mut self, name: &str, x: &ConstExpr) -> Result<(), ExactError> {
        match RadicalForm::from_expr(x) {
            Some(f) => {
                let rational = f.as_rational().is_some();
                self.fact(
                    name,
                    x.to_string(),
                    if rational { "RATIONAL" } else { "IRRATIONAL" },
                    !rational,
                );
                Ok(())
            }
            None => self.independent(name, std::slice::from_ref(x)),
        }
    }
}

fn verdict_name(c: Comparison) -> &'static str {
    match c {
        Comparison::Below => "BELOW",
        Comparison::Above => "ABOVE",
        Comparison::Equal => "EQUAL",
        Comparison::Unknown => "UNKNOWN",
    }
}

/// `|x|`, deciding the sign exactly.
pub fn abs_expr(x: &ConstExpr, cap_bits: u32) -> Result<ConstExpr, ExactError> {
    Ok(
        if compare_exprs(x, &ConstExpr::zero(), cap_bits)? == Comparison::Below {
            -x
        } else {
            x.clone()
        },
    )
}

pub(crate) fn max_expr(a: &ConstExpr, b: &ConstExpr, cap_bits: u32) -> Result<ConstExpr, ExactError> {
    Ok(if compare_exprs(a, b, cap_bits)?.is_below() {
        b.clone()
    } else {
        a.clone()
    })
}

/// Quantities derived from the constants of an emptiness experiment.
#[derive(Clone, Debug)]
pub(crate) struct EmptyParams {
    pub beta: ConstExpr,
    pub rho: ConstExpr,
    pub d_bar: ConstExpr,
}

pub(crate) fn empty_params(r: &Resolved, cap_bits: u32) -> Result<EmptyParams, ExactError> {
    Ok(EmptyParams {
        beta: ConstExpr::one() / &r.l,
        rho: torus_norm_expr(&r.xi, cap_bits)?,
        d_bar: ConstExpr::one() + abs_expr(&r.lambda, cap_bits)?,
    })
}

/// Certifies every parameter constraint of the configured experiment.
pub fn validate_params(cfg: &ExperimentConfig) -> Result<ConstraintReport, ExperimentError> {
    let cap = cfg.cap_bits;
    let mut rep = ConstraintReport::default();
    let zero = ConstExpr::zero;
    let q = |p: i64, d: i64| ConstExpr::rational(BigRational::new(p.into(), d.into()));
    match cfg.experiment {
        ExperimentId::ThmMain => {
            let r = Resolved::from_constants(&cfg.constants)?;
            let delta = ConstExpr::rational(r.delta.clone());
            let eta = ConstExpr::rational(r.eta.clone());
            let abs_l = abs_expr(&r.lambda, cap)?;
            rep.less("0 < delta", zero(), delta.clone(), cap)?;
            rep.less("delta < 1/20", delta.clone(), q(1, 20), cap)?;
            rep.less("0 < beta", zero(), r.beta.clone(), cap)?;
            rep.less(
                "beta < delta/(1+|lambda|)",
                r.beta.clone(),
                &delta / (ConstExpr::one() + &abs_l),
                cap,
            )?;
            rep.less("0 < eta", zero(), eta.clone(), cap)?;
            let m = max_expr(&ConstExpr::one(), &abs_l, cap)?;
            rep.less(
                "2*eta + max(1,|lambda|)*beta < 2*delta",
                ConstExpr::int(2) * &eta + m * &r.beta,
                ConstExpr::int(2) * &delta,
                cap,
            )?;
            rep.less("5*delta < 1/4", ConstExpr::int(5) * &delta, q(1, 4), cap)?;
            rep.irrational("lambda irrational", &r.lambda)?;
            rep.independent(
                "1, beta, lambda*beta independent",
                &[r.beta.clone(), &r.lambda * &r.beta],
            )?;
        }
        ExperimentId::ThmEmpty | ExperimentId::ThmQ65 => {
            let r = Resolved::from_constants(&cfg.constants)?;
            let delta = ConstExpr::rational(r.delta.clone());
            let l_int = r.l.as_literal().filter(|x| x.is_integer() && x.is_positive());
            rep.fact(
                "L positive integer",
                r.l.to_string(),
                if l_int.is_some() { "INTEGER" } else { "NOT_INTEGER" },
                l_int.is_some(),
            );
            if l_int.is_none() {
                return Err(violated(&rep));
            }
            if cfg.experiment == ExperimentId::ThmQ65 {
                rep.equal("xi = sqrt(2)", r.xi.clone(), ConstExpr::sqrt_int(2), cap)?;
            }
            let p = empty_params(&r, cap)?;
            rep.equal("beta = 1/L", r.beta.clone(), p.beta.clone(), cap)?;
            rep.irrational("lambda irrational", &r.lambda)?;
            rep.less("0 < ||xi||", zero(), p.rho.clone(), cap)?;
            rep.less("1+|lambda| < L*||xi||", p.d_bar.clone(), &r.l * &p.rho, cap)?;
            rep.less("0 < delta", zero(), delta.clone(), cap)?;
            rep.less(
                "delta < (rho - beta*D)/4",
                delta,
                (&p.rho - &p.beta * &p.d_bar) / ConstExpr::int(4),
                cap,
            )?;
            rep.independent("1, lambda/L independent", &[&r.lambda / &r.l])?;
        }
        ExperimentId::Custom => {
            let spec = cfg
                .custom
                .as_ref()
                .ok_or_else(|| ExperimentError::Config("custom experiment needs \"custom\"".into()))?;
            for (i, d) in spec.radii.iter().enumerate() {
                let d = rational_field("radius", d)?;
                rep.less(&format!("0 < radius[{i}]"), zero(), ConstExpr::rational(d.clone()), cap)?;
                rep.less(&format!("radius[{i}] < 1/2"), ConstExpr::rational(d), q(1, 2), cap)?;
            }
            if spec.independent {
                let irr: Vec<ConstExpr> = spec
                    .frequencies
                    .iter()
                    .map(|f| parse_field("frequency", f))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .filter(|f| RadicalForm::from_expr(f).is_none_or(|x| x.as_rational().is_none()))
                    .collect();
                if !irr.is_empty() {
                    rep.independent("1, irrational frequencies independent", &irr)?;
                }
            }
        }
    }
    if rep.all_hold() {
        Ok(rep)
    } else {
        Err(violated(&rep))
    }
}

fn violated(rep: &ConstraintReport) -> ExperimentError {
    let c = rep.first_failure().expect("called on a failing report");
    ExperimentError::ConstraintViolated {
        constraint: c.name.clone(),
        detail: format!("{} vs {}: {}", c.lhs, c.rhs, c.verdict),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Runtime {
    pub timestamp: u64,
    pub version: &'static str,
}

impl Runtime {
    fn now() -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Runtime {
            timestamp,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Outcome of one named assertion of a pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub clause: String,
    pub status: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    pub verdict: Verdict,
    pub params: Value,
    pub constraints: ConstraintReport,
    pub density: Value,
    pub return_sets: Value,
    pub largeness: Value,
    pub certificates: Value,
    pub checks: Vec<Check>,
    pub violations: Vec<String>,
    pub runtime: Runtime,
}

impl ExperimentReport {
    pub(crate) fn assemble(
        cfg: &ExperimentConfig,
        constraints: ConstraintReport,
        density: Value,
        return_sets: Value,
        largeness: Value,
        certificates: Value,
        checks: Vec<Check>,
    ) -> Self {
        let violations: Vec<String> = checks
            .iter()
            .filter(|c| c.status == Verdict::Violated)
            .map(|c| format!("{}: {}", c.clause, c.detail))
            .collect();
        let verdict = if !violations.is_empty() {
            Verdict::Violated
        } else if checks.iter().any(|c| c.status == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        ExperimentReport {
            experiment: cfg.experiment,
            verdict,
            params: params_section(cfg),
            constraints,
            density,
            return_sets,
            largeness,
            certificates,
            checks,
            violations,
            runtime: Runtime::now(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn check(&self, clause: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.clause == clause)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with the timestamp zeroed, for reproducibility comparisons.
    pub fn without_timestamp(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["runtime"]["timestamp"] = json!(0);
        v
    }
}

fn enclosure(e: &str) -> Value {
    match parse_const(e).and_then(|x| eval_interval(&x, 64)) {
        Ok(iv) => json!({ "expr": e, "enclosure": [iv.lo().to_string(), iv.hi().to_string()] }),
        Err(err) => json!({ "expr": e, "error": err.to_string() }),
    }
}

fn params_section(cfg: &ExperimentConfig) -> Value {
    let c = &cfg.constants;
    json!({
        "constants": {
            "lambda": enclosure(&c.lambda),
            "xi": enclosure(&c.xi),
            "L": enclosure(&c.l),
            "delta": enclosure(&c.delta),
            "beta": enclosure(&c.beta),
            "eta": enclosure(&c.eta),
        },
        "horizons": cfg.horizons,
        "cap_bits": cfg.cap_bits,
        "custom": cfg.custom,
    })
}

pub(crate) fn ratio_json(num: &BigRational, den: &BigRational) -> Value {
    let r = if den.is_zero() { BigRational::zero() } else { num / den };
    json!({
        "value": num.to_string(),
        "reference": den.to_string(),
        "ratio": r.to_string(),
        "ratio_f64": rational_f64(&r),
    })
}

pub(crate) fn rational_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn within(num: &BigRational, den: &BigRational, tol: (i64, i64)) -> bool {
    if den.is_zero() {
        return num.is_zero();
    }
    let dev = (num / den - BigRational::one()).abs();
    dev <= BigRational::new(BigInt::from(tol.0), BigInt::from(tol.1))
}

/// Runs the configured pipeline.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    match cfg.experiment {
        ExperimentId::ThmMain => reproduce_thm_main(cfg),
        ExperimentId::ThmEmpty => reproduce_thm_empty(cfg),
        ExperimentId::ThmQ65 => reproduce_thm_q65(cfg),
        ExperimentId::Custom => run_custom(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for id in [
            ExperimentId::ThmMain,
            ExperimentId::ThmEmpty,
            ExperimentId::ThmQ65,
            ExperimentId::Custom,
        ] {
            let rep = validate_params(&ExperimentConfig::defaults(id)).unwrap();
            assert!(rep.all_hold(), "{id:?}");
        }
    }

    #[test]
    fn empty_margin_matches_hand_value() {
        let rep = validate_params(&ExperimentConfig::defaults(ExperimentId::ThmEmpty)).unwrap();
        let c = rep
            .constraints
            .iter()
            .find(|c| c.name == "delta < (rho - beta*D)/4")
            .unwrap();
        // (√2 − 1 − (1+√2)/6)/4 − 1/512
        let want = ((2f64.sqrt() - 1.0) - (1.0 + 2f64.sqrt()) / 6.0) / 4.0 - 1.0 / 512.0;
        let m = c.margin.as_ref().unwrap();
        let lo: f64 = parse_const(&m[0])
            .ok()
            .and_then(|e| e.as_literal())
            .map(|q| rational_f64(&q))
            .unwrap();
        assert!((lo - want).abs() < 1e-12);
    }

    #[test]
    fn violated_constraints_are_named() {
        let mut cfg = ExperimentConfig::defaults(ExperimentId::ThmMain);
        cfg.constants.delta = "1/10".into();
        match validate_params(&cfg) {
            Err(ExperimentError::ConstraintViolated { constraint, .. }) => assert_eq!(constraint, "delta < 1/20"),
            other => panic!("{other:?}"),
        }
        let mut cfg = ExperimentConfig::defaults(ExperimentId::ThmEmpty);
        cfg.constants.l = "5".into();
        cfg.constants.beta = "1/5".into();
        match validate_params(&cfg) {
            Err(ExperimentError::ConstraintViolated { constraint, .. }) => {
                assert_eq!(constraint, "1+|lambda| < L*||xi||")
            }
            other => panic!("{other:?}"),
        }
        let mut cfg = ExperimentConfig::defaults(ExperimentId::ThmMain);
        cfg.constants.beta = "sqrt(2)/4096".into();
        match validate_params(&cfg) {
            Err(ExperimentError::ConstraintViolated { constraint, .. }) => {
                assert_eq!(constraint, "1, beta, lambda*beta independent")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partial_config_merges_defaults() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"experiment":"thm-empty","constants":{"delta":"1/1024"},"horizons":{"n_range":[1,50]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.constants.delta, "1/1024");
        assert_eq!(cfg.constants.l, "6");
        assert_eq!(cfg.horizons.n_range, [1, 50]);
        assert_eq!(cfg.horizons.witness_bound, 10_000_000);
        assert!(ExperimentConfig::from_json_str(r#"{"experiment":"thm-main","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"constants":{}}"#).is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig::defaults(ExperimentId::Custom);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&text).unwrap(), cfg);
    }
}
