use std::fs::File;
use std::io::BufWriter;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    empty_params, ratio_json, rational_f64, validate_params, within, Check, ConstraintReport, ExperimentConfig,
    ExperimentError, ExperimentReport, Resolved, Verdict,
};
use crate::bohr::{BohrSpec, DiffStatus, TruncatedSet, Witness};
use crate::certify::{
    check_empty_cert, find_nonthick_h, find_thick_interval, verify_inclusion, weyl_sum, CertifyError, EmptyCert,
};
use crate::exactreal::fixed::ScaledRootTest;
use crate::exactreal::{parse_const, ConstExpr, ExactError};
use crate::hardy::{HardyCombo, IterateSeq, Polynomial, Rounding};
use crate::largeness::{full_profile, run_gap_profile};
use crate::returnsets::{return_table_with, Mode, ReturnTable, Status};
use crate::span::{exhaustive_classification, joint_intersective_check, poly_shadow, GenFamily, IntPoly};

const BT_BLOCK: u64 = 1 << 22;
const HEAD: usize = 50;
const WINDOW_PROBES: [u64; 3] = [10, 100, 1000];

fn check(clause: &str, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        clause: clause.into(),
        status: if ok { Verdict::Pass } else { Verdict::Violated },
        detail: detail.into(),
    }
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn prefix(set: &TruncatedSet, n: u64) -> TruncatedSet {
    let end = set.elements().partition_point(|&x| x <= n);
    TruncatedSet::new(set.elements()[..end].to_vec(), n, set.provenance()).expect("prefix of a valid set")
}

fn dump<F>(cfg: &ExperimentConfig, name: &str, write: F) -> Result<(), ExperimentError>
where
    F: FnOnce(BufWriter<File>) -> std::io::Result<()>,
{
    if let Some(dir) = &cfg.output.dump_dir {
        std::fs::create_dir_all(dir)?;
        write(BufWriter::new(File::create(dir.join(name))?))?;
    }
    Ok(())
}

fn status_counts(table: &ReturnTable, names: &[&str]) -> Value {
    let per: Vec<Value> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let count = |f: fn(&Status) -> bool| table.rows.iter().filter(|r| f(&r.status[i])).count();
            json!({
                "sequence": name,
                "in_with_witness": count(|s| matches!(s, Status::InWithWitness(_))),
                "in_by_torus": count(|s| matches!(s, Status::InByTorus)),
                "not_found": count(|s| matches!(s, Status::NotFoundUpTo(_))),
                "cert_out": count(|s| matches!(s, Status::CertOut)),
            })
        })
        .collect();
    let inter = table.intersection();
    json!({
        "range": table.range,
        "witness_bound": table.witness_bound,
        "mode": table.mode,
        "rows": table.rows.len(),
        "per_sequence": per,
        "intersection_size": inter.len(),
        "intersection_head": &inter.elements()[..inter.len().min(HEAD)],
    })
}

fn density_section(spec: &BohrSpec, set: &TruncatedSet, tol: (i64, i64)) -> Result<(Value, Check), ExperimentError> {
    let emp = BigRational::new(BigInt::from(set.len()), BigInt::from(set.horizon().max(1)));
    let theo = spec.density_theoretical()?;
    let ok = within(&emp, &theo, tol);
    let v = json!({
        "spec": spec.to_string(),
        "horizon": set.horizon(),
        "count": set.len(),
        "empirical": emp.to_string(),
        "empirical_f64": rational_f64(&emp),
        "theoretical": theo.to_string(),
        "theoretical_f64": rational_f64(&theo),
        "comparison": ratio_json(&emp, &theo),
        "tolerance": format!("{}/{}", tol.0, tol.1),
    });
    let detail = format!("empirical/theoretical = {:.5}", rational_f64(&(emp / theo)));
    Ok((v, check("density", ok, detail)))
}

fn profile_json(s: &TruncatedSet) -> Result<Value, ExperimentError> {
    if s.is_empty() {
        return Ok(json!({ "horizon": s.horizon(), "size": 0 }));
    }
    Ok(serde_json::to_value(full_profile(s, &WINDOW_PROBES)?).expect("profile serializes"))
}

fn span_exhaustive(fam: &GenFamily, order: usize, bound: i64) -> (Value, Check) {
    let counts = exhaustive_classification(fam, order, bound);
    let v = json!({
        "max_order": order,
        "bound": bound,
        "total": counts.total().to_string(),
        "zero_function": counts.zero_function.to_string(),
        "limit_zero": counts.limit_zero.to_string(),
        "limit_infinity": counts.limit_infinity.to_string(),
        "finite_nonzero": counts.finite_nonzero.to_string(),
    });
    let ok = counts.finite_nonzero == 0;
    (
        v,
        check(
            "span",
            ok,
            format!(
                "{} finite nonzero limits among {}",
                counts.finite_nonzero,
                counts.total()
            ),
        ),
    )
}

/// Agreement between the `2δ` torus verdict and witness search on a planted
/// independent spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyntheticAgreement {
    pub spec: String,
    pub instances: u64,
    pub cert_in: u64,
    pub cert_out: u64,
    pub disagreements: Vec<u64>,
}

impl SyntheticAgreement {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

pub fn synthetic_agreement(instances: u64, bound: u64) -> Result<SyntheticAgreement, ExperimentError> {
    let spec = BohrSpec::new(
        vec![parse_const("sqrt(2)-1")?, parse_const("sqrt(3)-1")?],
        vec![q(1, 8), q(1, 8)],
        true,
    )?;
    let (members, _) = spec.enumerate_with_density(bound)?;
    let results: Vec<(u64, DiffStatus, Witness)> = (1..=instances)
        .into_par_iter()
        .map(|r| {
            Ok((
                r,
                spec.return_diff_test(r)?,
                spec.witness_search_in(&members, r, bound)?,
            ))
        })
        .collect::<Result<_, ExactError>>()?;
    let mut out = SyntheticAgreement {
        spec: spec.to_string(),
        instances,
        cert_in: 0,
        cert_out: 0,
        disagreements: vec![],
    };
    for (r, diff, w) in results {
        let agree = match diff {
            DiffStatus::CertIn => {
                out.cert_in += 1;
                matches!(w, Witness::Found(_))
            }
            DiffStatus::CertOut => {
                out.cert_out += 1;
                matches!(w, Witness::NotFoundUpTo(_))
            }
            DiffStatus::NeedWitness => false,
        };
        if !agree {
            out.disagreements.push(r);
        }
    }
    Ok(out)
}

/// Elements of `{n ≤ cap : ‖βn‖, ‖λβn‖ < η}` that also satisfy the three
/// `n^{3/2}` conditions.
fn scan_b_and_t(b: &BohrSpec, t: &[ScaledRootTest], cap: u64) -> Result<Vec<u64>, ExactError> {
    let mut out = Vec::new();
    let mut lo = 1;
    while lo <= cap {
        let hi = lo.saturating_add(BT_BLOCK - 1).min(cap);
        let cands = b.scan(lo, hi)?;
        let hits: Vec<u64> = cands
            .par_iter()
            .map(|&n| {
                let cube = BigInt::from(n).pow(3);
                for test in t {
                    if !test.test(&cube)? {
                        return Ok(None);
                    }
                }
                Ok(Some(n))
            })
            .collect::<Result<Vec<_>, ExactError>>()?
            .into_iter()
            .flatten()
            .collect();
        out.extend(hits);
        lo = hi + 1;
    }
    Ok(out)
}

fn shifts(seqs: &[IterateSeq], n: u64, cap_bits: u32) -> Result<Vec<u64>, ExperimentError> {
    seqs.iter()
        .map(|s| {
            let v = s.iterate(n, cap_bits)?;
            u64::try_from(v.magnitude().clone()).map_err(|_| ExperimentError::Config(format!("iterate {v} overflows")))
        })
        .collect()
}

fn witnesses(spec: &BohrSpec, members: &TruncatedSet, rs: &[u64], bound: u64) -> Result<Option<Vec<u64>>, ExactError> {
    let mut out = Vec::with_capacity(rs.len());
    for &r in rs {
        match spec.witness_search_in(members, r, bound)? {
            Witness::Found(m) => out.push(m),
            Witness::NotFoundUpTo(_) => return Ok(None),
        }
    }
    Ok(Some(out))
}

pub fn reproduce_thm_main(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let constraints = validate_params(cfg)?;
    let cap = cfg.cap_bits;
    let h = &cfg.horizons;
    let r = Resolved::from_constants(&cfg.constants)?;
    let lb = &r.lambda * &r.beta;
    let llb = &r.lambda * &lb;
    let mut checks = Vec::new();

    let e = BohrSpec::new(
        vec![r.beta.clone(), lb.clone()],
        vec![r.delta.clone(), r.delta.clone()],
        true,
    )?;
    let (members, _) = e.enumerate_with_density(h.witness_bound.max(h.n_set))?;
    let e_set = prefix(&members, h.n_set);
    let (density, mut dcheck) = density_section(&e, &e_set, (1, 10))?;
    dcheck.clause = "(e) density".into();
    dump(cfg, "E.csv", |w| e_set.write_csv(w))?;

    let seqs = [
        IterateSeq::new(HardyCombo::three_halves(), Rounding::Floor),
        IterateSeq::new(HardyCombo::lambda_plus_linear(&r.lambda), Rounding::Floor),
    ];
    let range = (h.n_range[0], h.n_range[1]);
    let table = return_table_with(&e, &members, &seqs, range, h.witness_bound, Mode::TorusFirst, cap)?;
    let s = table.intersection();
    dump(cfg, "returns.jsonl", |w| table.write_jsonl(w))?;
    dump(cfg, "S.csv", |w| s.write_csv(w))?;

    // (a)
    let five_delta = &r.delta * BigRational::from_integer(5.into());
    let outside = verify_inclusion(&s, &r.beta, &Polynomial::identity(), &five_delta, cap)?;
    checks.push(check(
        "(a) inclusion",
        outside.is_empty(),
        format!("{} elements of S with ||beta*n|| >= 5*delta", outside.len()),
    ));

    // (b)
    let mut certificates = serde_json::Map::new();
    let profile = profile_json(&s)?;
    let s_run = if s.is_empty() {
        0
    } else {
        run_gap_profile(&s)?.max_run.length
    };
    let inclusion_set = BohrSpec::new(vec![r.beta.clone()], vec![five_delta.clone()], true)?;
    let (inc, _) = inclusion_set.enumerate_with_density(h.n_set)?;
    let inc_run = if inc.is_empty() {
        0
    } else {
        run_gap_profile(&inc)?.max_run.length
    };
    match find_nonthick_h(&r.beta, &Polynomial::identity(), &five_delta, h.h_max, cap) {
        Ok(cert) => {
            let bound = cert.max_run();
            certificates.insert("nonthick".into(), serde_json::to_value(cert.record()).expect("record"));
            checks.push(check(
                "(b) max run",
                s_run <= bound,
                format!("max run of S = {s_run}, bound h = {bound}"),
            ));
            checks.push(check(
                "nonthick scan",
                inc_run <= bound,
                format!(
                    "max run of {{n <= {}: ||beta*n|| < 5*delta}} = {inc_run}, bound {bound}",
                    h.n_set
                ),
            ));
        }
        Err(CertifyError::NotFound(hm)) => checks.push(Check {
            clause: "(b) max run".into(),
            status: Verdict::Inconclusive,
            detail: format!("no non-thickness step up to h = {hm}"),
        }),
        Err(err) => return Err(err.into()),
    }

    // (c)
    let mut confirmed = Vec::new();
    for row in table.rows.iter().filter(|row| row.all_in()) {
        if let Some(ws) = witnesses(&e, &members, &row.r, h.witness_bound)? {
            confirmed.push(json!({ "n": row.n, "r": row.r, "witnesses": ws }));
        }
    }
    let in_s = s.len();
    checks.push(check(
        "(c) nonempty with witnesses",
        in_s >= 1 && confirmed.len() >= 5,
        format!("|S| = {in_s}, {} elements witness-confirmed", confirmed.len()),
    ));

    // (d)
    let eta = r.eta.clone();
    let b = BohrSpec::new(vec![r.beta.clone(), lb.clone()], vec![eta.clone(), eta.clone()], true)?;
    let t_tests: Vec<ScaledRootTest> = [&r.beta, &lb, &llb]
        .iter()
        .map(|c| ScaledRootTest::new(c, &eta, cap))
        .collect();
    let bt = scan_b_and_t(&b, &t_tests, h.bt_cap)?;
    let mut not_in_s = Vec::new();
    let mut bt_confirmed = Vec::new();
    for (i, &n) in bt.iter().enumerate() {
        let rs = shifts(&seqs, n, cap)?;
        let mut ok = true;
        for &ri in &rs {
            ok &= e.return_diff_test(ri)? == DiffStatus::CertIn;
        }
        if !ok {
            not_in_s.push(n);
        } else if i < 5 {
            if let Some(ws) = witnesses(&e, &members, &rs, h.witness_bound)? {
                bt_confirmed.push(json!({ "n": n, "r": rs, "witnesses": ws }));
            }
        }
    }
    let bt_set = TruncatedSet::new(bt.clone(), h.bt_cap, "B & T")?;
    dump(cfg, "BT.csv", |w| bt_set.write_csv(w))?;
    let synthetic = synthetic_agreement(h.synthetic_instances, h.synthetic_bound)?;
    let d_check = if !not_in_s.is_empty() {
        check(
            "(d) B&T in S",
            false,
            format!(
                "{} elements of B&T fail the return test: {:?}",
                not_in_s.len(),
                &not_in_s[..not_in_s.len().min(HEAD)]
            ),
        )
    } else if bt.len() < 3 {
        Check {
            clause: "(d) B&T in S".into(),
            status: if synthetic.passed() {
                Verdict::Inconclusive
            } else {
                Verdict::Violated
            },
            detail: format!(
                "only {} elements of B&T up to {}; synthetic fallback passed: {}",
                bt.len(),
                h.bt_cap,
                synthetic.passed()
            ),
        }
    } else {
        check(
            "(d) B&T in S",
            true,
            format!("{} elements of B&T up to {}, all in S", bt.len(), h.bt_cap),
        )
    };
    checks.push(d_check);
    checks.push(dcheck);

    let fam = GenFamily::f_family(&r.lambda)?;
    let (span, span_check) = span_exhaustive(&fam, h.span_order, h.span_bound);
    checks.push(span_check);

    let triple = [r.beta.clone(), lb, llb];
    let thick = match find_thick_interval(&triple, &eta, h.thick_h, h.thick_cap, cap) {
        Ok(iv) => json!({ "status": "found", "interval": iv }),
        Err(CertifyError::NotFound(c)) => json!({ "status": "not_found", "search_cap": c, "expected": true }),
        Err(err) => return Err(err.into()),
    };
    let mut weyl = Vec::new();
    for c in &triple {
        let w = weyl_sum(c, &q(3, 2), h.weyl_n)?;
        weyl.push(json!({ "c": c.to_string(), "magnitude": w.magnitude, "n": w.n, "rigorous": w.rigorous }));
    }
    certificates.insert("thick_interval".into(), thick);
    certificates.insert("weyl".into(), Value::Array(weyl));
    certificates.insert("span".into(), span);
    certificates.insert(
        "synthetic_fallback".into(),
        serde_json::to_value(&synthetic).expect("serializes"),
    );
    certificates.insert(
        "inclusion_set".into(),
        json!({ "horizon": h.n_set, "size": inc.len(), "max_run": inc_run }),
    );

    let return_sets = json!({
        "table": status_counts(&table, &["f1", "f2"]),
        "witness_confirmed": confirmed.len(),
        "witness_examples": &confirmed[..confirmed.len().min(HEAD)],
        "b_and_t": {
            "cap": h.bt_cap,
            "count": bt.len(),
            "head": &bt[..bt.len().min(HEAD)],
            "not_in_s": not_in_s,
            "witness_examples": bt_confirmed,
        },
    });
    let largeness = json!({ "S": profile });
    Ok(ExperimentReport::assemble(
        cfg,
        constraints,
        json!({ "E": density }),
        return_sets,
        largeness,
        Value::Object(certificates),
        checks,
    ))
}

pub fn reproduce_thm_empty(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    empty_pipeline(cfg, false)
}

pub fn reproduce_thm_q65(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    empty_pipeline(cfg, true)
}

fn empty_pipeline(cfg: &ExperimentConfig, q65: bool) -> Result<ExperimentReport, ExperimentError> {
    let constraints: ConstraintReport = validate_params(cfg)?;
    let cap = cfg.cap_bits;
    let h = &cfg.horizons;
    let r = Resolved::from_constants(&cfg.constants)?;
    let p = empty_params(&r, cap)?;
    let rounding = if q65 { Rounding::Nearest } else { Rounding::Floor };
    let mut checks = Vec::new();

    let e = BohrSpec::new(
        vec![-&r.lambda / &r.l, ConstExpr::one() / &r.l],
        vec![r.delta.clone(), r.delta.clone()],
        true,
    )?;
    let (members, _) = e.enumerate_with_density(h.witness_bound.max(h.n_set))?;
    let e_set = prefix(&members, h.n_set);
    let (density, mut dcheck) = density_section(&e, &e_set, (1, 5))?;
    dcheck.clause = "density".into();
    checks.push(dcheck);
    dump(cfg, "E.csv", |w| e_set.write_csv(w))?;

    let mut seqs = vec![
        IterateSeq::new(HardyCombo::three_halves(), rounding),
        IterateSeq::new(HardyCombo::lambda_plus_affine(&r.lambda, &r.l, &r.xi), rounding),
    ];
    let mut names = vec!["u1", "u2"];
    if q65 {
        seqs.push(IterateSeq::new(HardyCombo::square(), rounding));
        names.push("u3");
    }
    let range = (h.n_range[0], h.n_range[1]);

    let cert = EmptyCert {
        thetas: vec![-&r.lambda, ConstExpr::one()],
        poly: Polynomial::affine(&r.l, &r.xi),
        d_bar: p.d_bar.clone(),
        beta: p.beta.clone(),
        rho: p.rho.clone(),
    };
    let mut certificates = serde_json::Map::new();
    certificates.insert("empty".into(), serde_json::to_value(cert.record()).expect("record"));
    match check_empty_cert(&cert, &seqs[..2], range, cap) {
        Ok(v) => {
            certificates.insert("empty_verdict".into(), serde_json::to_value(&v).expect("verdict"));
            checks.push(check(
                "certificate",
                true,
                format!("VALID, norm bound {:?}", v.norm_bound),
            ));
        }
        Err(CertifyError::CertInvalid(msg)) => {
            certificates.insert("empty_verdict".into(), json!({ "invalid": msg }));
            checks.push(check("certificate", false, msg));
        }
        Err(err) => return Err(err.into()),
    }

    let table = return_table_with(&e, &members, &seqs, range, h.witness_bound, Mode::WitnessOnly, cap)?;
    dump(cfg, "returns.jsonl", |w| table.write_jsonl(w))?;
    let inter = table.intersection();
    checks.push(check(
        "empty intersection",
        inter.is_empty(),
        format!("{} common return times in [{}, {}]", inter.len(), range.0, range.1),
    ));
    let bad = table.reverify_witnesses(&e, 2 * cap)?;
    checks.push(check(
        "witness reverification",
        bad.is_empty(),
        format!("{} witnesses fail the slow path", bad.len()),
    ));

    if q65 {
        let fam = GenFamily::h_family(&r.lambda, &r.l)?;
        let shadow = poly_shadow(&fam)?;
        let t2 = IntPoly::from_i64(&[0, 0, 1]);
        checks.push(check(
            "shadow",
            shadow.is_nonzero_multiples_of(&t2),
            format!("shadow = {}", shadow.description),
        ));
        let inter_rep = joint_intersective_check(&shadow.basis, h.modulus_max);
        let n_eq_m = inter_rep.moduli.iter().all(|m| m.witness == Some(m.modulus));
        checks.push(check(
            "joint intersectivity",
            inter_rep.passed() && n_eq_m,
            format!("moduli 1..={}, witness n = m for all: {n_eq_m}", h.modulus_max),
        ));
        let sq = &seqs[2];
        let mismatch = (1..=1000u64).find(|&n| sq.iterate(n, cap).map_or(true, |v| v != BigInt::from(n) * n));
        checks.push(check(
            "u3 = n^2",
            mismatch.is_none(),
            mismatch.map_or_else(|| "n <= 1000".to_string(), |n| format!("mismatch at {n}")),
        ));
        certificates.insert("shadow".into(), serde_json::to_value(&shadow).expect("shadow"));
        certificates.insert(
            "intersectivity".into(),
            json!({ "max_modulus": h.modulus_max, "passed": inter_rep.passed(), "first_failure": inter_rep.first_failure }),
        );
    } else {
        let fam = GenFamily::g_family(&r.lambda, &r.l, &r.xi)?;
        let (span, span_check) = span_exhaustive(&fam, h.span_order, h.span_bound);
        checks.push(span_check);
        certificates.insert("span".into(), span);
    }

    let return_sets = json!({ "table": status_counts(&table, &names) });
    let largeness = json!({ "intersection": profile_json(&inter)?, "E": profile_json(&e_set)? });
    Ok(ExperimentReport::assemble(
        cfg,
        constraints,
        json!({ "E": density }),
        return_sets,
        largeness,
        Value::Object(certificates),
        checks,
    ))
}

pub fn run_custom(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let constraints = validate_params(cfg)?;
    let spec_cfg = cfg
        .custom
        .as_ref()
        .ok_or_else(|| ExperimentError::Config("missing custom section".into()))?;
    let cap = cfg.cap_bits;
    let h = &cfg.horizons;
    let freqs = spec_cfg
        .frequencies
        .iter()
        .map(|f| parse_const(f))
        .collect::<Result<Vec<_>, _>>()?;
    let radii = spec_cfg
        .radii
        .iter()
        .map(|d| parse_const(d)?.as_literal().ok_or(ExactError::Domain))
        .collect::<Result<Vec<_>, _>>()?;
    let e = BohrSpec::new(freqs, radii, spec_cfg.independent)?;
    let mut seqs = Vec::new();
    for f in &spec_cfg.functions {
        let terms = f
            .terms
            .iter()
            .map(|[c, x]| Ok((parse_const(c)?, parse_const(x)?.as_literal().ok_or(ExactError::Domain)?)))
            .collect::<Result<Vec<_>, ExactError>>()?;
        seqs.push(IterateSeq::new(HardyCombo::new(terms)?, f.rounding));
    }
    let mut checks = Vec::new();
    let (members, _) = e.enumerate_with_density(h.witness_bound.max(h.n_set))?;
    let e_set = prefix(&members, h.n_set);
    let density = match density_section(&e, &e_set, (1, 10)) {
        Ok((v, c)) => {
            checks.push(c);
            v
        }
        Err(ExperimentError::Bohr(err)) => {
            json!({ "count": e_set.len(), "horizon": h.n_set, "theoretical": err.to_string() })
        }
        Err(err) => return Err(err),
    };
    let range = (h.n_range[0], h.n_range[1]);
    let table = return_table_with(&e, &members, &seqs, range, h.witness_bound, Mode::TorusFirst, cap)?;
    dump(cfg, "returns.jsonl", |w| table.write_jsonl(w))?;
    let inter = table.intersection();
    let bad = table.reverify_witnesses(&e, 2 * cap)?;
    checks.push(check(
        "witness reverification",
        bad.is_empty(),
        format!("{} witnesses fail the slow path", bad.len()),
    ));
    let undecided = table
        .rows
        .iter()
        .filter(|row| !row.all_in() && !row.status.contains(&Status::CertOut))
        .count();
    checks.push(Check {
        clause: "decided".into(),
        status: if undecided == 0 {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        },
        detail: format!("{undecided} rows without a decision"),
    });
    let names: Vec<String> = (1..=seqs.len()).map(|i| format!("u{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(ExperimentReport::assemble(
        cfg,
        constraints,
        json!({ "E": density }),
        json!({ "table": status_counts(&table, &names) }),
        json!({ "intersection": profile_json(&inter)?, "E": profile_json(&e_set)? }),
        json!({}),
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run, ExperimentId};

    fn small(id: ExperimentId) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(id);
        let hz = &mut cfg.horizons;
        hz.n_set = 100_000;
        hz.n_range = [1, 3000];
        hz.witness_bound = 1_000_000;
        hz.bt_cap = 2_000_000;
        hz.thick_cap = 1000;
        hz.span_order = 2;
        hz.span_bound = 2;
        hz.modulus_max = 30;
        hz.synthetic_instances = 100;
        hz.synthetic_bound = 200_000;
        hz.weyl_n = 10_000;
        cfg
    }

    #[test]
    fn thm_main_small_run() {
        let rep = run(&small(ExperimentId::ThmMain)).unwrap();
        for c in ["(a) inclusion", "(b) max run", "nonthick scan", "span"] {
            assert_eq!(
                rep.check(c).unwrap().status,
                Verdict::Pass,
                "{c}: {}",
                rep.check(c).unwrap().detail
            );
        }
        assert_eq!(rep.certificates["nonthick"]["h"], 1109);
    }

    #[test]
    fn thm_empty_small_run() {
        let rep = run(&small(ExperimentId::ThmEmpty)).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.violations);
        assert_eq!(rep.return_sets["table"]["intersection_size"], 0);
    }

    #[test]
    fn thm_q65_small_run() {
        let rep = run(&small(ExperimentId::ThmQ65)).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.violations);
        assert_eq!(rep.certificates["shadow"]["description"], "{c*(t^2) : c in Z, c != 0}");
    }

    #[test]
    fn custom_small_run() {
        let mut cfg = small(ExperimentId::Custom);
        cfg.horizons.n_range = [1, 200];
        let rep = run(&cfg).unwrap();
        assert_ne!(rep.verdict, Verdict::Violated);
    }

    #[test]
    fn synthetic_fallback_agrees() {
        let s = synthetic_agreement(200, 200_000).unwrap();
        assert!(s.passed(), "{:?}", s.disagreements);
        assert_eq!(s.cert_in + s.cert_out, 200);
        assert!(s.cert_in > 0 && s.cert_out > 0);
    }
}
