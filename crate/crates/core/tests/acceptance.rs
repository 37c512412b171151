//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run alone with `cargo test -p rlab-core --test acceptance`; a substring
//! argument selects criteria by name.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rlab_core::certify::{find_nonthick_h, find_thick_interval, finite_difference_check, weyl_sum};
use rlab_core::exactreal::{compare_exprs, parse_const, Comparison, ConstExpr, DEFAULT_CAP_BITS};
use rlab_core::experiments::{run, ExperimentConfig, ExperimentId, ExperimentReport, Verdict};
use rlab_core::hardy::{HardyCombo, IterateSeq, Polynomial, Rounding};
use rlab_core::span::{classify_limit, exhaustive_classification, integer_combination, GenFamily, LimitClass};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(s: &str) -> ConstExpr {
    parse_const(s).unwrap()
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn require_pass(rep: &ExperimentReport, clauses: &[&str]) -> Result<(), String> {
    for clause in clauses {
        let chk = rep.check(clause).ok_or_else(|| format!("clause {clause} missing"))?;
        ensure(chk.status == Verdict::Pass, || {
            format!("{clause}: {:?} ({})", chk.status, chk.detail)
        })?;
    }
    ensure(rep.violations.is_empty(), || {
        format!("violations: {:?}", rep.violations)
    })
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f1 = IterateSeq::new(HardyCombo::three_halves(), Rounding::Floor);
    let f2 = IterateSeq::new(HardyCombo::lambda_plus_linear(&c("sqrt(2)")), Rounding::Floor);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let n: u64 = rng.gen_range(1..=1_000_000);
        let cube = BigInt::from(n).pow(3);
        let want1 = cube.sqrt();
        let want2 = (&cube * 2u32).sqrt() + n;
        if f1.iterate(n, DEFAULT_CAP_BITS).unwrap() != want1 || f2.iterate(n, DEFAULT_CAP_BITS).unwrap() != want2 {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    Ok("10^4 samples, 0 mismatches".into())
}

/// `d^m/dt^m (c·t^e)` at `t`, in floating point.
fn derivative_f64(c: f64, e: f64, m: usize, t: f64) -> f64 {
    let mut coef = c;
    for j in 0..m {
        coef *= e - j as f64;
    }
    if coef == 0.0 {
        0.0
    } else {
        coef * t.powf(e - m as f64)
    }
}

fn criterion_2() -> Outcome {
    let lambda = c("sqrt(2)");
    let fams = [
        ("f", GenFamily::f_family(&lambda).unwrap()),
        ("g", GenFamily::g_family(&lambda, &c("6"), &lambda).unwrap()),
    ];
    let box_size = 21u128.pow(12);
    for (name, fam) in &fams {
        let counts = exhaustive_classification(fam, 5, 10);
        ensure(counts.total() == box_size, || {
            format!("{name}: covered {} of {box_size}", counts.total())
        })?;
        ensure(counts.finite_nonzero == 0, || {
            format!("{name}: {} finite nonzero limits", counts.finite_nonzero)
        })?;
    }
    // terms (coefficient, exponent) of each generator, evaluated independently
    let s2 = 2f64.sqrt();
    let f_terms: [Vec<(f64, f64)>; 2] = [vec![(1.0, 1.5)], vec![(s2, 1.5), (1.0, 1.0)]];
    let g_terms: [Vec<(f64, f64)>; 2] = [vec![(1.0, 1.5)], vec![(s2, 1.5), (6.0, 1.0), (6.0 * s2, 0.0)]];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t = 1e8;
    for i in 0..100 {
        let (name, fam) = &fams[i % 2];
        let terms = if i % 2 == 0 { &f_terms } else { &g_terms };
        let first = (i / 2) % 7;
        let matrix: Vec<Vec<i64>> = (0..2)
            .map(|_| {
                (0..6)
                    .map(|m| if m < first { 0 } else { rng.gen_range(-10..=10) })
                    .collect()
            })
            .collect();
        let class = classify_limit(&integer_combination(fam, &matrix).unwrap());
        let mut value = 0.0;
        for (g, row) in matrix.iter().enumerate() {
            for (m, &a) in row.iter().enumerate() {
                for &(coef, e) in &terms[g] {
                    value += a as f64 * derivative_f64(coef, e, m, t);
                }
            }
        }
        let agree = match class {
            LimitClass::LimitInfinity => value.abs() > 1e2,
            LimitClass::LimitZero => value.abs() < 1e-2,
            LimitClass::ZeroFunction => matrix.iter().flatten().all(|&a| a == 0) || value.abs() < 1e-2,
            LimitClass::FiniteNonzero(_) => false,
        };
        ensure(agree, || {
            format!("{name} {matrix:?}: {} but F(1e8) = {value:e}", class.name())
        })?;
    }
    Ok("2 families x 21^12 matrices, limits in {0, inf} only; 100 samples agree at t=1e8".into())
}

fn criterion_3() -> Outcome {
    let cfg = ExperimentConfig::defaults(ExperimentId::ThmMain);
    let rep = run(&cfg).map_err(|e| e.to_string())?;
    require_pass(
        &rep,
        &[
            "(a) inclusion",
            "(b) max run",
            "(c) nonempty with witnesses",
            "(e) density",
            "span",
        ],
    )?;
    let d = rep.check("(d) B&T in S").ok_or("clause (d) missing")?;
    let synthetic_ok = rep.certificates["synthetic_fallback"]["disagreements"]
        .as_array()
        .is_some_and(|a| a.is_empty());
    match d.status {
        Verdict::Pass => {}
        Verdict::Inconclusive if synthetic_ok => {}
        other => return Err(format!("(d): {other:?} ({})", d.detail)),
    }
    let h = rep.certificates["nonthick"]["h"].as_u64().ok_or("no certificate h")?;
    ensure((100..=10_000).contains(&h), || format!("h = {h} not of order 10^3"))?;
    let ratio = rep.density["E"]["comparison"]["ratio_f64"].as_f64().unwrap_or(f64::NAN);
    Ok(format!(
        "|S| = {}, max run {}, h = {h}, |B&T| = {}, density ratio {ratio:.4}, (d) {:?}",
        rep.return_sets["table"]["intersection_size"],
        rep.largeness["S"]["max_run"]["length"],
        rep.return_sets["b_and_t"]["count"],
        d.status
    ))
}

fn empty_like(id: ExperimentId) -> Result<ExperimentReport, String> {
    let rep = run(&ExperimentConfig::defaults(id)).map_err(|e| e.to_string())?;
    require_pass(
        &rep,
        &["density", "certificate", "empty intersection", "witness reverification"],
    )?;
    ensure(rep.return_sets["table"]["intersection_size"] == 0, || {
        "intersection nonempty".into()
    })?;
    let ratio = rep.density["E"]["comparison"]["ratio_f64"].as_f64().unwrap_or(f64::NAN);
    ensure((ratio - 1.0).abs() <= 0.2, || format!("density ratio {ratio}"))?;
    Ok(rep)
}

fn criterion_4() -> Outcome {
    // β·D̄ = (1+√2)/6 against ρ = √2 − 1, exactly and in floating point
    let bd = c("(1+sqrt(2))/6");
    ensure(
        compare_exprs(&bd, &c("sqrt(2)-1"), DEFAULT_CAP_BITS) == Ok(Comparison::Below),
        || "beta*D >= rho".into(),
    )?;
    ensure((1.0 + 2f64.sqrt()) / 6.0 < 2f64.sqrt() - 1.0, || {
        "float oracle disagrees".into()
    })?;
    let rep = empty_like(ExperimentId::ThmEmpty)?;
    require_pass(&rep, &["span"])?;
    let v = &rep.certificates["empty_verdict"];
    let approx = |x: &serde_json::Value| {
        x.as_str()
            .and_then(|s| s.parse::<BigRational>().ok())
            .and_then(|r| r.to_f64())
            .unwrap_or(f64::NAN)
    };
    Ok(format!(
        "VALID, margin >= {:.5}, max deviation <= {:.5}, intersection empty on [1, 10^4]",
        approx(&v["margin"][0]),
        approx(&v["deviation_max"][1])
    ))
}

fn criterion_5() -> Outcome {
    let rep = empty_like(ExperimentId::ThmQ65)?;
    require_pass(&rep, &["shadow", "joint intersectivity", "u3 = n^2"])?;
    ensure(
        rep.certificates["shadow"]["description"] == "{c*(t^2) : c in Z, c != 0}",
        || format!("shadow {}", rep.certificates["shadow"]["description"]),
    )?;
    Ok(format!(
        "shadow {}, moduli <= 100 with n = m, empty under nearest rounding",
        rep.certificates["shadow"]["description"]
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    for _ in 0..1000 {
        let d = rng.gen_range(1..=5);
        let coeffs: Vec<BigRational> = (0..=d)
            .map(|_| q(rng.gen_range(-50..=50), rng.gen_range(1..=20)))
            .collect();
        let coeffs: Vec<BigRational> = if coeffs[d].is_zero() {
            coeffs.into_iter().take(d).chain([BigRational::one()]).collect()
        } else {
            coeffs
        };
        let n = BigInt::from(rng.gen_range(1..=100));
        let h = BigInt::from(rng.gen_range(1..=100));
        let p = Polynomial::new(coeffs.iter().cloned().map(ConstExpr::rational).collect());
        // direct evaluation of the alternating sum
        let eval = |x: &BigInt| {
            coeffs.iter().rev().fold(BigRational::zero(), |acc, a| {
                acc * BigRational::from_integer(x.clone()) + a
            })
        };
        let mut sum = BigRational::zero();
        let mut binom = BigInt::one();
        for j in 0..=d {
            let term = eval(&(&n + &h * j)) * BigRational::from_integer(binom.clone());
            sum = if (d - j) % 2 == 0 { sum + term } else { sum - term };
            binom = binom * (d - j) / (j + 1);
        }
        let fact: BigInt = (1..=d as u64).product();
        let want = &coeffs[d] * BigRational::from_integer(fact * h.pow(d as u32));
        if sum != want || !finite_difference_check(&p, &n, &h) {
            failures += 1;
        }
    }
    ensure(failures == 0, || format!("{failures} failures"))?;
    Ok("10^3 polynomials, 0 failures".into())
}

/// `‖√3·n/4096‖ < 15/64` by integer comparisons: `|√(3n²) − 4096k| < 960`.
fn in_inclusion_set(n: u64) -> bool {
    let x2 = 3 * (n as u128) * (n as u128);
    let root = x2.sqrt();
    let k = (root + 2048) / 4096;
    let lo = (4096 * k).saturating_sub(960);
    let hi = 4096 * k + 960;
    (lo == 0 || lo * lo < x2) && x2 < hi * hi
}

fn criterion_7() -> Outcome {
    let cert = find_nonthick_h(
        &c("sqrt(3)/4096"),
        &Polynomial::identity(),
        &q(15, 64),
        1_000_000,
        DEFAULT_CAP_BITS,
    )
    .map_err(|e| e.to_string())?;
    let h = cert.h;
    let (mut run, mut longest) = (0u64, 0u64);
    for n in 1..=1_000_000 {
        if in_inclusion_set(n) {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    ensure(longest <= h, || format!("run of length {longest} > h = {h}"))?;
    Ok(format!("h = {h}, longest run up to 10^6 = {longest}"))
}

/// `‖n^{3/2}/100‖ < 3/10` by integer comparisons: `|√(n³) − 100k| < 30`.
fn in_diagnostic_set(n: u64) -> bool {
    let x2 = (n as u128).pow(3);
    let k = (x2.sqrt() + 50) / 100;
    let lo = (100 * k).saturating_sub(30);
    let hi = 100 * k + 30;
    (lo == 0 || lo * lo < x2) && x2 < hi * hi
}

fn criterion_8() -> Outcome {
    let iv =
        find_thick_interval(&[c("1/100")], &q(3, 10), 10, 1_000_000, DEFAULT_CAP_BITS).map_err(|e| e.to_string())?;
    ensure(iv.length == 11, || format!("length {}", iv.length))?;
    let bad: Vec<u64> = (iv.start..iv.start + iv.length)
        .filter(|&n| !in_diagnostic_set(n))
        .collect();
    ensure(bad.is_empty(), || format!("elements outside the set: {bad:?}"))?;
    Ok(format!("interval [{}, {}] verified", iv.start, iv.start + 10))
}

fn criterion_9() -> Outcome {
    let n = 1_000_000u64;
    let w = weyl_sum(&c("sqrt(2)"), &q(3, 2), n).map_err(|e| e.to_string())?;
    let s2 = 2f64.sqrt();
    let (mut re, mut im) = (0f64, 0f64);
    for k in 1..=n {
        let x = k as f64;
        let phase = (s2 * x * x.sqrt()).rem_euclid(1.0) * std::f64::consts::TAU;
        re += phase.cos();
        im += phase.sin();
    }
    let oracle = (re * re + im * im).sqrt() / n as f64;
    ensure(w.magnitude <= 0.05, || format!("magnitude {}", w.magnitude))?;
    ensure((w.magnitude - oracle).abs() < 1e-3, || {
        format!("library {} vs oracle {oracle}", w.magnitude)
    })?;
    Ok(format!("|S_N|/N = {:.3e} at N = 10^6 (non-rigorous)", w.magnitude))
}

fn criterion_10() -> Outcome {
    let mut main = ExperimentConfig::defaults(ExperimentId::ThmMain);
    main.horizons.n_range = [1, 20_000];
    main.horizons.bt_cap = 10_000_000;
    main.horizons.span_order = 3;
    for cfg in [ExperimentConfig::defaults(ExperimentId::ThmEmpty), main] {
        let a = run(&cfg).map_err(|e| e.to_string())?.without_timestamp();
        let b = run(&cfg).map_err(|e| e.to_string())?.without_timestamp();
        ensure(a == b, || format!("{} reports differ", cfg.experiment.name()))?;
    }
    Ok("thm-empty and thm-main reports identical modulo timestamp".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "floor oracle equivalence",
            limit: Duration::from_secs(5),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "span classifier",
            limit: Duration::from_secs(60),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "thm-main pipeline",
            limit: Duration::from_secs(600),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "thm-empty pipeline",
            limit: Duration::from_secs(120),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "thm-q65 pipeline",
            limit: Duration::from_secs(120),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "finite-difference identity",
            limit: Duration::from_secs(5),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "non-thickness soundness",
            limit: Duration::from_secs(60),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "thick-interval finder",
            limit: Duration::from_secs(30),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            name: "weyl diagnostic",
            limit: Duration::from_secs(30),
            run: criterion_9,
        },
        Criterion {
            id: 10,
            name: "determinism",
            limit: Duration::from_secs(600),
            run: criterion_10,
        },
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |cr: &Criterion| {
        filters.is_empty()
            || filters
                .iter()
                .any(|f| cr.name.contains(f.as_str()) || cr.id.to_string() == *f)
    };
    let mut failed = 0;
    for cr in criteria.iter().filter(|c| selected(c)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(cr.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > cr.limit => Err(format!("{detail}; took {elapsed:.1?}, limit {:?}", cr.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} {:<28} PASS  {detail} [{:.1?}]",
                cr.id, cr.name, elapsed
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {:<28} FAIL  {why} [{:.1?}]", cr.id, cr.name, elapsed);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
