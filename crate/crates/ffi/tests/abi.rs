use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rlab_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { rlab_string_free(s) };
    out
}

fn parse(text: &str) -> *mut RlabExpr {
    let c = CString::new(text).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { rlab_expr_parse(c.as_ptr(), &mut e) }, RlabStatus::Ok);
    e
}

#[test]
fn expr_round_trip_and_floor() {
    let e = parse("sqrt(2)*1000000");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rlab_expr_floor(e, 4096, &mut s) }, RlabStatus::Ok);
    assert_eq!(take(s), "1414213");
    assert_eq!(unsafe { rlab_expr_to_string(e, &mut s) }, RlabStatus::Ok);
    assert_eq!(take(s), "sqrt(2)*1000000");
    let (mut lo, mut hi) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { rlab_expr_enclose(e, 64, &mut lo, &mut hi) }, RlabStatus::Ok);
    let (lo, hi) = (take(lo), take(hi));
    assert!(!lo.is_empty() && !hi.is_empty());
    unsafe { rlab_expr_free(e) };
}

#[test]
fn compare_decides_equality() {
    let a = parse("sqrt(8)");
    let b = parse("2*sqrt(2)");
    let c = parse("3");
    let mut out = 7;
    assert_eq!(unsafe { rlab_expr_compare(a, b, 4096, &mut out) }, RlabStatus::Ok);
    assert_eq!(out, 0);
    assert_eq!(unsafe { rlab_expr_compare(a, c, 4096, &mut out) }, RlabStatus::Ok);
    assert_eq!(out, -1);
    unsafe {
        rlab_expr_free(a);
        rlab_expr_free(b);
        rlab_expr_free(c);
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("sqrt(").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { rlab_expr_parse(bad.as_ptr(), &mut e) }, RlabStatus::Parse);
    assert!(e.is_null());
    assert!(take(rlab_last_error()).contains("parse"));
    assert_eq!(unsafe { rlab_expr_parse(ptr::null(), &mut e) }, RlabStatus::NullPointer);
    let ok = CString::new("1").unwrap();
    assert_eq!(
        unsafe { rlab_expr_parse(ok.as_ptr(), ptr::null_mut()) },
        RlabStatus::NullPointer
    );
    let neg = parse("sqrt(0-1)");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rlab_expr_floor(neg, 64, &mut s) }, RlabStatus::Domain);
    unsafe { rlab_expr_free(neg) };
    let one = parse("1");
    assert_eq!(unsafe { rlab_expr_floor(one, 64, &mut s) }, RlabStatus::Ok);
    assert!(rlab_last_error().is_null());
    take(s);
    unsafe { rlab_expr_free(one) };
}

#[test]
fn bohr_membership_and_density() {
    let f = [parse("0-sqrt(2)/6") as *const RlabExpr, parse("1/6") as *const RlabExpr];
    let r = [CString::new("1/512").unwrap(), CString::new("1/512").unwrap()];
    let rp = [r[0].as_ptr(), r[1].as_ptr()];
    let mut spec = ptr::null_mut();
    assert_eq!(
        unsafe { rlab_bohr_new(f.as_ptr(), rp.as_ptr(), 2, true, &mut spec) },
        RlabStatus::Ok
    );
    let mut member = true;
    assert_eq!(unsafe { rlab_bohr_member(spec, 1, &mut member) }, RlabStatus::Ok);
    assert!(!member);
    let (mut count, mut theo) = (0u64, ptr::null_mut());
    assert_eq!(
        unsafe { rlab_bohr_density(spec, 100_000, &mut count, &mut theo) },
        RlabStatus::Ok
    );
    assert_eq!(take(theo), "1/1536");
    assert!((count as f64 / 100_000.0 * 1536.0 - 1.0).abs() < 0.2);
    let big = CString::new("3/4").unwrap();
    let rp = [big.as_ptr(), rp[1]];
    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { rlab_bohr_new(f.as_ptr(), rp.as_ptr(), 2, true, &mut bad) },
        RlabStatus::InvalidArgument
    );
    unsafe {
        rlab_bohr_free(spec);
        rlab_expr_free(f[0] as *mut _);
        rlab_expr_free(f[1] as *mut _);
    }
}

#[test]
fn experiment_json_entry_points() {
    let cfg = CString::new(
        r#"{"experiment":"thm-empty","horizons":{"n_set":20000,"n_range":[1,200],"witness_bound":100000,"span_order":1,"span_bound":1}}"#,
    )
    .unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rlab_validate_json(cfg.as_ptr(), &mut out) }, RlabStatus::Ok);
    assert!(take(out).contains("1+|lambda| < L*||xi||"));
    let mut code = -1;
    assert_eq!(
        unsafe { rlab_run_experiment_json(cfg.as_ptr(), &mut out, &mut code) },
        RlabStatus::Ok
    );
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["return_sets"]["table"]["intersection_size"], 0);
    assert_eq!(code, 0);

    let bad = CString::new(r#"{"experiment":"thm-empty","constants":{"L":"5","beta":"1/5"}}"#).unwrap();
    assert_eq!(
        unsafe { rlab_run_experiment_json(bad.as_ptr(), &mut out, &mut code) },
        RlabStatus::ConstraintViolated
    );
    assert!(take(rlab_last_error()).contains("L*||xi||"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(rlab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("rlab.h")
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "rlab_last_error",
        "rlab_string_free",
        "rlab_version",
        "rlab_expr_parse",
        "rlab_expr_free",
        "rlab_expr_to_string",
        "rlab_expr_enclose",
        "rlab_expr_floor",
        "rlab_expr_compare",
        "rlab_bohr_new",
        "rlab_bohr_free",
        "rlab_bohr_member",
        "rlab_bohr_density",
        "rlab_validate_json",
        "rlab_run_experiment_json",
        "typedef struct RlabExpr RlabExpr",
        "RLAB_STATUS_PANIC = 9",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "rlab.h"

int main(void) {
    RlabExpr *e = NULL;
    if (rlab_expr_parse("sqrt(2000000000000000000)+1000000", &e) != RLAB_STATUS_OK) return 10;
    char *s = NULL;
    if (rlab_expr_floor(e, 4096, &s) != RLAB_STATUS_OK) return 11;
    int ok = strcmp(s, "1415213562") == 0;
    rlab_string_free(s);
    rlab_expr_free(e);
    if (rlab_expr_parse(")", &e) != RLAB_STATUS_PARSE) return 12;
    char *msg = rlab_last_error();
    if (msg == NULL) return 13;
    rlab_string_free(msg);
    return ok ? 0 : 14;
}
"#;

fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("librlab_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_static_library() {
    let Some(lib) = staticlib() else {
        eprintln!("static library not built; skipping link test");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping link test");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).status().unwrap();
    assert_eq!(run.code(), Some(0));
}
