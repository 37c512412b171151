//! C ABI over `rlab-core`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every entry point returns an
//! [`RlabStatus`]; on failure a message is kept per thread and can be fetched
//! with [`rlab_last_error`]. Strings handed out by the library are released
//! with [`rlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rlab_core::bohr::{BohrError, BohrSpec};
use rlab_core::exactreal::{compare_exprs, eval_interval, floor_exact, parse_const, Comparison, ConstExpr, ExactError};
use rlab_core::experiments::{self, validate_params, ExperimentConfig, ExperimentError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    PrecisionExhausted = 5,
    InvalidArgument = 6,
    ConstraintViolated = 7,
    Io = 8,
    Panic = 9,
}

/// Parsed constant expression.
pub struct RlabExpr(ConstExpr);

/// Validated Bohr set specification.
pub struct RlabBohrSpec(BohrSpec);

struct Failure(RlabStatus, String);

impl Failure {
    fn new(status: RlabStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        let status = match e {
            ExactError::Parse { .. } => RlabStatus::Parse,
            ExactError::PrecisionExhausted { .. } => RlabStatus::PrecisionExhausted,
            _ => RlabStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

impl From<BohrError> for Failure {
    fn from(e: BohrError) -> Self {
        match e {
            BohrError::Exact(x) => x.into(),
            other => Failure(RlabStatus::InvalidArgument, other.to_string()),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let status = match &e {
            ExperimentError::ConstraintViolated { .. } => RlabStatus::ConstraintViolated,
            ExperimentError::Io(_) => RlabStatus::Io,
            ExperimentError::Exact(x) => return x.clone().into(),
            _ => RlabStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> RlabStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (RlabStatus::Ok, None),
        Ok(Err(Failure(s, m))) => (s, Some(m)),
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            (RlabStatus::Panic, Some(m))
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(RlabStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::new(RlabStatus::InvalidUtf8, e.to_string()))
}

fn out_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure::new(RlabStatus::InvalidArgument, e.to_string()))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(RlabStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(RlabStatus::NullPointer, "null handle"))
}

/// Message of the last failed call on this thread, or NULL. Free with
/// `rlab_string_free`.
#[no_mangle]
pub extern "C" fn rlab_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_deref() {
        Some(m) => CString::new(m.replace('\0', " "))
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static version string.
#[no_mangle]
pub extern "C" fn rlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_parse(text: *const c_char, out: *mut *mut RlabExpr) -> RlabStatus {
    guard(|| {
        let e = parse_const(read_str(text)?)?;
        write(out, Box::into_raw(Box::new(RlabExpr(e))))
    })
}

/// # Safety
/// `e` must be NULL or a handle from `rlab_expr_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_free(e: *mut RlabExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_to_string(e: *const RlabExpr, out: *mut *mut c_char) -> RlabStatus {
    guard(|| {
        let e = deref(e)?;
        write(out, out_string(e.0.to_string())?)
    })
}

/// Dyadic enclosure `[lo, hi]` with `bits` working precision, as exact
/// rational strings.
///
/// # Safety
/// `e` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_enclose(
    e: *const RlabExpr,
    bits: u32,
    lo: *mut *mut c_char,
    hi: *mut *mut c_char,
) -> RlabStatus {
    guard(|| {
        let iv = eval_interval(&deref(e)?.0, bits)?;
        if lo.is_null() || hi.is_null() {
            return Err(Failure::new(RlabStatus::NullPointer, "null output pointer"));
        }
        write(lo, out_string(iv.lo().to_string())?)?;
        write(hi, out_string(iv.hi().to_string())?)
    })
}

/// Exact floor as a decimal string.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_floor(e: *const RlabExpr, cap_bits: u32, out: *mut *mut c_char) -> RlabStatus {
    guard(|| {
        let f = floor_exact(&deref(e)?.0, cap_bits)?;
        write(out, out_string(f.to_string())?)
    })
}

/// Writes -1, 0 or 1 for `a < b`, `a = b`, `a > b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_expr_compare(
    a: *const RlabExpr,
    b: *const RlabExpr,
    cap_bits: u32,
    out: *mut i32,
) -> RlabStatus {
    guard(|| {
        let c = match compare_exprs(&deref(a)?.0, &deref(b)?.0, cap_bits)? {
            Comparison::Below => -1,
            Comparison::Equal => 0,
            Comparison::Above => 1,
            Comparison::Unknown => {
                return Err(Failure::new(
                    RlabStatus::PrecisionExhausted,
                    format!("undecided at {cap_bits} bits"),
                ))
            }
        };
        write(out, c)
    })
}

/// Builds `{m : ‖φ_i m‖ < δ_i}` from `k` frequency handles and `k` radius
/// strings.
///
/// # Safety
/// `freqs` and `radii` must point to `k` valid entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_bohr_new(
    freqs: *const *const RlabExpr,
    radii: *const *const c_char,
    k: usize,
    independent: bool,
    out: *mut *mut RlabBohrSpec,
) -> RlabStatus {
    guard(|| {
        if freqs.is_null() || radii.is_null() {
            return Err(Failure::new(RlabStatus::NullPointer, "null array"));
        }
        let mut fs = Vec::with_capacity(k);
        let mut rs = Vec::with_capacity(k);
        for i in 0..k {
            fs.push(deref(*freqs.add(i))?.0.clone());
            let text = read_str(*radii.add(i))?;
            let r = parse_const(text)?
                .as_literal()
                .ok_or_else(|| Failure::new(RlabStatus::InvalidArgument, format!("radius {text} is not rational")))?;
            rs.push(r);
        }
        let spec = BohrSpec::new(fs, rs, independent)?;
        write(out, Box::into_raw(Box::new(RlabBohrSpec(spec))))
    })
}

/// # Safety
/// `s` must be NULL or a handle from `rlab_bohr_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlab_bohr_free(s: *mut RlabBohrSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_bohr_member(s: *const RlabBohrSpec, m: u64, out: *mut bool) -> RlabStatus {
    guard(|| {
        let v = deref(s)?.0.member(m)?;
        write(out, v)
    })
}

/// Size of the set in `[1, n]` and the theoretical density as a rational
/// string; `theoretical` receives NULL when no closed form applies.
///
/// # Safety
/// `s` must be a live handle; `count` and `theoretical` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_bohr_density(
    s: *const RlabBohrSpec,
    n: u64,
    count: *mut u64,
    theoretical: *mut *mut c_char,
) -> RlabStatus {
    guard(|| {
        let spec = &deref(s)?.0;
        if count.is_null() || theoretical.is_null() {
            return Err(Failure::new(RlabStatus::NullPointer, "null output pointer"));
        }
        let (set, _) = spec.enumerate_with_density(n)?;
        let theo = match spec.density_theoretical() {
            Ok(d) => out_string(d.to_string())?,
            Err(_) => ptr::null_mut(),
        };
        write(count, set.len() as u64)?;
        write(theoretical, theo)
    })
}

/// Certifies the constraints of a JSON config and writes the constraint
/// report as JSON.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_validate_json(config_json: *const c_char, out: *mut *mut c_char) -> RlabStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json_str(read_str(config_json)?)?;
        let rep = validate_params(&cfg)?;
        write(
            out,
            out_string(serde_json::to_string(&rep).expect("report serializes"))?,
        )
    })
}

/// Runs the pipeline named in a JSON config, writing the report JSON and
/// the process-style exit code (0 pass, 1 violated, 2 inconclusive).
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `report` and `exit_code`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlab_run_experiment_json(
    config_json: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> RlabStatus {
    guard(|| {
        if report.is_null() || exit_code.is_null() {
            return Err(Failure::new(RlabStatus::NullPointer, "null output pointer"));
        }
        let cfg = ExperimentConfig::from_json_str(read_str(config_json)?)?;
        let rep = experiments::run(&cfg)?;
        write(report, out_string(rep.to_json())?)?;
        write(exit_code, rep.exit_code())
    })
}
