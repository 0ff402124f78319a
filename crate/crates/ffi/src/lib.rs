//! C ABI for `frobtrace`.
//!
//! Fields are opaque handles created by [`ft_field_new`] and released with
//! [`ft_field_free`]. Computations return an [`FtStatus`] and write a JSON
//! document (the same schema as the CLI's `--output json`) to `*out_json`;
//! release it with [`ft_string_free`]. On failure [`ft_last_error`] returns
//! a message for the calling thread.
//!
//! Variable lists are comma separated; `NULL` means `x,y,z,w`. A `NULL`
//! chart means the last variable.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use frobtrace::cli::{self, Output};
use frobtrace::field::Field;

/// Opaque finite field handle.
pub struct FtField {
    field: Field,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidField = 3,
    InvalidInput = 4,
    /// The computation ran but its certificate or check failed.
    CheckFailed = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(FtStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FtStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(&format!("internal error: {}", message));
            FtStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FtStatus::NullPointer, format!("{} is NULL", what)));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FtStatus::InvalidUtf8, format!("{} is not valid UTF-8", what)))
}

unsafe fn read_opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        read_str(p, what).map(Some)
    }
}

unsafe fn read_field<'a>(p: *const FtField) -> Result<&'a Field, Failure> {
    p.as_ref()
        .map(|h| &h.field)
        .ok_or_else(|| Failure(FtStatus::NullPointer, "field handle is NULL".into()))
}

unsafe fn read_vars(p: *const c_char) -> Result<Vec<String>, Failure> {
    let text = read_opt_str(p, "vars")?.unwrap_or("x,y,z,w");
    let vars: Vec<String> = text.split(',').map(|v| v.trim().to_string()).collect();
    cli::validate_vars(&vars).map_err(cli_failure)?;
    Ok(vars)
}

fn cli_failure(e: cli::CliError) -> Failure {
    Failure(FtStatus::InvalidInput, e.message)
}

unsafe fn write_json(out: *mut *mut c_char, report: Result<(String, i32), cli::CliError>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FtStatus::NullPointer, "out_json is NULL".into()));
    }
    *out = ptr::null_mut();
    let (text, code) = report.map_err(cli_failure)?;
    *out = CString::new(text.trim_end()).expect("JSON has no nul").into_raw();
    if code != 0 {
        return Err(Failure(FtStatus::CheckFailed, "verification failed; see the report".into()));
    }
    Ok(())
}

/// Creates `F_{p^s}`. With `s == 1` the modulus may be `NULL`; otherwise
/// `modulus` holds the `s + 1` coefficients of a monic irreducible
/// polynomial, lowest degree first.
///
/// # Safety
/// `modulus` must point to `modulus_len` integers or be `NULL`; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ft_field_new(
    p: u64,
    s: usize,
    modulus: *const i64,
    modulus_len: usize,
    out: *mut *mut FtField,
) -> FtStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(FtStatus::NullPointer, "out is NULL".into()));
        }
        *out = ptr::null_mut();
        let m = if modulus.is_null() {
            None
        } else {
            Some(std::slice::from_raw_parts(modulus, modulus_len))
        };
        let field = Field::with_degree(p, s, m)
            .map_err(|e| Failure(FtStatus::InvalidField, e.to_string()))?;
        *out = Box::into_raw(Box::new(FtField { field }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from [`ft_field_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_field_free(field: *mut FtField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// The characteristic, or 0 for a `NULL` handle.
///
/// # Safety
/// `field` must be a live handle or `NULL`.
#[no_mangle]
pub unsafe extern "C" fn ft_field_characteristic(field: *const FtField) -> u32 {
    field.as_ref().map_or(0, |h| h.field.p())
}

/// The extension degree `s`, or 0 for a `NULL` handle.
///
/// # Safety
/// `field` must be a live handle or `NULL`.
#[no_mangle]
pub unsafe extern "C" fn ft_field_degree(field: *const FtField) -> usize {
    field.as_ref().map_or(0, |h| h.field.s())
}

/// Trace `Tr^e` of a top form, e.g. `"(x/(x^3+1)) dx"`. JSON: `{version, num, den, e}`.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
#[no_mangle]
pub unsafe extern "C" fn ft_trace(
    field: *const FtField,
    vars: *const c_char,
    form: *const c_char,
    e: u32,
    out_json: *mut *mut c_char,
) -> FtStatus {
    guard(|| {
        let field = read_field(field)?;
        let vars = read_vars(vars)?;
        let form = read_str(form, "form")?;
        write_json(out_json, cli::trace_report(field, &vars, form, e, Output::Json))
    })
}

/// Matrix of `Tr^e: H^0(omega(E + p^e D)) -> H^0(omega(E + D))` on `P^n`,
/// with divisors written as `poly:mult,...,H:k`.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
#[no_mangle]
pub unsafe extern "C" fn ft_trace_matrix(
    field: *const FtField,
    vars: *const c_char,
    chart: *const c_char,
    e_divisor: *const c_char,
    d_divisor: *const c_char,
    e: u32,
    out_json: *mut *mut c_char,
) -> FtStatus {
    guard(|| {
        let field = read_field(field)?;
        let vars = read_vars(vars)?;
        let chart = cli::chart_index(&vars, read_opt_str(chart, "chart")?).map_err(cli_failure)?;
        let e_text = read_opt_str(e_divisor, "E")?.unwrap_or("");
        let d_text = read_str(d_divisor, "D")?;
        write_json(
            out_json,
            cli::trace_matrix_report(field, &vars, chart, e_text, d_text, e, Output::Json),
        )
    })
}

/// Basis of `H^0(P^n, omega(D))` on the chart.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
#[no_mangle]
pub unsafe extern "C" fn ft_sections(
    field: *const FtField,
    vars: *const c_char,
    chart: *const c_char,
    divisor: *const c_char,
    out_json: *mut *mut c_char,
) -> FtStatus {
    guard(|| {
        let field = read_field(field)?;
        let vars = read_vars(vars)?;
        let chart = cli::chart_index(&vars, read_opt_str(chart, "chart")?).map_err(cli_failure)?;
        let text = read_str(divisor, "divisor")?;
        write_json(out_json, cli::sections_report(field, &vars, chart, text, Output::Json))
    })
}

/// Fedder's criterion for the cone over `V(f)`. Returns
/// [`FtStatus::CheckFailed`] (with the report still written) if the
/// certificate does not verify.
///
/// # Safety
/// Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
#[no_mangle]
pub unsafe extern "C" fn ft_fedder(
    field: *const FtField,
    vars: *const c_char,
    f: *const c_char,
    out_json: *mut *mut c_char,
) -> FtStatus {
    guard(|| {
        let field = read_field(field)?;
        let vars = read_vars(vars)?;
        let f = read_str(f, "f")?;
        write_json(out_json, cli::fedder_report(field, &vars, f, Output::Json))
    })
}

/// The Fermat cubic report of `frobtrace demo fermat-cubic`.
///
/// # Safety
/// `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ft_demo_fermat_cubic(out_json: *mut *mut c_char) -> FtStatus {
    guard(|| {
        let report = cli::fermat_report();
        let code = if report.passed { 0 } else { 1 };
        write_json(out_json, Ok((cli::to_json(&report), code)))
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or `NULL`. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// JSON schema version of the reports.
#[no_mangle]
pub extern "C" fn ft_schema_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(cli::SCHEMA_VERSION).expect("no nul"))
        .as_ptr()
}
