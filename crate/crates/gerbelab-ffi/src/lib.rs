//! C ABI for the manifest front end: parse a manifest, run it, and serialize
//! the report.  Handles are opaque, every function returns an error code, and
//! the last error detail is kept per thread for `gerbelab_last_error_message`.

use gerbelab::cli::{emit_report, parse_manifest, run, Format, Manifest, Report};
use libc::c_char;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Success.
pub const GERBELAB_OK: i32 = 0;
/// A required pointer argument was null.
pub const GERBELAB_ERR_NULL_ARG: i32 = 1;
/// Input text was not valid UTF-8.
pub const GERBELAB_ERR_UTF8: i32 = 2;
/// The manifest failed to parse or validate.
pub const GERBELAB_ERR_PARSE: i32 = 3;
/// One or more tasks failed or errored.
pub const GERBELAB_ERR_TASK_FAILED: i32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).expect("no interior nul"));
}

/// An opaque parsed manifest.
pub struct GerbelabManifest(Manifest);
/// An opaque run report.
pub struct GerbelabReport(Report);

/// Parse a UTF-8 JSON manifest; on success writes a new handle to `out`.
///
/// # Safety
/// `text` must be a valid nul-terminated C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_manifest_parse(
    text: *const c_char,
    out: *mut *mut GerbelabManifest,
) -> i32 {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return GERBELAB_ERR_NULL_ARG;
    }
    *out = ptr::null_mut();
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        set_error("manifest text is not valid UTF-8");
        return GERBELAB_ERR_UTF8;
    };
    match parse_manifest(text) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(GerbelabManifest(m)));
            GERBELAB_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            GERBELAB_ERR_PARSE
        }
    }
}

/// Run all tasks of a parsed manifest; always produces a report handle.
/// Returns `GERBELAB_ERR_TASK_FAILED` if any task failed or errored.
///
/// # Safety
/// `manifest` must be a live handle from `gerbelab_manifest_parse` and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_manifest_run(
    manifest: *const GerbelabManifest,
    out: *mut *mut GerbelabReport,
) -> i32 {
    if manifest.is_null() || out.is_null() {
        set_error("null argument");
        return GERBELAB_ERR_NULL_ARG;
    }
    let report = run(&(*manifest).0);
    let all_passed = report.all_passed();
    *out = Box::into_raw(Box::new(GerbelabReport(report)));
    if all_passed {
        GERBELAB_OK
    } else {
        set_error("one or more tasks did not pass");
        GERBELAB_ERR_TASK_FAILED
    }
}

/// Whether every task in the report passed (1) or not (0); -1 on null.
///
/// # Safety
/// `report` must be a live handle from `gerbelab_manifest_run`.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_report_all_passed(report: *const GerbelabReport) -> i32 {
    if report.is_null() {
        set_error("null argument");
        return -1;
    }
    i32::from((*report).0.all_passed())
}

unsafe fn emit(report: *const GerbelabReport, out: *mut *mut c_char, format: Format) -> i32 {
    if report.is_null() || out.is_null() {
        set_error("null argument");
        return GERBELAB_ERR_NULL_ARG;
    }
    let rendered = emit_report(&(*report).0, format);
    let c = CString::new(rendered).expect("reports contain no nul bytes");
    *out = c.into_raw();
    GERBELAB_OK
}

/// Serialize a report as JSON into a newly allocated string; free it with
/// `gerbelab_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_report_to_json(
    report: *const GerbelabReport,
    out: *mut *mut c_char,
) -> i32 {
    emit(report, out, Format::Json)
}

/// Render a report as text into a newly allocated string; free it with
/// `gerbelab_string_free`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_report_to_text(
    report: *const GerbelabReport,
    out: *mut *mut c_char,
) -> i32 {
    emit(report, out, Format::Text)
}

/// The detail message of the most recent error on this thread.  The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gerbelab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Free a manifest handle (null is ignored).
///
/// # Safety
/// `manifest` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_manifest_free(manifest: *mut GerbelabManifest) {
    if !manifest.is_null() {
        drop(Box::from_raw(manifest));
    }
}

/// Free a report handle (null is ignored).
///
/// # Safety
/// `report` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_report_free(report: *mut GerbelabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Free a string returned by the `*_to_json` / `*_to_text` functions.
///
/// # Safety
/// `s` must be null or a string returned by this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn gerbelab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
