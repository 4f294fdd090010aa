//! Exercises the C ABI through the exported extern functions.

use gerbelab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn parse(text: &str) -> (i32, *mut GerbelabManifest) {
    let c = CString::new(text).unwrap();
    let mut handle = ptr::null_mut();
    let code = unsafe { gerbelab_manifest_parse(c.as_ptr(), &mut handle) };
    (code, handle)
}

#[test]
fn parse_run_and_render() {
    let manifest = r#"{
        "version": "1",
        "objects": {
            "circle": {"loop": {"shape": {"circle": {"samples": 64}}}},
            "alpha": {"form": {"value": {"dim": 3, "deg": 1, "terms": []}}}
        },
        "tasks": [{"command": "transgress", "objects": ["alpha", "circle"]}]
    }"#;
    let (code, handle) = parse(manifest);
    assert_eq!(code, GERBELAB_OK);
    let mut report = ptr::null_mut();
    let code = unsafe { gerbelab_manifest_run(handle, &mut report) };
    assert_eq!(code, GERBELAB_OK);
    assert_eq!(unsafe { gerbelab_report_all_passed(report) }, 1);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { gerbelab_report_to_json(report, &mut json) }, GERBELAB_OK);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    assert!(text.contains("\"status\": \"pass\""), "{text}");
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["tasks"][0]["command"], "transgress");

    let mut rendered = ptr::null_mut();
    assert_eq!(
        unsafe { gerbelab_report_to_text(report, &mut rendered) },
        GERBELAB_OK
    );
    let text = unsafe { CStr::from_ptr(rendered) }.to_str().unwrap();
    assert!(text.starts_with("report version 1"), "{text}");

    unsafe {
        gerbelab_string_free(json);
        gerbelab_string_free(rendered);
        gerbelab_report_free(report);
        gerbelab_manifest_free(handle);
    }
}

#[test]
fn parse_errors_set_last_error() {
    let (code, handle) = parse(r#"{"version": "1", "bogus": true}"#);
    assert_eq!(code, GERBELAB_ERR_PARSE);
    assert!(handle.is_null());
    let msg = unsafe { CStr::from_ptr(gerbelab_last_error_message()) }
        .to_str()
        .unwrap();
    assert!(msg.contains("bogus"), "{msg}");
}

#[test]
fn failing_tasks_report_but_still_render() {
    // single-patch gerbe whose curving degree is wrong
    let manifest = r#"{
        "version": "1",
        "objects": {
            "bad": {"gerbe": {
                "cover": {"dim": 3, "labels": ["u0"], "nerve": [[0]]},
                "g": [], "a": [],
                "b": [[[0], {"dim": 3, "deg": 1, "terms": []}]]
            }}
        },
        "tasks": [{"command": "validate", "objects": ["bad"]}]
    }"#;
    let (code, handle) = parse(manifest);
    assert_eq!(code, GERBELAB_OK, "parse should defer gerbe validation");
    let mut report = ptr::null_mut();
    let code = unsafe { gerbelab_manifest_run(handle, &mut report) };
    assert_eq!(code, GERBELAB_ERR_TASK_FAILED);
    assert_eq!(unsafe { gerbelab_report_all_passed(report) }, 0);
    unsafe {
        gerbelab_report_free(report);
        gerbelab_manifest_free(handle);
    }
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gerbelab_manifest_parse(ptr::null(), &mut out) },
        GERBELAB_ERR_NULL_ARG
    );
    assert_eq!(unsafe { gerbelab_report_all_passed(ptr::null()) }, -1);
    unsafe {
        gerbelab_manifest_free(ptr::null_mut());
        gerbelab_report_free(ptr::null_mut());
        gerbelab_string_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_exists() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gerbelab.h");
    let text = std::fs::read_to_string(header).unwrap();
    for symbol in [
        "gerbelab_manifest_parse",
        "gerbelab_manifest_run",
        "gerbelab_report_to_json",
        "gerbelab_report_to_text",
        "gerbelab_report_all_passed",
        "gerbelab_last_error_message",
        "gerbelab_manifest_free",
        "gerbelab_report_free",
        "gerbelab_string_free",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
