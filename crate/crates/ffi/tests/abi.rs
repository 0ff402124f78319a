use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::process::Command;
use std::ptr;

use frobtrace_ffi::*;

fn prime_field(p: u64) -> *mut FtField {
    let mut h = ptr::null_mut();
    let status = unsafe { ft_field_new(p, 1, ptr::null(), 0, &mut h) };
    assert_eq!(status, FtStatus::Ok);
    assert!(!h.is_null());
    h
}

fn take(s: *mut c_char) -> serde_json::Value {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { ft_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

fn last_error() -> String {
    let p = ft_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn field_handles() {
    let h = prime_field(7);
    unsafe {
        assert_eq!(ft_field_characteristic(h), 7);
        assert_eq!(ft_field_degree(h), 1);
        ft_field_free(h);
    }

    let modulus = [1i64, 1, 1];
    let mut h = ptr::null_mut();
    let status = unsafe { ft_field_new(2, 2, modulus.as_ptr(), modulus.len(), &mut h) };
    assert_eq!(status, FtStatus::Ok);
    unsafe {
        assert_eq!(ft_field_degree(h), 2);
        ft_field_free(h);
    }

    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ft_field_new(4, 1, ptr::null(), 0, &mut h) }, FtStatus::InvalidField);
    assert!(h.is_null());
    assert!(last_error().contains('4'));

    let reducible = [1i64, 0, 1];
    let status = unsafe { ft_field_new(2, 2, reducible.as_ptr(), 3, &mut h) };
    assert_eq!(status, FtStatus::InvalidField);
    unsafe {
        ft_field_free(ptr::null_mut());
        assert_eq!(ft_field_characteristic(ptr::null()), 0);
    }
}

#[test]
fn trace_through_the_abi() {
    let h = prime_field(2);
    let vars = CString::new("X,Y,Z").unwrap();
    let form = CString::new("(X/(X^3+Y^3+Z^3+1)) dX^dY^dZ").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { ft_trace(h, vars.as_ptr(), form.as_ptr(), 1, &mut out) };
    assert_eq!(status, FtStatus::Ok);
    assert!(ft_last_error().is_null());
    let json = take(out);
    assert_eq!(json["num"], "0");
    assert_eq!(json["e"], 1);
    assert_eq!(json["version"], unsafe { CStr::from_ptr(ft_schema_version()) }.to_str().unwrap());

    let bad = CString::new("(X) dQ").unwrap();
    let status = unsafe { ft_trace(h, vars.as_ptr(), bad.as_ptr(), 1, &mut out) };
    assert_eq!(status, FtStatus::InvalidInput);
    assert!(out.is_null());
    assert!(last_error().contains("'Q'"), "{}", last_error());
    unsafe { ft_field_free(h) };
}

#[test]
fn fermat_matrix_and_fedder() {
    let h = prime_field(2);
    let e = CString::new("x^3+y^3+z^3+w^3:1").unwrap();
    let d = CString::new("H:1").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { ft_trace_matrix(h, ptr::null(), ptr::null(), e.as_ptr(), d.as_ptr(), 1, &mut out) };
    assert_eq!(status, FtStatus::Ok);
    let json = take(out);
    assert_eq!(json["chart"], "w");
    assert_eq!(json["src"]["dim"], 4);
    assert_eq!(json["tgt"]["dim"], 1);
    assert_eq!(json["verdict"]["zero"], true);
    assert_eq!(json["matrix"], serde_json::json!([[[0], [0], [0], [0]]]));

    let f = CString::new("x^3+y^3+z^3+w^3").unwrap();
    let status = unsafe { ft_fedder(h, ptr::null(), f.as_ptr(), &mut out) };
    assert_eq!(status, FtStatus::Ok);
    let json = take(out);
    assert_eq!(json["split"], false);
    assert_eq!(json["certificate_verified"], true);

    let d = CString::new("H:3").unwrap();
    let vars = CString::new("x,y,z").unwrap();
    let status = unsafe { ft_sections(h, vars.as_ptr(), ptr::null(), d.as_ptr(), &mut out) };
    assert_eq!(status, FtStatus::Ok);
    assert_eq!(take(out)["dim"], 1);
    unsafe { ft_field_free(h) };
}

#[test]
fn demo_report() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ft_demo_fermat_cubic(&mut out) }, FtStatus::Ok);
    let json = take(out);
    assert_eq!(json["passed"], true);
    assert_eq!(json["h0"], 4);
}

#[test]
fn null_arguments() {
    let mut out = ptr::null_mut();
    let f = CString::new("x").unwrap();
    assert_eq!(
        unsafe { ft_fedder(ptr::null(), ptr::null(), f.as_ptr(), &mut out) },
        FtStatus::NullPointer
    );
    let h = prime_field(3);
    assert_eq!(
        unsafe { ft_fedder(h, ptr::null(), ptr::null(), &mut out) },
        FtStatus::NullPointer
    );
    assert_eq!(
        unsafe { ft_fedder(h, ptr::null(), f.as_ptr(), ptr::null_mut()) },
        FtStatus::NullPointer
    );
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { ft_fedder(h, ptr::null(), invalid.as_ptr() as *const c_char, &mut out) },
        FtStatus::InvalidUtf8
    );
    let dup = CString::new("x,x").unwrap();
    assert_eq!(
        unsafe { ft_fedder(h, dup.as_ptr(), f.as_ptr(), &mut out) },
        FtStatus::InvalidInput
    );
    assert!(last_error().contains("duplicate"));
    unsafe { ft_field_free(h) };
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/frobtrace.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ft_field_new", "ft_trace_matrix", "ft_last_error", "FT_STATUS_PANIC", "typedef struct FtField FtField"] {
        assert!(text.contains(name), "header lacks {}", name);
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libfrobtrace_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipped", lib.display());
        return;
    }
    let bin = profile_dir.join("fermat_c_example");
    let Ok(status) = Command::new("cc")
        .arg(manifest.join("examples/fermat.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"zero\": true"), "{}", stdout);
    assert!(stdout.contains("parse error status 4"), "{}", stdout);
}
