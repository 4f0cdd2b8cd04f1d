use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use symcube_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { symcube_last_error(buf.as_mut_ptr(), buf.len()) };
    if n == 0 {
        return String::new();
    }
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn arithmetic_entry_points() {
    assert_eq!(symcube_kronecker(-7, 2), 1);
    assert_eq!(symcube_kronecker(-7, 3), -1);
    assert_eq!(symcube_kronecker(-7, 7), 0);

    let mut h = 0u64;
    assert_eq!(unsafe { symcube_class_number(-23, &mut h) }, SymcubeStatus::Ok);
    assert_eq!(h, 3);
    assert_eq!(unsafe { symcube_class_number(-24, &mut h) }, SymcubeStatus::Ok);
    assert_eq!(h, 2);

    let mut l1 = 0.0;
    assert_eq!(unsafe { symcube_l1(-4, &mut l1) }, SymcubeStatus::Ok);
    assert!((l1 - std::f64::consts::PI / 4.0).abs() < 1e-12);
}

#[test]
fn errors_are_reported() {
    let mut h = 0u64;
    assert_eq!(unsafe { symcube_class_number(-9, &mut h) }, SymcubeStatus::InvalidInput);
    assert!(last_error().contains("-9"), "{}", last_error());
    assert_eq!(unsafe { symcube_class_number(-7, ptr::null_mut()) }, SymcubeStatus::NullPointer);
    assert!(unsafe { symcube_last_error(ptr::null_mut(), 0) } > 0);

    let mut form = ptr::null_mut();
    assert_eq!(unsafe { symcube_form_new(14, 100, &mut form) }, SymcubeStatus::InvalidInput);
    assert!(form.is_null());
    unsafe { symcube_form_free(ptr::null_mut()) };
    assert_eq!(unsafe { symcube_form_max_discriminant(ptr::null()) }, 0);
}

#[test]
fn form_handle_round_trip() {
    let mut form = ptr::null_mut();
    assert_eq!(unsafe { symcube_form_new(12, 200_000, &mut form) }, SymcubeStatus::Ok, "{}", last_error());
    let max_d = unsafe { symcube_form_max_discriminant(form) };
    assert!(max_d >= 60, "{max_d}");

    let mut cv = SymcubeCentralValue::default();
    assert_eq!(unsafe { symcube_central_value(form, -7, &mut cv) }, SymcubeStatus::Ok, "{}", last_error());
    assert_eq!(cv.d, -7);
    assert_eq!(cv.epsilon, -1);
    assert_eq!(cv.l_half, 0.0);
    assert!(cv.n_cut > 0);

    let mut eps = 0;
    assert_eq!(unsafe { symcube_root_number(form, -11, &mut eps) }, SymcubeStatus::Ok);
    assert_eq!(eps, -1);

    let big = -(((max_d + 1000) | 3) as i64);
    let status = unsafe { symcube_central_value(form, big, &mut cv) };
    assert!(matches!(status, SymcubeStatus::Resource | SymcubeStatus::InvalidInput), "{status:?}");
    unsafe { symcube_form_free(form) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(symcube_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/symcube.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "symcube_last_error",
        "symcube_kronecker",
        "symcube_class_number",
        "symcube_l1",
        "symcube_form_new",
        "symcube_form_free",
        "symcube_central_value",
        "symcube_root_number",
        "SYMCUBE_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
