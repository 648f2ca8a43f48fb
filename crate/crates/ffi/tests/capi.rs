use std::ffi::{c_char, CStr, CString};
use std::ptr;

use diffiety_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { diffiety_string_free(s) };
    out
}

fn parse(model: &str, text: &str) -> *mut DiffietyExpr {
    let (m, t) = (CString::new(model).unwrap(), CString::new(text).unwrap());
    let mut e = ptr::null_mut();
    let st = unsafe { diffiety_expr_parse(m.as_ptr(), t.as_ptr(), &mut e) };
    assert_eq!(st, DiffietyStatus::Ok);
    e
}

fn render(e: *const DiffietyExpr, f: DiffietyFormat) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { diffiety_expr_render(e, f, &mut s) }, DiffietyStatus::Ok);
    take(s)
}

#[test]
fn parse_and_render() {
    let e = parse("ode2", "u0*v1 + 2");
    let text = render(e, DiffietyFormat::Text);
    let again = parse("ode2", &text);
    let mut eq = false;
    assert_eq!(unsafe { diffiety_expr_equal(e, again, &mut eq) }, DiffietyStatus::Ok);
    assert!(eq);
    assert!(render(e, DiffietyFormat::Json).contains("\"op\""));
    assert!(!render(e, DiffietyFormat::Latex).is_empty());
    unsafe {
        diffiety_expr_free(e);
        diffiety_expr_free(again);
    }
}

#[test]
fn parse_error_sets_message() {
    let (m, t) = (CString::new("ode2").unwrap(), CString::new("u0 +").unwrap());
    let mut e = ptr::null_mut();
    let st = unsafe { diffiety_expr_parse(m.as_ptr(), t.as_ptr(), &mut e) };
    assert_eq!(st, DiffietyStatus::Parse);
    assert!(e.is_null());
    let msg = unsafe { CStr::from_ptr(diffiety_last_error()) }.to_str().unwrap();
    assert!(msg.contains("unexpected"), "{msg}");
}

#[test]
fn null_arguments_are_rejected() {
    let mut e = ptr::null_mut();
    let st = unsafe { diffiety_expr_parse(ptr::null(), ptr::null(), &mut e) };
    assert_eq!(st, DiffietyStatus::NullArgument);
    let mut s = ptr::null_mut();
    let st = unsafe { diffiety_expr_render(ptr::null(), DiffietyFormat::Text, &mut s) };
    assert_eq!(st, DiffietyStatus::NullArgument);
    unsafe {
        diffiety_expr_free(ptr::null_mut());
        diffiety_string_free(ptr::null_mut());
    }
}

#[test]
fn standard_basis_coefficients() {
    let f = parse("ode2", "u0*v1");
    let mut sb = ptr::null_mut();
    assert_eq!(unsafe { diffiety_standard_basis(f, &mut sb) }, DiffietyStatus::Ok);
    let mut class = DiffietyClassification::DegenerateSecondOrder;
    assert_eq!(
        unsafe { diffiety_standard_basis_classification(sb, &mut class) },
        DiffietyStatus::Ok
    );
    assert_eq!(class, DiffietyClassification::Controllable);

    let name = CString::new("A").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { diffiety_standard_basis_coefficient(sb, name.as_ptr(), &mut a) },
        DiffietyStatus::Ok
    );
    assert_eq!(render(a, DiffietyFormat::Text), "u0");

    let bad = CString::new("Q").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(
        unsafe { diffiety_standard_basis_coefficient(sb, bad.as_ptr(), &mut q) },
        DiffietyStatus::NotFound
    );
    unsafe {
        diffiety_expr_free(a);
        diffiety_standard_basis_free(sb);
        diffiety_expr_free(f);
    }
}

#[test]
fn kdv_flow() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { diffiety_kdv_hierarchy(1, &mut h) }, DiffietyStatus::Ok);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { diffiety_hierarchy_flow(h, &mut q) }, DiffietyStatus::Ok);
    let expected = parse("kdv", "-1/4*q3 - 3/2*q0*q1");
    let mut eq = false;
    unsafe { diffiety_expr_equal(q, expected, &mut eq) };
    assert!(eq, "{}", render(q, DiffietyFormat::Text));
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { diffiety_hierarchy_coefficient(h, 9, &mut b) }, DiffietyStatus::NotFound);
    unsafe {
        diffiety_expr_free(q);
        diffiety_expr_free(expected);
        diffiety_hierarchy_free(h);
    }
}

#[test]
fn run_reports_exit_status() {
    let args: Vec<CString> = ["diffiety", "kdv", "--levels", "1"]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
    let (mut out, mut err, mut code) = (ptr::null_mut(), ptr::null_mut(), -1);
    let st = unsafe { diffiety_run(argv.len(), argv.as_ptr(), &mut out, &mut err, &mut code) };
    assert_eq!(st, DiffietyStatus::Ok);
    assert_eq!(code, 0);
    assert!(take(out).contains("Q1"));
    take(err);
}
