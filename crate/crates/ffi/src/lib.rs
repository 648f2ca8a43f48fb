//! C ABI over `diffiety-core`.
//!
//! Every function returns a [`DiffietyStatus`]; results come back through
//! out-pointers. Handles are opaque and must be released with the matching
//! `*_free` function. Strings returned to the caller are released with
//! [`diffiety_string_free`]. On failure, [`diffiety_last_error`] describes
//! what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diffiety_core::cli::{self, render, ModelKind, Vocabulary};
use diffiety_core::kdv::{self, Hierarchy};
use diffiety_core::reduce::ode2::{self, Classification, StandardBasis};
use diffiety_core::{Error, Expr};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffietyStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Compute = 4,
    NotFound = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffietyFormat {
    Text = 0,
    Latex = 1,
    Json = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffietyClassification {
    Controllable = 0,
    DegenerateFirstOrder = 1,
    DegenerateSecondOrder = 2,
}

/// An exact expression.
pub struct DiffietyExpr {
    inner: Expr,
}

/// Standard basis of `u'' = F(x, u, v, u', v', v'')`.
pub struct DiffietyStandardBasis {
    inner: StandardBasis,
}

/// One level of the KdV hierarchy.
pub struct DiffietyHierarchy {
    inner: Hierarchy,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (DiffietyStatus, String)>) -> DiffietyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiffietyStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DiffietyStatus::Panic
        }
    }
}

type Fallible<T> = Result<T, (DiffietyStatus, String)>;

fn compute(e: Error) -> (DiffietyStatus, String) {
    (DiffietyStatus::Compute, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Fallible<&'a str> {
    if p.is_null() {
        return Err((DiffietyStatus::NullArgument, format!("{what} is null")));
    }
    // SAFETY: caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (DiffietyStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Fallible<&'a T> {
    // SAFETY: caller passes a live handle or null.
    unsafe { p.as_ref() }.ok_or_else(|| (DiffietyStatus::NullArgument, format!("{what} is null")))
}

fn check_out<T>(out: *mut T) -> Fallible<()> {
    if out.is_null() {
        Err((DiffietyStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn parse_kind(text: &str) -> Fallible<ModelKind> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let kind = match words.as_slice() {
        ["ode2"] => ModelKind::Ode2,
        ["pde1"] => ModelKind::Pde1,
        ["pencil"] => ModelKind::Pencil,
        ["kdv"] => ModelKind::Kdv,
        ["jets", m, n] => match (m.parse(), n.parse()) {
            (Ok(m), Ok(n)) if (1..=9).contains(&m) && (1..=9).contains(&n) => ModelKind::Jets { m, n },
            _ => return Err((DiffietyStatus::Parse, format!("bad jets dimensions in `{text}`"))),
        },
        _ => return Err((DiffietyStatus::Parse, format!("unknown model kind `{text}`"))),
    };
    Ok(kind)
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn diffiety_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diffiety_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse `text` with the coordinate vocabulary of `model` (`"ode2"`,
/// `"pde1"`, `"pencil"`, `"kdv"` or `"jets m n"`).
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_expr_parse(
    model: *const c_char,
    text: *const c_char,
    out: *mut *mut DiffietyExpr,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let kind = parse_kind(unsafe { read_str(model, "model") }?)?;
        let text = unsafe { read_str(text, "text") }?;
        let e = cli::parse_expr(text, &Vocabulary::new(kind))
            .map_err(|e| (DiffietyStatus::Parse, e.to_string()))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyExpr { inner: e })) };
        Ok(())
    })
}

/// # Safety
/// `expr` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_expr_render(
    expr: *const DiffietyExpr,
    format: DiffietyFormat,
    out: *mut *mut c_char,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let e = &unsafe { deref(expr, "expr") }?.inner;
        let s = match format {
            DiffietyFormat::Text => e.text(),
            DiffietyFormat::Latex => e.latex(),
            DiffietyFormat::Json => render::expr_json(e).to_string(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = to_c(s) };
        Ok(())
    })
}

/// Whether two expressions are identical in canonical form.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_expr_equal(
    a: *const DiffietyExpr,
    b: *const DiffietyExpr,
    out: *mut bool,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        // SAFETY: checked non-null above.
        unsafe { *out = a.inner == b.inner };
        Ok(())
    })
}

/// # Safety
/// `expr` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diffiety_expr_free(expr: *mut DiffietyExpr) {
    if !expr.is_null() {
        // SAFETY: allocated by `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(expr) });
    }
}

/// Standard basis for the right-hand side `f` (parsed with model `"ode2"`).
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_standard_basis(
    f: *const DiffietyExpr,
    out: *mut *mut DiffietyStandardBasis,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let f = &unsafe { deref(f, "f") }?.inner;
        let sb = ode2::standard_basis(f).map_err(compute)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyStandardBasis { inner: sb })) };
        Ok(())
    })
}

/// Coefficient `A`, `B`, `C`, `M`, `N` or `Delta` of a standard basis.
///
/// # Safety
/// `sb` must be a live handle, `name` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_standard_basis_coefficient(
    sb: *const DiffietyStandardBasis,
    name: *const c_char,
    out: *mut *mut DiffietyExpr,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let sb = &unsafe { deref(sb, "sb") }?.inner;
        let e = match unsafe { read_str(name, "name") }? {
            "A" => &sb.a,
            "B" => &sb.b,
            "C" => &sb.c,
            "M" => &sb.m,
            "N" => &sb.n,
            "Delta" => &sb.det,
            other => return Err((DiffietyStatus::NotFound, format!("no coefficient `{other}`"))),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyExpr { inner: e.clone() })) };
        Ok(())
    })
}

/// # Safety
/// `sb` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_standard_basis_classification(
    sb: *const DiffietyStandardBasis,
    out: *mut DiffietyClassification,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let sb = &unsafe { deref(sb, "sb") }?.inner;
        let c = match sb.classification {
            Classification::Controllable => DiffietyClassification::Controllable,
            Classification::DegenerateFirstOrder => DiffietyClassification::DegenerateFirstOrder,
            Classification::DegenerateSecondOrder => DiffietyClassification::DegenerateSecondOrder,
        };
        // SAFETY: checked non-null above.
        unsafe { *out = c };
        Ok(())
    })
}

/// # Safety
/// `sb` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diffiety_standard_basis_free(sb: *mut DiffietyStandardBasis) {
    if !sb.is_null() {
        // SAFETY: allocated by `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(sb) });
    }
}

/// KdV hierarchy up to `level`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_kdv_hierarchy(level: u32, out: *mut *mut DiffietyHierarchy) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let h = kdv::hierarchy(level as usize).map_err(compute)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyHierarchy { inner: h })) };
        Ok(())
    })
}

/// Coefficient `B_k`, `0 ≤ k ≤ level`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_hierarchy_coefficient(
    h: *const DiffietyHierarchy,
    k: u32,
    out: *mut *mut DiffietyExpr,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let h = &unsafe { deref(h, "h") }?.inner;
        let b = h
            .b
            .get(k as usize)
            .ok_or_else(|| (DiffietyStatus::NotFound, format!("no coefficient B{k}")))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyExpr { inner: b.clone() })) };
        Ok(())
    })
}

/// Evolution right-hand side `Q` of the level.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_hierarchy_flow(
    h: *const DiffietyHierarchy,
    out: *mut *mut DiffietyExpr,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        let h = &unsafe { deref(h, "h") }?.inner;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(DiffietyExpr { inner: h.q.clone() })) };
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diffiety_hierarchy_free(h: *mut DiffietyHierarchy) {
    if !h.is_null() {
        // SAFETY: allocated by `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Run a command-line invocation (`argv[0]` is the program name). Standard
/// output is returned in `out`, diagnostics in `err`, the exit status in
/// `code`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn diffiety_run(
    argc: usize,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
    code: *mut i32,
) -> DiffietyStatus {
    guard(|| {
        check_out(out)?;
        check_out(err)?;
        check_out(code)?;
        if argv.is_null() && argc > 0 {
            return Err((DiffietyStatus::NullArgument, "argv is null".into()));
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            // SAFETY: caller guarantees `argc` entries.
            let p = unsafe { *argv.add(i) };
            args.push(unsafe { read_str(p, "argument") }?.to_string());
        }
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let status = cli::run(args, &mut o, &mut e);
        // SAFETY: checked non-null above.
        unsafe {
            *out = to_c(String::from_utf8_lossy(&o).into_owned());
            *err = to_c(String::from_utf8_lossy(&e).into_owned());
            *code = status;
        }
        Ok(())
    })
}
