//! C ABI over the `symcube` library.
//!
//! Every fallible function returns a [`SymcubeStatus`]; on failure the
//! message is kept per thread and read back with [`symcube_last_error`].
//! Forms are opaque handles owned by the caller and released with
//! [`symcube_form_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use symcube::hecke::{builtin_coefficients_with, EigenformSpec, GenerationOptions};
use symcube::lvalue::{AfeSettings, TwistedLSeries};
use symcube::moments::FormData;
use symcube::quadchar::{class_number, dirichlet_l1, kronecker, FundamentalDiscriminant};
use symcube::Error;

/// Result codes; values are stable.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymcubeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    Resource = 4,
    Network = 5,
    Integrity = 6,
    Numerical = 7,
    Assertion = 8,
    Panic = 9,
}

impl From<&Error> for SymcubeStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::UnsupportedWeight(_) => SymcubeStatus::InvalidInput,
            Error::Config(_) => SymcubeStatus::Config,
            Error::Resource(_) | Error::Io(_) | Error::InsufficientCoefficients { .. } => SymcubeStatus::Resource,
            Error::Network(_) | Error::CacheMiss { .. } => SymcubeStatus::Network,
            Error::Integrity(_) | Error::DeligneViolation { .. } | Error::MissingValue { .. } => SymcubeStatus::Integrity,
            Error::QuadratureNonconvergence(_)
            | Error::AmbiguousRootNumber { .. }
            | Error::InconsistentRootNumber { .. }
            | Error::Consistency(_) => SymcubeStatus::Numerical,
            _ => SymcubeStatus::Assertion,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), SymcubeStatus>) -> SymcubeStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SymcubeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SymcubeStatus::Panic
        }
    }
}

fn fail(e: Error) -> SymcubeStatus {
    let s = SymcubeStatus::from(&e);
    set_error(e.to_string());
    s
}

fn null() -> SymcubeStatus {
    set_error("null pointer argument".into());
    SymcubeStatus::NullPointer
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, 0 when
/// there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn symcube_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn symcube_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Kronecker symbol `(d/n)`.
#[no_mangle]
pub extern "C" fn symcube_kronecker(d: i64, n: u64) -> i32 {
    kronecker(d, n) as i32
}

/// Class number of the imaginary quadratic field of discriminant `d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symcube_class_number(d: i64, out: *mut u64) -> SymcubeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let h = FundamentalDiscriminant::new(d).and_then(class_number).map_err(fail)?;
        *out = h;
        Ok(())
    })
}

/// `L(1, χ_d)`, cross-checked between the class-number formula and the
/// rapidly converging series.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symcube_l1(d: i64, out: *mut f64) -> SymcubeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = FundamentalDiscriminant::new(d).and_then(dirichlet_l1).map_err(fail)?;
        Ok(())
    })
}

/// Opaque handle: symmetric-cube coefficients and kernel tables of one form.
pub struct SymcubeForm {
    inner: FormData,
}

/// One central value, the fields of a value-store row.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymcubeCentralValue {
    pub d: i64,
    pub epsilon: i32,
    pub l_half: f64,
    pub l1_chi: f64,
    pub n_cut: u64,
}

/// Builds the level-one form of `weight` with `n_max` coefficients and the
/// default numerical settings.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`symcube_form_free`].
#[no_mangle]
pub unsafe extern "C" fn symcube_form_new(weight: u32, n_max: u64, out: *mut *mut SymcubeForm) -> SymcubeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let spec = EigenformSpec::builtin(weight).map_err(fail)?;
        let opts = GenerationOptions { keep_exact: false, ..Default::default() };
        let table = builtin_coefficients_with(&spec, n_max as usize, opts).map_err(fail)?;
        let inner = FormData::new(&table, &AfeSettings::default()).map_err(fail)?;
        *out = Box::into_raw(Box::new(SymcubeForm { inner }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `form` must come from [`symcube_form_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn symcube_form_free(form: *mut SymcubeForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Largest `|d|` whose central value the handle's coefficients support.
///
/// # Safety
/// `form` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn symcube_form_max_discriminant(form: *const SymcubeForm) -> u64 {
    form.as_ref().map_or(0, |f| f.inner.max_computable())
}

/// `L(1/2, sym³ f × χ_d)` with an empirically determined root number.
///
/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symcube_central_value(
    form: *const SymcubeForm,
    d: i64,
    out: *mut SymcubeCentralValue,
) -> SymcubeStatus {
    guard(|| {
        let (Some(f), false) = (form.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let d = FundamentalDiscriminant::new(d).map_err(fail)?;
        let l1 = dirichlet_l1(d).map_err(fail)?;
        let r = f.inner.evaluate(d, l1).map_err(fail)?;
        *out = SymcubeCentralValue { d: r.d, epsilon: r.epsilon as i32, l_half: r.l_half, l1_chi: r.l1_chi, n_cut: r.n_cut as u64 };
        Ok(())
    })
}

/// Root number of `L(s, sym³ f × χ_d)` from the balanced sums.
///
/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn symcube_root_number(form: *const SymcubeForm, d: i64, out: *mut i32) -> SymcubeStatus {
    guard(|| {
        let (Some(f), false) = (form.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let d = FundamentalDiscriminant::new(d).map_err(fail)?;
        let series = TwistedLSeries::new(Arc::clone(&f.inner.coeffs), d);
        *out = symcube::lvalue::root_number(&series, &f.inner.engine).map_err(fail)? as i32;
        Ok(())
    })
}
