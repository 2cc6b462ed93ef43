//! C ABI for the `anticonc` library.
//!
//! Conventions:
//! - Every fallible function returns an [`AcStatus`] and writes results
//!   through out-pointers.
//! - A failure leaves a message for [`ac_last_error`] on the calling thread.
//! - Handles come from `*_new`/`*_parse` functions and must be released with
//!   the matching `*_free`; passing `NULL` to a free function is a no-op.
//! - Panics never cross the boundary. They are reported as
//!   [`AcStatus::Panic`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anticonc::ballgeom::{gamma_ratio_moment, isotropic_scale, norm_power_variance};
use anticonc::cli::parse_sampler;
use anticonc::estimators::variance_mc;
use anticonc::measures::Measure1D;
use anticonc::orthopoly::{gram_schmidt, OrthoSystem};
use anticonc::tensorspec::{cov_matrix_ball, theoretical_spectrum};
use anticonc::{Error, Polynomial};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    NumericalError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque polynomial handle.
pub struct AcPolynomial(Polynomial);

/// Opaque orthogonal-polynomial system handle.
pub struct AcOrthoSystem(OrthoSystem);

/// A Monte Carlo estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AcEstimate {
    pub value: f64,
    /// Standard error (named to avoid the C `stderr` macro).
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> AcStatus {
    match e {
        Error::Parse(_) => AcStatus::ParseError,
        Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::SizeGuard { .. }
        | Error::ZeroPolynomial => AcStatus::InvalidArgument,
        _ => AcStatus::NumericalError,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (AcStatus, String)>) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AcStatus::Panic
        }
    }
}

type Fallible<T> = Result<T, (AcStatus, String)>;

fn lib<T>(r: anticonc::Result<T>) -> Fallible<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn non_null<'a, T>(p: *const T, what: &str) -> Fallible<&'a T> {
    // SAFETY: the caller promises that non-null pointers are valid.
    unsafe { p.as_ref() }.ok_or((AcStatus::NullPointer, format!("{what} is NULL")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Fallible<&'a mut T> {
    // SAFETY: the caller promises that non-null pointers are valid and unaliased.
    unsafe { p.as_mut() }.ok_or((AcStatus::NullPointer, format!("{what} is NULL")))
}

fn c_str<'a>(p: *const c_char, what: &str) -> Fallible<&'a str> {
    if p.is_null() {
        return Err((AcStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and NUL-terminated per the API contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| (AcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn slice<'a>(p: *const f64, len: usize, what: &str) -> Fallible<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err((AcStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: `p` points to `len` readable doubles per the API contract.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

/// Message of the last failure on this thread, or `NULL`. The pointer stays
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ac_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ------------------------------------------------------------ polynomials

/// Parses `expr` over variables `x1..xn`.
///
/// # Safety
/// `expr` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_parse(expr: *const c_char, n: usize, out: *mut *mut AcPolynomial) -> AcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let f = lib(anticonc::parse_poly(c_str(expr, "expr")?, n).map_err(Error::from))?;
        *out = Box::into_raw(Box::new(AcPolynomial(f)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`ac_poly_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_free(p: *mut AcPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_dim(p: *const AcPolynomial, out: *mut usize) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(p, "poly")?.0.dim();
        Ok(())
    })
}

/// Total degree, or `-1` for the zero polynomial.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_degree(p: *const AcPolynomial, out: *mut i32) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(p, "poly")?.0.degree().map_or(-1, |d| d as i32);
        Ok(())
    })
}

/// Evaluates at `x[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `x` must point to `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_evaluate(
    p: *const AcPolynomial,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> AcStatus {
    guard(|| {
        let f = &non_null(p, "poly")?.0;
        *out_ptr(out, "out")? = lib(f.evaluate(slice(x, len, "x")?))?;
        Ok(())
    })
}

/// `coeff_d(f)`: Euclidean norm of the degree-`d` coefficients.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_coeff_level(p: *const AcPolynomial, d: u32, out: *mut f64) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(p, "poly")?.0.coeff_level(d);
        Ok(())
    })
}

/// Canonical text form; release with [`ac_string_free`]. `NULL` on failure.
///
/// # Safety
/// `p` must be a live handle or `NULL`.
#[no_mangle]
pub unsafe extern "C" fn ac_poly_to_string(p: *const AcPolynomial) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let s = non_null(p, "poly")?.0.to_string();
        result = CString::new(s).map_err(|_| (AcStatus::NumericalError, "interior NUL".to_string()))?.into_raw();
        Ok(())
    });
    result
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------- orthogonal systems

/// Orthonormal polynomials up to `maxdeg` for a measure such as
/// `"uniform"`, `"gaussian"`, `"laplace:iso"` or `"pexp:1.5:iso"`.
///
/// # Safety
/// `measure` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ortho_new(measure: *const c_char, maxdeg: usize, out: *mut *mut AcOrthoSystem) -> AcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let mu: Measure1D = lib(c_str(measure, "measure")?.parse())?;
        let sys = lib(gram_schmidt(&mu, maxdeg))?;
        *out = Box::into_raw(Box::new(AcOrthoSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`ac_ortho_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ac_ortho_free(s: *mut AcOrthoSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ortho_maxdeg(s: *const AcOrthoSystem, out: *mut usize) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = non_null(s, "system")?.0.maxdeg();
        Ok(())
    })
}

/// `c_{μ,d} = ⟨p_d, x^d⟩`.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ortho_constant(s: *const AcOrthoSystem, d: usize, out: *mut f64) -> AcStatus {
    guard(|| {
        let sys = &non_null(s, "system")?.0;
        if d > sys.maxdeg() {
            return Err((AcStatus::InvalidArgument, format!("degree {d} exceeds maxdeg {}", sys.maxdeg())));
        }
        *out_ptr(out, "out")? = sys.constant(d);
        Ok(())
    })
}

// -------------------------------------------------------------- spectra

fn fill<T: Copy>(values: &[T], buf: *mut T, cap: usize, len_out: *mut usize) -> Fallible<()> {
    *out_ptr(len_out, "len_out")? = values.len();
    if values.len() > cap {
        return Err((AcStatus::BufferTooSmall, format!("need {} entries, buffer holds {cap}", values.len())));
    }
    if !values.is_empty() {
        let buf = out_ptr(buf, "buffer")? as *mut T;
        // SAFETY: `buf` holds at least `cap >= values.len()` entries.
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
    }
    Ok(())
}

/// Closed-form levels `η_i` and multiplicities for the isotropic Euclidean
/// ball, indexed by `i = 0..=d/2` (level `i` belongs to harmonics of degree
/// `d - 2i`). `*len_out` receives the level count even when the buffers are too
/// small.
///
/// # Safety
/// `eta` and `mult` must hold `cap` entries; `len_out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ball_spectrum_theoretical(
    n: usize,
    d: u32,
    eta: *mut f64,
    mult: *mut u64,
    cap: usize,
    len_out: *mut usize,
) -> AcStatus {
    guard(|| {
        let levels = lib(theoretical_spectrum(n, d))?;
        let e: Vec<f64> = levels.iter().map(|l| l.eta_f64()).collect();
        let m: Vec<u64> = levels.iter().map(|l| l.multiplicity as u64).collect();
        fill(&e, eta, cap, len_out)?;
        fill(&m, mult, cap, len_out)
    })
}

/// Ascending eigenvalues of `C̃` for the isotropic Euclidean ball, computed
/// from the exact covariance matrix.
///
/// # Safety
/// `values` must hold `cap` doubles; `len_out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ball_spectrum_empirical(
    n: usize,
    d: u32,
    values: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> AcStatus {
    guard(|| {
        let bundle = lib(cov_matrix_ball(n, d))?;
        fill(&bundle.eig_s.values, values, cap, len_out)
    })
}

// ----------------------------------------------------------------- balls

/// `z_{p,n}`, the radius making the uniform `L_p` ball isotropic.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_ball_isotropic_scale(n: usize, p: f64, out: *mut f64) -> AcStatus {
    guard(|| {
        if n == 0 || !(p > 0.0) {
            return Err((AcStatus::InvalidArgument, format!("need n >= 1 and p > 0, got n={n}, p={p}")));
        }
        *out_ptr(out, "out")? = isotropic_scale(n, p);
        Ok(())
    })
}

/// `E‖Z‖_p^k = Γ((n+k)/p)/Γ(n/p)`.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_gamma_ratio_moment(n: usize, p: f64, k: f64, out: *mut f64) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = lib(gamma_ratio_moment(n, p, k))?;
        Ok(())
    })
}

/// `Var(n^{-1/2}‖X‖_p^p)` on the isotropic `L_p` ball for even `p`.
///
/// # Safety
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_norm_power_variance(n: usize, p: u32, out: *mut f64) -> AcStatus {
    guard(|| {
        *out_ptr(out, "out")? = lib(norm_power_variance(n, p))?.to_f64();
        Ok(())
    })
}

// ---------------------------------------------------------- Monte Carlo

/// Monte Carlo variance of `f(X)` where `X` follows `measure` in dimension
/// `dim(f)`: a base measure name (product of copies) or `"ball:<p>"`.
///
/// # Safety
/// `p` must be a live handle, `measure` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_variance_mc(
    p: *const AcPolynomial,
    measure: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut AcEstimate,
) -> AcStatus {
    guard(|| {
        let f = &non_null(p, "poly")?.0;
        let sampler = lib(parse_sampler(c_str(measure, "measure")?, f.dim()))?;
        let r = lib(variance_mc(f, &sampler, samples, seed))?;
        *out_ptr(out, "out")? = AcEstimate { value: r.value, std_error: r.stderr, samples: r.samples, seed };
        Ok(())
    })
}
