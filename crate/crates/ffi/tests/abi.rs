use std::ffi::{CStr, CString};
use std::ptr;

use anticonc_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ac_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(expr: &str, n: usize) -> *mut AcPolynomial {
    let mut p = ptr::null_mut();
    let e = cstr(expr);
    assert_eq!(unsafe { ac_poly_parse(e.as_ptr(), n, &mut p) }, AcStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(ac_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn polynomial_round_trip() {
    let p = parse("x1^2 + 3*x1*x2 - 1/2", 2);
    unsafe {
        let mut dim = 0usize;
        assert_eq!(ac_poly_dim(p, &mut dim), AcStatus::Ok);
        assert_eq!(dim, 2);

        let mut deg = 0i32;
        assert_eq!(ac_poly_degree(p, &mut deg), AcStatus::Ok);
        assert_eq!(deg, 2);

        let x = [1.5, -2.0];
        let mut v = 0.0;
        assert_eq!(ac_poly_evaluate(p, x.as_ptr(), 2, &mut v), AcStatus::Ok);
        assert!((v - (2.25 - 9.0 - 0.5)).abs() < 1e-14);

        // Degree-2 coefficients are (1, 3), so the level norm is sqrt(10).
        let mut c = 0.0;
        assert_eq!(ac_poly_coeff_level(p, 2, &mut c), AcStatus::Ok);
        assert!((c - 10f64.sqrt()).abs() < 1e-14);

        let s = ac_poly_to_string(p);
        assert!(!s.is_null());
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        ac_string_free(s);
        let q = parse(&text, 2);
        let mut w = 0.0;
        assert_eq!(ac_poly_evaluate(q, x.as_ptr(), 2, &mut w), AcStatus::Ok);
        assert_eq!(v, w);
        ac_poly_free(q);
        ac_poly_free(p);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        let bad = cstr("x1 + + ");
        assert_eq!(ac_poly_parse(bad.as_ptr(), 1, &mut p), AcStatus::ParseError);
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(ac_poly_parse(ptr::null(), 1, &mut p), AcStatus::NullPointer);
        assert!(last_error().contains("expr"));

        let invalid = [0xffu8 as std::ffi::c_char, 0];
        assert_eq!(ac_poly_parse(invalid.as_ptr(), 1, &mut p), AcStatus::InvalidUtf8);

        let f = parse("x1*x2", 2);
        let x = [1.0];
        let mut v = 0.0;
        assert_eq!(ac_poly_evaluate(f, x.as_ptr(), 1, &mut v), AcStatus::InvalidArgument);
        assert_eq!(ac_poly_dim(f, ptr::null_mut()), AcStatus::NullPointer);
        ac_poly_free(f);

        // A success clears the error slot.
        let mut d = 0usize;
        let g = parse("x1", 1);
        assert_eq!(ac_poly_dim(g, &mut d), AcStatus::Ok);
        assert!(ac_last_error().is_null());
        ac_poly_free(g);

        ac_poly_free(ptr::null_mut());
        ac_ortho_free(ptr::null_mut());
        ac_string_free(ptr::null_mut());
    }
}

#[test]
fn gaussian_ortho_constants_are_root_factorials() {
    // Orthonormal Hermite polynomials He_d / sqrt(d!) give <p_d, x^d> = sqrt(d!).
    unsafe {
        let mut s = ptr::null_mut();
        let m = cstr("gaussian");
        assert_eq!(ac_ortho_new(m.as_ptr(), 6, &mut s), AcStatus::Ok);
        let mut maxdeg = 0usize;
        assert_eq!(ac_ortho_maxdeg(s, &mut maxdeg), AcStatus::Ok);
        assert_eq!(maxdeg, 6);
        let mut fact = 1.0f64;
        for d in 0..=6usize {
            if d > 0 {
                fact *= d as f64;
            }
            let mut c = 0.0;
            assert_eq!(ac_ortho_constant(s, d, &mut c), AcStatus::Ok);
            assert!((c - fact.sqrt()).abs() < 1e-9 * fact.sqrt(), "d={d}: {c}");
        }
        let mut c = 0.0;
        assert_eq!(ac_ortho_constant(s, 7, &mut c), AcStatus::InvalidArgument);
        ac_ortho_free(s);

        let bad = cstr("no-such-measure");
        assert_ne!(ac_ortho_new(bad.as_ptr(), 3, &mut s), AcStatus::Ok);
        assert!(s.is_null());
    }
}

#[test]
fn ball_spectrum_buffers() {
    unsafe {
        let mut eta = [0.0; 4];
        let mut mult = [0u64; 4];
        let mut len = 0usize;
        assert_eq!(ac_ball_spectrum_theoretical(3, 2, eta.as_mut_ptr(), mult.as_mut_ptr(), 4, &mut len), AcStatus::Ok);
        assert_eq!(len, 2);
        // Level i = 0 carries the harmonic degree-2 part (dimension 5).
        assert!((eta[0] - 5.0 / 7.0).abs() < 1e-15 && (eta[1] - 2.0 / 7.0).abs() < 1e-15);
        assert_eq!(&mult[..2], &[5, 1]);

        assert_eq!(
            ac_ball_spectrum_theoretical(3, 2, eta.as_mut_ptr(), mult.as_mut_ptr(), 1, &mut len),
            AcStatus::BufferTooSmall
        );
        assert_eq!(len, 2);

        // Six eigenvalues of the 6x6 matrix for symmetric 2-tensors in R^3.
        let mut vals = [0.0; 6];
        assert_eq!(ac_ball_spectrum_empirical(3, 2, vals.as_mut_ptr(), 6, &mut len), AcStatus::Ok);
        assert_eq!(len, 6);
        assert!((vals[0] - 2.0 / 7.0).abs() < 1e-12);
        for v in &vals[1..] {
            assert!((v - 5.0 / 7.0).abs() < 1e-12, "{vals:?}");
        }
    }
}

#[test]
fn ball_closed_forms() {
    unsafe {
        // Uniform on the Euclidean ball of radius z has E x_1^2 = z^2 / (n + 2).
        let mut z = 0.0;
        assert_eq!(ac_ball_isotropic_scale(5, 2.0, &mut z), AcStatus::Ok);
        assert!((z - 7f64.sqrt()).abs() < 1e-12);
        assert_eq!(ac_ball_isotropic_scale(0, 2.0, &mut z), AcStatus::InvalidArgument);

        let mut m = 0.0;
        assert_eq!(ac_gamma_ratio_moment(4, 2.0, 2.0, &mut m), AcStatus::Ok);
        assert!((m - 2.0).abs() < 1e-12);

        let mut v = 0.0;
        assert_eq!(ac_norm_power_variance(16, 2, &mut v), AcStatus::Ok);
        assert!(v > 0.0 && v.is_finite());
    }
}

#[test]
fn variance_mc_is_reproducible() {
    let p = parse("x1 + x2", 2);
    let m = cstr("gaussian");
    unsafe {
        let mut a = AcEstimate::default();
        let mut b = AcEstimate::default();
        assert_eq!(ac_variance_mc(p, m.as_ptr(), 200_000, 11, &mut a), AcStatus::Ok);
        assert_eq!(ac_variance_mc(p, m.as_ptr(), 200_000, 11, &mut b), AcStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(a.samples, 200_000);
        assert_eq!(a.seed, 11);
        assert!((a.value - 2.0).abs() < 5.0 * a.std_error, "{a:?}");

        let bad = cstr("ball:");
        assert_ne!(ac_variance_mc(p, bad.as_ptr(), 1000, 1, &mut a), AcStatus::Ok);
        ac_poly_free(p);
    }
}
