//! The C entry points driven from Rust through raw pointers.

use std::ffi::{CStr, CString};
use std::ptr;

use nlsist_ffi::*;

fn sech_samples(n: usize, half: f64, amp: f64) -> Vec<f64> {
    let h = 2.0 * half / (n - 1) as f64;
    (0..n).flat_map(|i| [amp / (-half + i as f64 * h).cosh(), 0.0]).collect()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nlsist_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn soliton_scatters_to_its_eigenvalue() {
    let n = 1537;
    let samples = sech_samples(n, 30.0, 1.0);
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(nlsist_field_new(-30.0, 30.0, n, samples.as_ptr(), &mut u), NlsistStatus::Ok);
        let mut data = ptr::null_mut();
        assert_eq!(nlsist_scatter(u, -3.0, 3.0, 31, &mut data), NlsistStatus::Ok);
        let mut count = 0;
        assert_eq!(nlsist_spectral_eigen_count(data, &mut count), NlsistStatus::Ok);
        assert_eq!(count, 1);
        let mut pair = [0.0; 4];
        assert_eq!(nlsist_spectral_eigenpair(data, 0, pair.as_mut_ptr()), NlsistStatus::Ok);
        assert!(pair[0].abs() < 1e-6 && (pair[1] - 0.5).abs() < 1e-6, "{pair:?}");
        let mut r = vec![0.0; 62];
        assert_eq!(nlsist_spectral_reflection(data, r.as_mut_ptr(), 31), NlsistStatus::Ok);
        assert!(r.iter().all(|v| v.abs() < 1e-5));
        assert_eq!(nlsist_spectral_eigenpair(data, 1, pair.as_mut_ptr()), NlsistStatus::InvalidArgument);

        // the reconstructed potential at x = 0 is sech(0) = 1
        let xs = [0.0, 1.0];
        let mut out = [0.0; 4];
        assert_eq!(nlsist_reconstruct(data, xs.as_ptr(), 2, out.as_mut_ptr()), NlsistStatus::Ok);
        assert!((out[0] - 1.0).abs() < 1e-5 && out[1].abs() < 1e-5, "{out:?}");
        assert!((out[2] - 1.0 / 1f64.cosh()).abs() < 1e-5);

        let mut later = ptr::null_mut();
        assert_eq!(nlsist_spectral_evolve(data, 1.0, 0, &mut later), NlsistStatus::Ok);
        assert_eq!(nlsist_spectral_evolve(data, 1.0, 7, &mut later), NlsistStatus::InvalidArgument);
        nlsist_spectral_free(later);
        nlsist_spectral_free(data);
        nlsist_field_free(u);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut u = ptr::null_mut();
        let one = [0.0, 0.0];
        assert_eq!(nlsist_field_new(0.0, 1.0, 1, one.as_ptr(), &mut u), NlsistStatus::InvalidArgument);
        assert!(last_error().contains("at least 2 points"), "{}", last_error());
        assert!(u.is_null());
        assert_eq!(nlsist_field_new(0.0, 1.0, 2, ptr::null(), &mut u), NlsistStatus::NullPointer);
        let mut count = 0;
        assert_eq!(nlsist_spectral_eigen_count(ptr::null(), &mut count), NlsistStatus::NullPointer);
        let mut out = [0.0; 2];
        assert_eq!(nlsist_parabolic_cylinder(5.0, 0.0, 1.0, 0.0, out.as_mut_ptr()), NlsistStatus::InvalidArgument);
        assert_eq!(nlsist_soliton(0.0, -0.5, 1.0, 0.0, 0.0, 0.0, out.as_mut_ptr()), NlsistStatus::InvalidArgument);
        let missing = CString::new("/nonexistent/field.bin").unwrap();
        assert_eq!(nlsist_field_load(missing.as_ptr(), &mut u), NlsistStatus::Io);
        nlsist_field_free(ptr::null_mut());
        nlsist_spectral_free(ptr::null_mut());
    }
}

#[test]
fn files_and_evolution() {
    let dir = tempfile::tempdir().unwrap();
    let n = 513;
    let samples = sech_samples(n, 20.0, 1.0);
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(nlsist_field_new(-20.0, 20.0, n, samples.as_ptr(), &mut u), NlsistStatus::Ok);
        let path = CString::new(dir.path().join("u.csv").to_str().unwrap()).unwrap();
        assert_eq!(nlsist_field_save(u, path.as_ptr()), NlsistStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(nlsist_field_load(path.as_ptr(), &mut back), NlsistStatus::Ok);
        let (mut a, mut b, mut m) = (0.0, 0.0, 0usize);
        assert_eq!(nlsist_field_grid(back, &mut a, &mut b, &mut m), NlsistStatus::Ok);
        assert_eq!((a, b, m), (-20.0, 20.0, n));
        let mut vals = vec![0.0; 2 * n];
        assert_eq!(nlsist_field_values(back, vals.as_mut_ptr(), n), NlsistStatus::Ok);
        assert_eq!(vals, samples);
        assert_eq!(nlsist_field_values(back, vals.as_mut_ptr(), n - 1), NlsistStatus::InvalidArgument);

        // the stationary soliton only rotates its phase: u(t, 0) = e^{it}
        let mut later = ptr::null_mut();
        assert_eq!(nlsist_evolve_reference(u, 1e-3, 0.5, 1, &mut later), NlsistStatus::Ok);
        assert_eq!(nlsist_field_values(later, vals.as_mut_ptr(), n), NlsistStatus::Ok);
        let mid = n / 2;
        assert!((vals[2 * mid] - 0.5f64.cos()).abs() < 1e-6 && (vals[2 * mid + 1] - 0.5f64.sin()).abs() < 1e-6);
        for f in [u, back, later] {
            nlsist_field_free(f);
        }
    }
}

#[test]
fn closed_forms() {
    let mut out = [0.0; 2];
    unsafe {
        assert_eq!(nlsist_parabolic_cylinder(0.0, 0.0, 1.0, 0.0, out.as_mut_ptr()), NlsistStatus::Ok);
        assert!((out[0] - (-0.25f64).exp()).abs() < 1e-13 && out[1].abs() < 1e-13);
        // z1 = i/2, c1 = -i is sech(x) at t = 0
        assert_eq!(nlsist_soliton(0.0, 0.5, 0.0, -1.0, 0.0, 0.7, out.as_mut_ptr()), NlsistStatus::Ok);
        assert!((out[0] - 1.0 / 0.7f64.cosh()).abs() < 1e-14 && out[1].abs() < 1e-14, "{out:?}");
    }
    let v = unsafe { CStr::from_ptr(nlsist_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
