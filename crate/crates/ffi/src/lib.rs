//! C ABI for the nlsist toolkit.
//!
//! Fields and spectral data cross the boundary as opaque handles created and
//! destroyed here. Every fallible call returns an [`NlsistStatus`]; the text
//! of the most recent error on the calling thread is available from
//! [`nlsist_last_error`]. Complex arrays are interleaved `re, im` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nlsist::asymptotics::parabolic_cylinder;
use nlsist::backlund::soliton_closed_form;
use nlsist::flow::{evolve_spectral, Convention};
use nlsist::integrator::{evolve_reference, IntegratorConfig, SplitScheme};
use nlsist::io::{load_field, save_field};
use nlsist::rh::{RhConfig, RhSolver};
use nlsist::scattering::{scatter, SearchBox};
use nlsist::types::{ComplexField1D, RealGrid, SpectralData};
use nlsist::{Error, C64};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsistStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonGeneric = 3,
    SpectrumFailure = 4,
    IllConditioned = 5,
    Accuracy = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
}

/// Sampled complex field on a uniform grid.
pub struct NlsistField(ComplexField1D);

/// Reflection coefficient samples plus discrete spectrum.
pub struct NlsistSpectral(SpectralData);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> NlsistStatus {
    match err {
        Error::InvalidGrid(_)
        | Error::NonFinite(_)
        | Error::Domain(_)
        | Error::OutOfRange { .. }
        | Error::UnsupportedRange(_)
        | Error::RayAmbiguity(_)
        | Error::Arity(_)
        | Error::StationaryCollision { .. }
        | Error::VanishingReflection(_)
        | Error::DomainTooSmall(_)
        | Error::DegenerateBacklund => NlsistStatus::InvalidArgument,
        Error::NonGeneric { .. } => NlsistStatus::NonGeneric,
        Error::EigenvalueCount { .. } | Error::NotEigenvalue(_) | Error::NonSimpleZero(_) => NlsistStatus::SpectrumFailure,
        Error::IllConditioned { .. } => NlsistStatus::IllConditioned,
        Error::Accuracy(_) => NlsistStatus::Accuracy,
        Error::Io(_) => NlsistStatus::Io,
        Error::Parse { .. } | Error::Json(_) | Error::Manifest(_) => NlsistStatus::Parse,
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (NlsistStatus, String)>) -> NlsistStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlsistStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NlsistStatus::Panic
        }
    }
}

trait Checked<T> {
    fn checked(self) -> Result<T, (NlsistStatus, String)>;
}

impl<T> Checked<T> for nlsist::Result<T> {
    fn checked(self) -> Result<T, (NlsistStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (NlsistStatus, String) {
    (NlsistStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (NlsistStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (NlsistStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (NlsistStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (NlsistStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn write_complex(out: &mut [f64], values: &[C64]) {
    for (pair, v) in out.chunks_exact_mut(2).zip(values) {
        pair[0] = v.re;
        pair[1] = v.im;
    }
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nlsist_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlsist_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a field from `n` interleaved samples on `[x_min, x_max]`.
///
/// # Safety
/// `values` must point to `2 n` doubles and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_new(
    x_min: f64,
    x_max: f64,
    n: usize,
    values: *const f64,
    out: *mut *mut NlsistField,
) -> NlsistStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = RealGrid::new(x_min, x_max, n).checked()?;
        let raw = std::slice::from_raw_parts(values, 2 * n);
        let samples = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let field = ComplexField1D::new(grid, samples).checked()?;
        *out = Box::into_raw(Box::new(NlsistField(field)));
        Ok(())
    })
}

/// Release a field; null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_free(field: *mut NlsistField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Grid of a field.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_grid(
    field: *const NlsistField,
    x_min: *mut f64,
    x_max: *mut f64,
    n: *mut usize,
) -> NlsistStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if x_min.is_null() || x_max.is_null() || n.is_null() {
            return Err(null("grid output"));
        }
        let g = f.0.grid();
        (*x_min, *x_max, *n) = (g.x_min(), g.x_max(), g.len());
        Ok(())
    })
}

/// Copy the samples into `out`, which holds `2 n` doubles.
///
/// # Safety
/// `out` must point to `2 n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_values(field: *const NlsistField, out: *mut f64, n: usize) -> NlsistStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if n != f.0.grid().len() {
            return Err((NlsistStatus::InvalidArgument, format!("buffer for {n} samples, field has {}", f.0.grid().len())));
        }
        write_complex(out_slice(out, 2 * n, "out")?, f.0.values());
        Ok(())
    })
}

/// Load a field from a binary container or `.csv` file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_load(path: *const c_char, out: *mut *mut NlsistField) -> NlsistStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = load_field(path_arg(path)?).checked()?;
        *out = Box::into_raw(Box::new(NlsistField(f)));
        Ok(())
    })
}

/// Save a field; the format follows the extension (`.csv` or binary).
///
/// # Safety
/// `field` and `path` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlsist_field_save(field: *const NlsistField, path: *const c_char) -> NlsistStatus {
    guard(|| save_field(path_arg(path)?, &deref(field, "field")?.0).checked())
}

/// Split-step evolution of `u0` to time `t` with step `dt`; `fourth_order`
/// selects the fourth-order splitting.
///
/// # Safety
/// `u0` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlsist_evolve_reference(
    u0: *const NlsistField,
    dt: f64,
    t: f64,
    fourth_order: c_int,
    out: *mut *mut NlsistField,
) -> NlsistStatus {
    guard(|| {
        let u = deref(u0, "u0")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let scheme = if fourth_order != 0 { SplitScheme::FourthOrderSplit } else { SplitScheme::StrangSplit };
        let cfg = IntegratorConfig { dt, t_end: t, scheme, ..Default::default() };
        let mut run = evolve_reference(&u.0, &cfg, &[t]).checked()?;
        *out = Box::into_raw(Box::new(NlsistField(run.snapshots.remove(0))));
        Ok(())
    })
}

/// Direct scattering of `u` with `r` sampled on `n_z` points of `[z_min, z_max]`.
///
/// # Safety
/// `u` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlsist_scatter(
    u: *const NlsistField,
    z_min: f64,
    z_max: f64,
    n_z: usize,
    out: *mut *mut NlsistSpectral,
) -> NlsistStatus {
    guard(|| {
        let u = deref(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let z_grid = RealGrid::new(z_min, z_max, n_z).checked()?;
        let (data, _) = scatter(&u.0, &z_grid, &SearchBox::for_potential(&u.0)).checked()?;
        *out = Box::into_raw(Box::new(NlsistSpectral(data)));
        Ok(())
    })
}

/// Release spectral data; null is ignored.
///
/// # Safety
/// `data` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nlsist_spectral_free(data: *mut NlsistSpectral) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of discrete eigenvalues.
///
/// # Safety
/// `data` and `count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nlsist_spectral_eigen_count(data: *const NlsistSpectral, count: *mut usize) -> NlsistStatus {
    guard(|| {
        let d = deref(data, "data")?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = d.0.discrete().len();
        Ok(())
    })
}

/// Eigenpair `k` as `z_re, z_im, c_re, c_im`.
///
/// # Safety
/// `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_spectral_eigenpair(data: *const NlsistSpectral, k: usize, out: *mut f64) -> NlsistStatus {
    guard(|| {
        let d = deref(data, "data")?;
        let e = d.0.discrete().get(k).ok_or((NlsistStatus::InvalidArgument, format!("no eigenpair {k}")))?;
        out_slice(out, 4, "out")?.copy_from_slice(&[e.z.re, e.z.im, e.c.re, e.c.im]);
        Ok(())
    })
}

/// Reflection samples; `n` must equal the z-grid length.
///
/// # Safety
/// `out` must point to `2 n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_spectral_reflection(data: *const NlsistSpectral, out: *mut f64, n: usize) -> NlsistStatus {
    guard(|| {
        let d = deref(data, "data")?;
        if n != d.0.r_values().len() {
            return Err((NlsistStatus::InvalidArgument, format!("buffer for {n} samples, grid has {}", d.0.r_values().len())));
        }
        write_complex(out_slice(out, 2 * n, "out")?, d.0.r_values());
        Ok(())
    })
}

/// Spectral data at time `t`; `convention` 0 selects the default sign
/// pair, 1 the opposite one.
///
/// # Safety
/// `data` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlsist_spectral_evolve(
    data: *const NlsistSpectral,
    t: f64,
    convention: c_int,
    out: *mut *mut NlsistSpectral,
) -> NlsistStatus {
    guard(|| {
        let d = deref(data, "data")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let conv = match convention {
            0 => Convention::PaperR,
            1 => Convention::PaperSoliton,
            other => return Err((NlsistStatus::InvalidArgument, format!("unknown convention {other}"))),
        };
        let evolved = evolve_spectral(&d.0, t, conv).checked()?;
        *out = Box::into_raw(Box::new(NlsistSpectral(evolved)));
        Ok(())
    })
}

/// Potential reconstructed by RH solves at the `n` points `xs`.
///
/// # Safety
/// `xs` must hold `n` doubles and `out` `2 n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_reconstruct(data: *const NlsistSpectral, xs: *const f64, n: usize, out: *mut f64) -> NlsistStatus {
    guard(|| {
        let d = deref(data, "data")?;
        if xs.is_null() {
            return Err(null("xs"));
        }
        let points = std::slice::from_raw_parts(xs, n);
        let values = RhSolver::new(&d.0, RhConfig::default()).sweep(points).checked()?;
        write_complex(out_slice(out, 2 * n, "out")?, &values);
        Ok(())
    })
}

/// One-soliton potential with data `(z1, c1)` at `(t, x)`, written to `out[2]`.
///
/// # Safety
/// `out` must point to 2 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_soliton(z1_re: f64, z1_im: f64, c1_re: f64, c1_im: f64, t: f64, x: f64, out: *mut f64) -> NlsistStatus {
    guard(|| {
        let u = soliton_closed_form(C64::new(z1_re, z1_im), C64::new(c1_re, c1_im), t, x).checked()?;
        write_complex(out_slice(out, 2, "out")?, &[u]);
        Ok(())
    })
}

/// Parabolic cylinder function `D_a(z)`, written to `out[2]`.
///
/// # Safety
/// `out` must point to 2 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlsist_parabolic_cylinder(a_re: f64, a_im: f64, z_re: f64, z_im: f64, out: *mut f64) -> NlsistStatus {
    guard(|| {
        let d = parabolic_cylinder(C64::new(a_re, a_im), C64::new(z_re, z_im)).checked()?;
        write_complex(out_slice(out, 2, "out")?, &[d]);
        Ok(())
    })
}
