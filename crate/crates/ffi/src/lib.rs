//! C ABI for the `xtal` library.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Strings returned through `char **`
//! out-parameters are NUL terminated and must be released with
//! [`xtal_string_free`]. Every fallible call returns an [`XtalStatus`]; on
//! failure [`xtal_last_error_message`] describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DVector;
use xtal::acoustic::{acoustic_spectrum, Indexing};
use xtal::bloch::{acoustic_speeds_sq, dispersion};
use xtal::io::{Crystal, RealizationFile};
use xtal::lattice::Lattice;
use xtal::theta_inverse::theta_check;
use xtal::XtalError;

/// Result codes. `XTAL_STATUS_INPUT` and `XTAL_STATUS_NUMERICAL` match the
/// command-line exit codes 2 and 3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XtalStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Utf8 = 5,
    Panic = 6,
}

/// A crystal with its standard realization and force constants.
pub struct XtalCrystal {
    inner: Crystal,
}

/// A full-rank lattice in R^n.
pub struct XtalLattice {
    inner: Lattice,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NUL bytes removed"));
}

fn fail(status: XtalStatus, message: impl Into<String>) -> XtalStatus {
    set_error(message);
    status
}

fn from_core(e: XtalError) -> XtalStatus {
    let status = if e.exit_code() == 3 {
        XtalStatus::Numerical
    } else {
        XtalStatus::Input
    };
    fail(status, e.to_string())
}

fn guard(body: impl FnOnce() -> XtalStatus) -> XtalStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == XtalStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(XtalStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, XtalStatus> {
    if text.is_null() {
        return Err(fail(XtalStatus::NullPointer, "string argument is NULL"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(XtalStatus::Utf8, format!("string argument is not UTF-8: {e}")))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> XtalStatus {
    match CString::new(text) {
        Ok(s) => {
            *out = s.into_raw();
            XtalStatus::Ok
        }
        Err(_) => fail(XtalStatus::Panic, "output contains a NUL byte"),
    }
}

unsafe fn read_vector(data: *const f64, len: usize, dim: usize) -> Result<DVector<f64>, XtalStatus> {
    if data.is_null() {
        return Err(fail(XtalStatus::NullPointer, "vector argument is NULL"));
    }
    if len != dim {
        return Err(fail(XtalStatus::Input, format!("expected {dim} components, got {len}")));
    }
    Ok(DVector::from_column_slice(std::slice::from_raw_parts(data, len)))
}

unsafe fn write_values(values: &[f64], out: *mut f64, out_len: usize) -> XtalStatus {
    if out.is_null() {
        return fail(XtalStatus::NullPointer, "output buffer is NULL");
    }
    if out_len < values.len() {
        return fail(
            XtalStatus::BufferTooSmall,
            format!("output buffer holds {out_len} values, need {}", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    XtalStatus::Ok
}

macro_rules! check_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(XtalStatus::NullPointer, concat!(stringify!($p), " is NULL"));
        })+
    };
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn xtal_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xtal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn xtal_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a crystal description (JSON) and computes its realization.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_from_json(json: *const c_char, out: *mut *mut XtalCrystal) -> XtalStatus {
    guard(|| {
        check_null!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Crystal::from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(XtalCrystal { inner }));
                XtalStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Loads a bundled crystal: "square", "honeycomb", "diamond" or "chain".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_bundled(name: *const c_char, out: *mut *mut XtalCrystal) -> XtalStatus {
    guard(|| {
        check_null!(out);
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match xtal::bundled::load(name) {
            Some(Ok(inner)) => {
                *out = Box::into_raw(Box::new(XtalCrystal { inner }));
                XtalStatus::Ok
            }
            Some(Err(e)) => from_core(e),
            None => fail(XtalStatus::Input, format!("no bundled crystal named {name:?}")),
        }
    })
}

/// # Safety
/// `crystal` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_free(crystal: *mut XtalCrystal) {
    if !crystal.is_null() {
        drop(Box::from_raw(crystal));
    }
}

/// Lattice dimension n, or 0 for NULL.
///
/// # Safety
/// `crystal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_dim(crystal: *const XtalCrystal) -> usize {
    crystal.as_ref().map_or(0, |c| c.inner.model.dim())
}

/// Number of Bloch bands n |V|, or 0 for NULL.
///
/// # Safety
/// `crystal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_band_count(crystal: *const XtalCrystal) -> usize {
    crystal.as_ref().map_or(0, |c| c.inner.model.band_count())
}

/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_ortho_constant(crystal: *const XtalCrystal, out: *mut f64) -> XtalStatus {
    guard(|| {
        check_null!(crystal, out);
        *out = (*crystal).inner.model.realization().ortho_constant;
        XtalStatus::Ok
    })
}

/// Realization as JSON.
///
/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_realization_json(
    crystal: *const XtalCrystal,
    out: *mut *mut c_char,
) -> XtalStatus {
    guard(|| {
        check_null!(crystal, out);
        let m = &(*crystal).inner.model;
        write_string(out, RealizationFile::new(m.graph(), m.realization()).to_json())
    })
}

/// Squared acoustic speeds s_i(chi)^2, ascending, into `out[0..n]`.
///
/// # Safety
/// `chi` must point to `chi_len` doubles and `out` to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xtal_acoustic_speeds(
    crystal: *const XtalCrystal,
    chi: *const f64,
    chi_len: usize,
    out: *mut f64,
    out_len: usize,
) -> XtalStatus {
    guard(|| {
        check_null!(crystal);
        let m = &(*crystal).inner.model;
        let chi = match read_vector(chi, chi_len, m.dim()) {
            Ok(v) => v,
            Err(s) => return s,
        };
        match acoustic_speeds_sq(m, &chi) {
            Ok(s) => write_values(&s, out, out_len),
            Err(e) => from_core(e),
        }
    })
}

/// Eigenvalues of the dynamical matrix at chi, ascending, into
/// `out[0..n |V|]`.
///
/// # Safety
/// `chi` must point to `chi_len` doubles and `out` to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn xtal_dispersion(
    crystal: *const XtalCrystal,
    chi: *const f64,
    chi_len: usize,
    out: *mut f64,
    out_len: usize,
) -> XtalStatus {
    guard(|| {
        check_null!(crystal);
        let m = &(*crystal).inner.model;
        let chi = match read_vector(chi, chi_len, m.dim()) {
            Ok(v) => v,
            Err(s) => return s,
        };
        match dispersion(m, &chi) {
            Ok(p) => write_values(&p.band_freqs_sq, out, out_len),
            Err(e) => from_core(e),
        }
    })
}

/// Integrated acoustic spectrum over geodesics with |lambda| <= cutoff, as
/// JSON. Nonzero `primitive` restricts to primitive geodesics.
///
/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_asp_json(
    crystal: *const XtalCrystal,
    cutoff: f64,
    primitive: c_int,
    out: *mut *mut c_char,
) -> XtalStatus {
    guard(|| {
        check_null!(crystal, out);
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return fail(XtalStatus::Input, format!("cutoff must be positive, got {cutoff}"));
        }
        let m = &(*crystal).inner.model;
        let indexing = if primitive != 0 {
            Indexing::PrimitiveOnly
        } else {
            Indexing::FullLattice
        };
        let result = m
            .realization()
            .dual_period_lattice()
            .and_then(|dual| acoustic_spectrum(m, &dual, cutoff, indexing));
        match result {
            Ok(s) => write_string(out, s.to_json()),
            Err(e) => from_core(e),
        }
    })
}

/// Period lattice of the crystal's realization.
///
/// # Safety
/// `crystal` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_crystal_period_lattice(
    crystal: *const XtalCrystal,
    out: *mut *mut XtalLattice,
) -> XtalStatus {
    guard(|| {
        check_null!(crystal, out);
        match (*crystal).inner.model.realization().period_lattice() {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(XtalLattice { inner }));
                XtalStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Lattice spanned by `dim` generators of length `dim`, stored one after
/// another in `generators`.
///
/// # Safety
/// `generators` must point to `dim * dim` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn xtal_lattice_new(
    generators: *const f64,
    dim: usize,
    out: *mut *mut XtalLattice,
) -> XtalStatus {
    guard(|| {
        check_null!(generators, out);
        if dim == 0 {
            return fail(XtalStatus::Input, "dim must be at least 1");
        }
        let flat = std::slice::from_raw_parts(generators, dim * dim);
        let rows: Vec<Vec<f64>> = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        match Lattice::from_generators(&rows) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(XtalLattice { inner }));
                XtalStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `lattice` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn xtal_lattice_free(lattice: *mut XtalLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Dimension, or 0 for NULL.
///
/// # Safety
/// `lattice` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xtal_lattice_dim(lattice: *const XtalLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.inner.dim())
}

/// Dual lattice L* = { y : y . x in Z for all x in L } as a new handle.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_lattice_dual(lattice: *const XtalLattice, out: *mut *mut XtalLattice) -> XtalStatus {
    guard(|| {
        check_null!(lattice, out);
        *out = Box::into_raw(Box::new(XtalLattice {
            inner: (*lattice).inner.dual(),
        }));
        XtalStatus::Ok
    })
}

/// Covolume |det B|.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xtal_lattice_volume(lattice: *const XtalLattice, out: *mut f64) -> XtalStatus {
    guard(|| {
        check_null!(lattice, out);
        *out = (*lattice).inner.volume();
        XtalStatus::Ok
    })
}

/// Evaluates both sides of the theta-function Poisson identity at `t`.
/// Any of the output pointers may be NULL.
///
/// # Safety
/// `lattice` must be a live handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn xtal_theta_check(
    lattice: *const XtalLattice,
    t: f64,
    tail: f64,
    lhs: *mut f64,
    rhs: *mut f64,
    relative_error: *mut f64,
) -> XtalStatus {
    guard(|| {
        check_null!(lattice);
        match theta_check(&(*lattice).inner, t, tail) {
            Ok(r) => {
                for (p, v) in [(lhs, r.lhs), (rhs, r.rhs), (relative_error, r.relative_error)] {
                    if let Some(p) = p.as_mut() {
                        *p = v;
                    }
                }
                XtalStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}
