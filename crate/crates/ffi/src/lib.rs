//! C ABI over `transport_nbc`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `_free`. Every fallible call returns a `TnbcStatus`; the message of
//! the last failure on the calling thread is available through
//! [`tnbc_last_error_message`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the documented length. Handles
//! must come from this library and be freed at most once. Strings are
//! NUL-terminated UTF-8.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use transport_nbc::boundary::BoundarySpec;
use transport_nbc::energy::dissipation_and_boundary_form;
use transport_nbc::scheme::{Builtin, SchemeStencil};
use transport_nbc::solver::{
    run_interval, ErrorConvention, GridSpec, InitialDatum, InitialProjection, Norm, Record, RunOptions,
};
use transport_nbc::spectral::{assemble_transition_matrix, eigenvalues, operator_norm_l2, TransitionMatrix};
use transport_nbc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TnbcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidStencil = 2,
    Cfl = 3,
    InvalidParameter = 4,
    OutOfRange = 5,
    TooFewCells = 6,
    WindowTooSmall = 7,
    NotZeroSum = 8,
    Inconsistent = 9,
    NoConvergence = 10,
    Budget = 11,
    Parse = 12,
    BufferTooSmall = 13,
    Utf8 = 14,
    Panic = 15,
}

impl From<&Error> for TnbcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidStencil(_) => Self::InvalidStencil,
            Error::Cfl { .. } => Self::Cfl,
            Error::InvalidParameter { .. } => Self::InvalidParameter,
            Error::OutOfRange { .. } => Self::OutOfRange,
            Error::TooFewCells { .. } => Self::TooFewCells,
            Error::WindowTooSmall { .. } => Self::WindowTooSmall,
            Error::NotZeroSum { .. } => Self::NotZeroSum,
            Error::Inconsistent(_) => Self::Inconsistent,
            Error::NoConvergence { .. } => Self::NoConvergence,
            Error::Budget(_) => Self::Budget,
            Error::Parse(_) => Self::Parse,
        }
    }
}

/// Opaque stencil handle.
pub struct TnbcStencil(SchemeStencil);

/// Opaque one-step matrix handle.
pub struct TnbcMatrix(TransitionMatrix);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: TnbcStatus, msg: impl Into<String>) -> TnbcStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> TnbcStatus {
    fail(TnbcStatus::from(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> TnbcStatus) -> TnbcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TnbcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, TnbcStatus> {
    if s.is_null() {
        return Err(fail(TnbcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(TnbcStatus::Utf8, format!("{what} is not valid UTF-8")))
}

unsafe fn stencil_ref<'a>(h: *const TnbcStencil) -> Result<&'a SchemeStencil, TnbcStatus> {
    h.as_ref().map(|s| &s.0).ok_or_else(|| fail(TnbcStatus::NullPointer, "stencil handle is null"))
}

unsafe fn matrix_ref<'a>(h: *const TnbcMatrix) -> Result<&'a TransitionMatrix, TnbcStatus> {
    h.as_ref().map(|m| &m.0).ok_or_else(|| fail(TnbcStatus::NullPointer, "matrix handle is null"))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! try_core {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_core(e),
        }
    };
}

/// Copies the last error message (NUL-terminated, truncated to `len`) and
/// returns the full message length in bytes without the terminator.
#[no_mangle]
pub unsafe extern "C" fn tnbc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn tnbc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Built-in scheme by name, with the CFL check applied.
#[no_mangle]
pub unsafe extern "C" fn tnbc_stencil_builtin(
    name: *const c_char,
    a: f64,
    lambda: f64,
    out: *mut *mut TnbcStencil,
) -> TnbcStatus {
    guard(|| {
        if out.is_null() {
            return fail(TnbcStatus::NullPointer, "out is null");
        }
        let name = try_ffi!(read_str(name, "name"));
        let kind: Builtin = try_core!(name.parse());
        let s = try_core!(SchemeStencil::builtin(kind, a, lambda));
        *out = Box::into_raw(Box::new(TnbcStencil(s)));
        TnbcStatus::Ok
    })
}

/// Stencil from `r + p + 1` coefficients ordered `a_{-r}..a_p`.
#[no_mangle]
pub unsafe extern "C" fn tnbc_stencil_new(
    r: usize,
    p: usize,
    coeffs: *const f64,
    velocity: f64,
    lambda: f64,
    out: *mut *mut TnbcStencil,
) -> TnbcStatus {
    guard(|| {
        if out.is_null() || coeffs.is_null() {
            return fail(TnbcStatus::NullPointer, "out or coeffs is null");
        }
        let c = std::slice::from_raw_parts(coeffs, r + p + 1).to_vec();
        let s = try_core!(SchemeStencil::new(r, p, c, velocity, lambda));
        *out = Box::into_raw(Box::new(TnbcStencil(s)));
        TnbcStatus::Ok
    })
}

/// Stencil from the CLI text form, e.g. `r=1,p=1,a=-1:0.595,0:0.51,1:-0.105;vel=1;lambda=0.7`.
#[no_mangle]
pub unsafe extern "C" fn tnbc_stencil_parse(text: *const c_char, out: *mut *mut TnbcStencil) -> TnbcStatus {
    guard(|| {
        if out.is_null() {
            return fail(TnbcStatus::NullPointer, "out is null");
        }
        let text = try_ffi!(read_str(text, "text"));
        let s: SchemeStencil = try_core!(text.parse());
        *out = Box::into_raw(Box::new(TnbcStencil(s)));
        TnbcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn tnbc_stencil_free(h: *mut TnbcStencil) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Writes `r`, `p` and the consistency order.
#[no_mangle]
pub unsafe extern "C" fn tnbc_stencil_info(
    h: *const TnbcStencil,
    r: *mut usize,
    p: *mut usize,
    order: *mut usize,
) -> TnbcStatus {
    guard(|| {
        let s = try_ffi!(stencil_ref(h));
        if !r.is_null() {
            *r = s.r();
        }
        if !p.is_null() {
            *p = s.p();
        }
        if !order.is_null() {
            *order = s.order().order;
        }
        TnbcStatus::Ok
    })
}

/// Dissipation coefficients `d_1..d_{r+p}` into `d` (needs `len >= r + p`)
/// and the boundary form at the centre cell into `q_center`.
#[no_mangle]
pub unsafe extern "C" fn tnbc_energy_certificate(
    h: *const TnbcStencil,
    d: *mut f64,
    len: usize,
    q_center: *mut f64,
) -> TnbcStatus {
    guard(|| {
        let s = try_ffi!(stencil_ref(h));
        let cert = try_core!(dissipation_and_boundary_form(s));
        if !d.is_null() {
            if len < cert.d.len() {
                return fail(TnbcStatus::BufferTooSmall, format!("need {} coefficients", cert.d.len()));
            }
            ptr::copy_nonoverlapping(cert.d.as_ptr(), d, cert.d.len());
        }
        if !q_center.is_null() {
            *q_center = cert.boundary.value_at_center();
        }
        TnbcStatus::Ok
    })
}

/// Runs the interval problem from midpoint samples of `datum`
/// (`u01`, `u02`, `u03` or `power:c:alpha`). Writes the final interior values
/// into `values` (needs `len >= cells`), the final time, and the sup-in-time
/// midpoint max-norm error.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tnbc_run_interval(
    h: *const TnbcStencil,
    datum: *const c_char,
    length: f64,
    cells: usize,
    kb: usize,
    final_time: f64,
    values: *mut f64,
    len: usize,
    out_time: *mut f64,
    out_sup_error: *mut f64,
) -> TnbcStatus {
    guard(|| {
        let s = try_ffi!(stencil_ref(h));
        let datum: InitialDatum = try_core!(try_ffi!(read_str(datum, "datum")).parse());
        let grid = try_core!(GridSpec::new(length, cells, s.lambda()));
        let options = RunOptions { record: Record::SupError, projection: InitialProjection::Midpoint };
        let run = try_core!(run_interval(&datum, &grid, s, &BoundarySpec::extrapolation(kb), final_time, options));
        if !values.is_null() {
            if len < cells {
                return fail(TnbcStatus::BufferTooSmall, format!("need {cells} values"));
            }
            ptr::copy_nonoverlapping(run.final_state.interior().as_ptr(), values, cells);
        }
        if !out_time.is_null() {
            *out_time = run.final_time;
        }
        if !out_sup_error.is_null() {
            *out_sup_error = run.sup_errors.map_or(f64::NAN, |e| e.get(ErrorConvention::Midpoint, Norm::Linf));
        }
        TnbcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_assemble(
    h: *const TnbcStencil,
    cells: usize,
    kb: usize,
    out: *mut *mut TnbcMatrix,
) -> TnbcStatus {
    guard(|| {
        if out.is_null() {
            return fail(TnbcStatus::NullPointer, "out is null");
        }
        let s = try_ffi!(stencil_ref(h));
        let m = try_core!(assemble_transition_matrix(cells, s, kb));
        *out = Box::into_raw(Box::new(TnbcMatrix(m)));
        TnbcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_free(h: *mut TnbcMatrix) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of rows (and columns); 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_dim(h: *const TnbcMatrix) -> usize {
    h.as_ref().map_or(0, |m| m.0.cells)
}

/// Row-major copy into `buf` (needs `len >= dim * dim`).
#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_copy_dense(h: *const TnbcMatrix, buf: *mut f64, len: usize) -> TnbcStatus {
    guard(|| {
        let m = try_ffi!(matrix_ref(h));
        if buf.is_null() {
            return fail(TnbcStatus::NullPointer, "buf is null");
        }
        let n = m.cells;
        if len < n * n {
            return fail(TnbcStatus::BufferTooSmall, format!("need {} entries", n * n));
        }
        for i in 0..n {
            for j in 0..n {
                *buf.add(i * n + j) = m.dense[(i, j)];
            }
        }
        TnbcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_spectral_radius(h: *const TnbcMatrix, out: *mut f64) -> TnbcStatus {
    guard(|| {
        let m = try_ffi!(matrix_ref(h));
        if out.is_null() {
            return fail(TnbcStatus::NullPointer, "out is null");
        }
        *out = try_core!(eigenvalues(&m.dense)).spectral_radius();
        TnbcStatus::Ok
    })
}

/// l2 operator norm; `converged` (nullable) receives 1 if power iteration met its tolerance.
#[no_mangle]
pub unsafe extern "C" fn tnbc_matrix_norm_l2(h: *const TnbcMatrix, out: *mut f64, converged: *mut i32) -> TnbcStatus {
    guard(|| {
        let m = try_ffi!(matrix_ref(h));
        if out.is_null() {
            return fail(TnbcStatus::NullPointer, "out is null");
        }
        let est = operator_norm_l2(&m.banded);
        *out = est.value;
        if !converged.is_null() {
            *converged = est.converged as i32;
        }
        TnbcStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_core_error_maps_to_a_distinct_status() {
        let errors = [
            Error::InvalidStencil(String::new()),
            Error::Cfl { courant: 2.0 },
            Error::InvalidParameter { name: "x", reason: String::new() },
            Error::OutOfRange { index: 0, lo: 1, hi: 2 },
            Error::TooFewCells { cells: 1, kb: 2 },
            Error::WindowTooSmall { cells: 1, required: 2 },
            Error::NotZeroSum { sum: 1.0, tol: 0.0 },
            Error::Inconsistent(String::new()),
            Error::NoConvergence { sweeps: 1 },
            Error::Budget(String::new()),
            Error::Parse(String::new()),
        ];
        let mut codes: Vec<i32> = errors.iter().map(|e| TnbcStatus::from(e) as i32).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), errors.len());
        assert!(!codes.contains(&0));
    }
}
