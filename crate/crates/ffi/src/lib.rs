//! C ABI for loading scenarios, running sweeps and evaluating the witness.
//!
//! Every fallible call returns a [`QrStatus`]; on failure the message is
//! available from [`qr_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qradar::linalg::symplectic_eigenvalues;
use qradar::nalgebra::DMatrix;
use qradar::scenario::{emit_csv, emit_svg, load_scenario_with, run_sweep, with_jobs};
use qradar::{sph_lambda, thermal_occupation, Convention, CovarianceState, Error, Scenario, SweepResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Validation = 4,
    Numerical = 5,
    Io = 6,
    Panic = 7,
}

/// Drift convention override for [`qr_sweep_run`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrConvention {
    /// Use the convention named in the scenario file.
    Scenario = 0,
    Corrected = 1,
    Verbatim = 2,
}

/// A validated scenario.
pub struct QrScenario(Scenario);

/// Rows of a finished sweep.
pub struct QrSweepResult(SweepResult);

/// One row of a sweep; `lambda` is NaN when `has_lambda` is false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrSweepRow {
    pub axis: f64,
    pub lambda: f64,
    pub has_lambda: bool,
    pub physical: bool,
    pub hurwitz: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(QrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io(_) => QrStatus::Io,
            Error::Parse { .. } => QrStatus::Parse,
            Error::Validation(_) => QrStatus::Validation,
            Error::Domain(_) => QrStatus::InvalidArgument,
            _ if e.is_numerical() => QrStatus::Numerical,
            _ => QrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QrStatus::NullPointer, format!("{what} is null"))
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QrStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {message}"));
            QrStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(p: *const c_char, what: &str) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(QrStatus::InvalidArgument, format!("{what} is not valid UTF-8")))?;
    Ok(Path::new(s))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Loads and validates a scenario file. `strict` enforces device parameter ranges.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_scenario` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_scenario_load(path: *const c_char, strict: bool, out_scenario: *mut *mut QrScenario) -> QrStatus {
    guard(|| {
        let out_scenario = unsafe { out(out_scenario, "out_scenario") }?;
        *out_scenario = ptr::null_mut();
        let path = unsafe { path_arg(path, "path") }?;
        let s = load_scenario_with(path, strict)?;
        *out_scenario = Box::into_raw(Box::new(QrScenario(s)));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from [`qr_scenario_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qr_scenario_free(scenario: *mut QrScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Runs the sweep the scenario describes. `jobs` = 0 uses every core.
///
/// # Safety
/// `scenario` must be a live handle; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_run(
    scenario: *const QrScenario,
    convention: QrConvention,
    jobs: usize,
    out_result: *mut *mut QrSweepResult,
) -> QrStatus {
    guard(|| {
        let out_result = unsafe { out(out_result, "out_result") }?;
        *out_result = ptr::null_mut();
        let mut s = unsafe { handle(scenario, "scenario") }?.0.clone();
        match convention {
            QrConvention::Scenario => {}
            QrConvention::Corrected => s.convention = Convention::Corrected,
            QrConvention::Verbatim => s.convention = Convention::Verbatim,
        }
        let jobs = (jobs > 0).then_some(jobs);
        let r = with_jobs(jobs, || run_sweep(&s))??;
        *out_result = Box::into_raw(Box::new(QrSweepResult(r)));
        Ok(())
    })
}

/// Number of rows in a result.
///
/// # Safety
/// `result` must be a live handle; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_len(result: *const QrSweepResult, out_len: *mut usize) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        *unsafe { out(out_len, "out_len") }? = r.0.rows.len();
        Ok(())
    })
}

/// Number of stage series (rows per axis value).
///
/// # Safety
/// `result` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_stage_count(result: *const QrSweepResult, out_count: *mut usize) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        *unsafe { out(out_count, "out_count") }? = r.0.stages.len();
        Ok(())
    })
}

/// Copies row `index` into `out_row`.
///
/// # Safety
/// `result` must be a live handle; `out_row` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_row(result: *const QrSweepResult, index: usize, out_row: *mut QrSweepRow) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        let out_row = unsafe { out(out_row, "out_row") }?;
        let row = r.0.rows.get(index).ok_or_else(|| {
            Failure(QrStatus::InvalidArgument, format!("row {index} out of range ({} rows)", r.0.rows.len()))
        })?;
        *out_row = QrSweepRow {
            axis: row.axis,
            lambda: row.lambda.unwrap_or(f64::NAN),
            has_lambda: row.lambda.is_some(),
            physical: row.physical,
            hurwitz: row.hurwitz,
        };
        Ok(())
    })
}

/// Stage label of row `index` as a new string; release it with [`qr_string_free`].
///
/// # Safety
/// `result` must be a live handle; `out_label` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_stage_label(
    result: *const QrSweepResult,
    index: usize,
    out_label: *mut *mut c_char,
) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        let out_label = unsafe { out(out_label, "out_label") }?;
        *out_label = ptr::null_mut();
        let row = r.0.rows.get(index).ok_or_else(|| {
            Failure(QrStatus::InvalidArgument, format!("row {index} out of range ({} rows)", r.0.rows.len()))
        })?;
        let label = CString::new(row.stage.as_str())
            .map_err(|_| Failure(QrStatus::InvalidArgument, "stage label contains NUL".into()))?;
        *out_label = label.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Writes the result as CSV.
///
/// # Safety
/// `result` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_write_csv(result: *const QrSweepResult, path: *const c_char) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        emit_csv(&r.0, unsafe { path_arg(path, "path") }?)?;
        Ok(())
    })
}

/// Writes the result as an SVG chart.
///
/// # Safety
/// `result` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_write_svg(result: *const QrSweepResult, path: *const c_char) -> QrStatus {
    guard(|| {
        let r = unsafe { handle(result, "result") }?;
        emit_svg(&r.0, unsafe { path_arg(path, "path") }?)?;
        Ok(())
    })
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must come from [`qr_sweep_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qr_sweep_result_free(result: *mut QrSweepResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

unsafe fn covariance(cm: *const f64, dim: usize) -> Result<CovarianceState, Failure> {
    if cm.is_null() {
        return Err(null("cm"));
    }
    let data = unsafe { std::slice::from_raw_parts(cm, dim * dim) };
    Ok(CovarianceState::generic(DMatrix::from_row_slice(dim, dim, data))?)
}

/// Separability witness of a two-mode covariance matrix (16 values, row-major).
/// Negative means entangled.
///
/// # Safety
/// `cm` must point to 16 doubles; `out_lambda` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_sph_lambda(cm: *const f64, out_lambda: *mut f64) -> QrStatus {
    guard(|| {
        let out_lambda = unsafe { out(out_lambda, "out_lambda") }?;
        *out_lambda = sph_lambda(&unsafe { covariance(cm, 4) }?)?;
        Ok(())
    })
}

/// Ascending symplectic eigenvalues of a `2·modes` square covariance matrix (row-major).
///
/// # Safety
/// `cm` must point to (2·modes)² doubles; `out_values` to `modes` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_symplectic_eigenvalues(cm: *const f64, modes: usize, out_values: *mut f64) -> QrStatus {
    guard(|| {
        if modes == 0 {
            return Err(Failure(QrStatus::InvalidArgument, "modes must be positive".into()));
        }
        if out_values.is_null() {
            return Err(null("out_values"));
        }
        let nu = symplectic_eigenvalues(&unsafe { covariance(cm, 2 * modes) }?)?;
        let dst = unsafe { std::slice::from_raw_parts_mut(out_values, modes) };
        dst.copy_from_slice(&nu);
        Ok(())
    })
}

/// Bose–Einstein occupation of a mode at angular frequency `omega` (rad/s) and temperature (K).
///
/// # Safety
/// `out_n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qr_thermal_occupation(omega: f64, temperature: f64, out_n: *mut f64) -> QrStatus {
    guard(|| {
        let out_n = unsafe { out(out_n, "out_n") }?;
        *out_n = thermal_occupation(omega, temperature)?;
        Ok(())
    })
}
