//! C ABI for loading checkpoints and running forecasts from other
//! languages.
//!
//! Conventions:
//! - A model is an opaque `SsaeHandle*` created by [`ssae_load`] and
//!   released by [`ssae_free`]. Handles are immutable after loading and
//!   safe to share across threads for prediction.
//! - Every fallible call returns an [`SsaeStatus`]; on failure,
//!   [`ssae_last_error`] returns a thread-local, NUL-terminated message
//!   that stays valid until the next failing call on the same thread.
//! - Matrices cross the boundary as row-major `double` buffers with
//!   explicit dimensions; the caller owns every buffer it passes in,
//!   including the forecast output buffer.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use ssae_core::checkpoint::load_model;
use ssae_core::linalg::Mat;
use ssae_core::model::ForecastModel;
use ssae_core::Error;

/// Result of a C ABI call. Matches the CLI exit codes: usage 1, data 2,
/// numeric 3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsaeStatus {
    Ok = 0,
    Usage = 1,
    Data = 2,
    Numeric = 3,
}

/// Opaque loaded model.
pub struct SsaeHandle {
    model: ForecastModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    // NUL bytes inside the message would truncate it; replace them.
    let clean = msg.replace('\0', "?");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SsaeStatus {
    match err.exit_code() {
        1 => SsaeStatus::Usage,
        3 => SsaeStatus::Numeric,
        _ => SsaeStatus::Data,
    }
}

fn fail(status: SsaeStatus, msg: &str) -> SsaeStatus {
    set_error(msg);
    status
}

/// Last error message raised on this thread, NUL-terminated. Valid until
/// the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn ssae_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssae_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Loads a checkpoint file. On success writes a fresh handle to `out` and
/// returns `Ok`; on failure leaves `out` untouched.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssae_load(
    path: *const c_char,
    out: *mut *mut SsaeHandle,
) -> SsaeStatus {
    if path.is_null() || out.is_null() {
        return fail(SsaeStatus::Usage, "ssae_load: null pointer argument");
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return fail(SsaeStatus::Usage, "ssae_load: path is not valid UTF-8"),
    };
    match load_model(Path::new(path)) {
        Ok((model, _seed)) => {
            let handle = Box::new(SsaeHandle { model });
            *out = Box::into_raw(handle);
            SsaeStatus::Ok
        }
        Err(e) => fail(status_of(&e), &e.to_string()),
    }
}

/// Releases a handle returned by [`ssae_load`]. A null handle is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer obtained from [`ssae_load`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ssae_free(handle: *mut SsaeHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn borrow<'a>(handle: *const SsaeHandle) -> Option<&'a SsaeHandle> {
    handle.as_ref()
}

/// Look-back window length in rows; 0 if `handle` is null.
///
/// # Safety
/// `handle` must be null or a live handle from [`ssae_load`].
#[no_mangle]
pub unsafe extern "C" fn ssae_lookback(handle: *const SsaeHandle) -> usize {
    borrow(handle).map_or(0, |h| h.model.lookback())
}

/// Forecast horizon in days; 0 if `handle` is null.
///
/// # Safety
/// `handle` must be null or a live handle from [`ssae_load`].
#[no_mangle]
pub unsafe extern "C" fn ssae_horizon(handle: *const SsaeHandle) -> usize {
    borrow(handle).map_or(0, |h| h.model.horizon())
}

/// Input columns per row (features plus the target's own history copy);
/// 0 if `handle` is null.
///
/// # Safety
/// `handle` must be null or a live handle from [`ssae_load`].
#[no_mangle]
pub unsafe extern "C" fn ssae_input_dim(handle: *const SsaeHandle) -> usize {
    borrow(handle).map_or(0, |h| h.model.input_dim())
}

/// Number of trainable weights; 0 if `handle` is null.
///
/// # Safety
/// `handle` must be null or a live handle from [`ssae_load`].
#[no_mangle]
pub unsafe extern "C" fn ssae_param_count(handle: *const SsaeHandle) -> usize {
    borrow(handle).map_or(0, |h| h.model.count_parameters())
}

/// Forecasts from one raw-unit input window.
///
/// `values` is a row-major `rows × cols` matrix: the newest `lookback`
/// rows of the series, `cols` = [`ssae_input_dim`] columns in training
/// order. `out` receives [`ssae_horizon`] forecasts in millimetres;
/// `out_len` is its capacity in doubles. `clamp_nonneg` ≠ 0 clamps
/// negative forecasts to zero.
///
/// # Safety
/// `handle` must be a live handle; `values` must point to `rows * cols`
/// readable doubles; `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ssae_predict(
    handle: *const SsaeHandle,
    values: *const f64,
    rows: usize,
    cols: usize,
    clamp_nonneg: i32,
    out: *mut f64,
    out_len: usize,
) -> SsaeStatus {
    let Some(h) = borrow(handle) else {
        return fail(SsaeStatus::Usage, "ssae_predict: null handle");
    };
    if values.is_null() || out.is_null() {
        return fail(SsaeStatus::Usage, "ssae_predict: null buffer argument");
    }
    if rows != h.model.lookback() || cols != h.model.input_dim() {
        return fail(
            SsaeStatus::Data,
            &format!(
                "ssae_predict: window is {rows}×{cols}, the model expects {}×{}",
                h.model.lookback(),
                h.model.input_dim()
            ),
        );
    }
    if out_len < h.model.horizon() {
        return fail(
            SsaeStatus::Usage,
            &format!(
                "ssae_predict: output capacity {out_len} is below the horizon {}",
                h.model.horizon()
            ),
        );
    }
    let data = std::slice::from_raw_parts(values, rows * cols);
    let mut x = Mat::zeros(rows, cols);
    x.data_mut().copy_from_slice(data);
    match h.model.predict_raw_units(&x, clamp_nonneg != 0) {
        Ok(forecasts) => {
            ptr::copy_nonoverlapping(forecasts.as_ptr(), out, forecasts.len());
            SsaeStatus::Ok
        }
        Err(e) => fail(status_of(&e), &e.to_string()),
    }
}
