//! C ABI over `fppsim`.
//!
//! Configurations live behind the opaque [`FppConfig`] handle, created by
//! the `fpp_config_*` constructors and released with [`fpp_config_free`].
//! Every fallible call returns an [`FppStatus`] and writes its result through
//! an out-pointer; on failure [`fpp_last_error`] describes the most recent
//! error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fppsim::circuits::max_disjoint_circuits;
use fppsim::experiments::{run_sweep, Statistic, SweepPlan};
use fppsim::fpp::{annulus_time, point_to_ball_boundary, point_to_line, point_to_point, PassageResult};
use fppsim::lattice::ball0;
use fppsim::loops::{halfplane_separating_count, separating_loop_count};
use fppsim::{Configuration, Error, SiteCoord};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FppStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    RegionTooSmall = 3,
    Unreachable = 4,
    PreconditionFailed = 5,
    Internal = 6,
}

/// Opaque site configuration.
pub struct FppConfig(Configuration);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> FppStatus {
    match err {
        Error::InvalidParameter(_) | Error::EmptySiteSet(_) | Error::AssignmentMismatch(_) | Error::Format(_) => {
            FppStatus::InvalidArgument
        }
        Error::RegionTooSmall(_) => FppStatus::RegionTooSmall,
        Error::Unreachable => FppStatus::Unreachable,
        Error::Precondition(_) => FppStatus::PreconditionFailed,
        Error::Io(_) => FppStatus::Internal,
    }
}

/// Runs `f`, recording its error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), FppStatus>) -> FppStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FppStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FppStatus::Internal
        }
    }
}

fn lib<T>(r: fppsim::Result<T>) -> Result<T, FppStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<'a, T>(p: *const T) -> Result<&'a T, FppStatus> {
    // SAFETY: callers pass pointers obtained from this library or valid
    // for reads; null is rejected here.
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_error("null pointer argument");
        FppStatus::NullPointer
    })
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), FppStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(FppStatus::NullPointer);
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn passage_value(r: PassageResult) -> Result<u32, FppStatus> {
    lib(r.time())
}

fn new_handle(out: *mut *mut FppConfig, cfg: Configuration) -> Result<(), FppStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(FppStatus::NullPointer);
    }
    write_out(out, Box::into_raw(Box::new(FppConfig(cfg))))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fpp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fpp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples `ball(0, radius)` as configuration `index` of `master_seed`.
#[no_mangle]
pub extern "C" fn fpp_config_sample_ball(
    radius: u32,
    master_seed: u64,
    index: u64,
    out: *mut *mut FppConfig,
) -> FppStatus {
    guard(|| new_handle(out, lib(Configuration::sample(ball0(radius), master_seed, index))?))
}

/// Constant configuration on `ball(0, radius)`: every site has time `time`
/// (0 or 1).
#[no_mangle]
pub extern "C" fn fpp_config_constant_ball(radius: u32, time: u8, out: *mut *mut FppConfig) -> FppStatus {
    guard(|| {
        let cfg = match time {
            0 => Configuration::all_open(ball0(radius)),
            1 => Configuration::all_closed(ball0(radius)),
            t => {
                set_error(format!("site time must be 0 or 1, got {t}"));
                return Err(FppStatus::InvalidArgument);
            }
        };
        new_handle(out, cfg)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `cfg` must come from an `fpp_config_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn fpp_config_free(cfg: *mut FppConfig) {
    if !cfg.is_null() {
        // SAFETY: per the contract above, `cfg` is an owned box.
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Time (0 or 1) of site `(u, v)`; sites outside the region read as closed.
#[no_mangle]
pub extern "C" fn fpp_config_site_time(cfg: *const FppConfig, u: i32, v: i32, out: *mut u8) -> FppStatus {
    guard(|| write_out(out, non_null(cfg)?.0.time(SiteCoord::new(u, v))))
}

/// Content digest of the configuration.
#[no_mangle]
pub extern "C" fn fpp_config_digest(cfg: *const FppConfig, out: *mut u64) -> FppStatus {
    guard(|| write_out(out, non_null(cfg)?.0.digest()))
}

/// `a_{0,n}`; the region must contain `ball(0, 3n)`.
#[no_mangle]
pub extern "C" fn fpp_point_to_point(cfg: *const FppConfig, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, passage_value(lib(point_to_point(&non_null(cfg)?.0, n))?)?))
}

/// `b_{0,n}`; the region must contain `ball(0, 3n)`.
#[no_mangle]
pub extern "C" fn fpp_point_to_line(cfg: *const FppConfig, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, passage_value(lib(point_to_line(&non_null(cfg)?.0, n))?)?))
}

/// `c_n`; the region must contain `ball(0, n)`.
#[no_mangle]
pub extern "C" fn fpp_point_to_ball_boundary(cfg: *const FppConfig, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, passage_value(lib(point_to_ball_boundary(&non_null(cfg)?.0, n))?)?))
}

/// `T(∂B(m), ∂B(n))` inside the annulus, `1 <= m < n`.
#[no_mangle]
pub extern "C" fn fpp_annulus_time(cfg: *const FppConfig, m: u32, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, passage_value(lib(annulus_time(&non_null(cfg)?.0, m, n))?)?))
}

/// Largest number of disjoint closed circuits surrounding `B(m)` in the
/// annulus up to `n`.
#[no_mangle]
pub extern "C" fn fpp_max_disjoint_circuits(cfg: *const FppConfig, m: u32, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, lib(max_disjoint_circuits(&non_null(cfg)?.0, m, n))?))
}

/// Loops separating the origin from `(n, 0)`; needs `ball(0, 12n)`.
#[no_mangle]
pub extern "C" fn fpp_separating_loop_count(cfg: *const FppConfig, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, lib(separating_loop_count(&non_null(cfg)?.0, n))?))
}

/// Loops separating the origin from the half-plane `{x >= n}`.
#[no_mangle]
pub extern "C" fn fpp_halfplane_loop_count(cfg: *const FppConfig, n: u32, out: *mut u32) -> FppStatus {
    guard(|| write_out(out, lib(halfplane_separating_count(&non_null(cfg)?.0, n))?))
}

/// Sweeps `statistic` (a NUL-terminated name such as `"cn"`) over
/// `schedule[0..len]` and writes one mean and standard error per scale.
/// `threads == 0` uses every core; the output does not depend on it.
///
/// # Safety
/// `schedule` must hold `len` values; `means` and `std_errors` must have
/// room for `len` values each.
#[no_mangle]
pub unsafe extern "C" fn fpp_sweep(
    statistic: *const c_char,
    schedule: *const u32,
    len: usize,
    samples: u64,
    master_seed: u64,
    threads: usize,
    means: *mut f64,
    std_errors: *mut f64,
) -> FppStatus {
    guard(|| {
        non_null(statistic)?;
        non_null(schedule)?;
        if means.is_null() || std_errors.is_null() {
            set_error("null output pointer");
            return Err(FppStatus::NullPointer);
        }
        // SAFETY: non-null and NUL-terminated by contract.
        let name = unsafe { CStr::from_ptr(statistic) }.to_str().map_err(|_| {
            set_error("statistic name is not UTF-8");
            FppStatus::InvalidArgument
        })?;
        let stat: Statistic = lib(name.parse())?;
        // SAFETY: `schedule` holds `len` values by contract.
        let scales = unsafe { std::slice::from_raw_parts(schedule, len) }.to_vec();
        let plan = SweepPlan::new(stat, scales, samples, master_seed);
        let outcome = lib(run_sweep(&plan, (threads > 0).then_some(threads)))?;
        for (i, r) in outcome.records.iter().enumerate() {
            // SAFETY: both buffers have room for `len` values by contract.
            unsafe {
                means.add(i).write(r.mean);
                std_errors.add(i).write(r.std_error);
            }
        }
        Ok(())
    })
}
