//! C ABI over `onelevel-core`.
//!
//! Every fallible function returns an [`OlStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`ol_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use onelevel_core::analysis::{
    corollary_bound, fourier_side_bound, infimum_bound, make_report_with, naive_bound, phi_value, ReportOptions,
};
use onelevel_core::fredholm::{nystrom_solve, oracle_discrepancy, NystromConfig};
use onelevel_core::optimal::verify_criterion;
use onelevel_core::{build_optimal_g, Error, Group, OptimalG, SampledFunction};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedGroup = 3,
    SigmaOutOfRange = 4,
    Numerical = 5,
    Mismatch = 6,
    Panic = 7,
}

/// Values accepted wherever a function takes `int32_t group`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OlGroup {
    SoEven = 0,
    SoOdd = 1,
    Sp = 2,
    O = 3,
    U = 4,
}

/// Closed-form optimal `g` for one group and support.
pub struct OlOptimalG(OptimalG);

/// Nystrom solution sampled at its nodes.
pub struct OlSampled(SampledFunction);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OlCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OlBoundReport {
    pub group: i32,
    pub sigma: f64,
    pub optimal_bound: f64,
    pub corollary_bound: f64,
    pub naive_bound: f64,
    pub fourier_side_bound: f64,
    pub criterion_residual: f64,
    pub oracle_discrepancy: f64,
    pub grid_size: usize,
    pub nystrom_nodes: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> OlStatus {
    match e {
        Error::UnsupportedGroup(_) => OlStatus::UnsupportedGroup,
        Error::SigmaOutOfRange(_) => OlStatus::SigmaOutOfRange,
        Error::InvalidArgument(_) | Error::InvalidPiecewise(_) | Error::ZeroMean => OlStatus::InvalidArgument,
        Error::Mismatch(_) => OlStatus::Mismatch,
        Error::QuadratureBudget { .. }
        | Error::SingularSystem(_)
        | Error::Construction(_)
        | Error::Oracle(_)
        | Error::NonPositiveIntegral(_) => OlStatus::Numerical,
    }
}

struct Fail(OlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(OlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> OlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            OlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OlStatus::Panic
        }
    }
}

fn group_of(raw: i32) -> Result<Group, Fail> {
    match raw {
        0 => Ok(Group::SOeven),
        1 => Ok(Group::SOodd),
        2 => Ok(Group::Sp),
        3 => Ok(Group::O),
        4 => Ok(Group::U),
        _ => Err(Fail(OlStatus::InvalidArgument, format!("unknown group code {raw}"))),
    }
}

fn group_code(g: Group) -> i32 {
    match g {
        Group::SOeven => 0,
        Group::SOodd => 1,
        Group::Sp => 2,
        Group::O => 3,
        Group::U => 4,
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn ol_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_build(group: i32, sigma: f64, out: *mut *mut OlOptimalG) -> OlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let og = build_optimal_g(group_of(group)?, sigma)?;
        write(out, Box::into_raw(Box::new(OlOptimalG(og))), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_from_json(json: *const c_char, out: *mut *mut OlOptimalG) -> OlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(OlStatus::InvalidArgument, "json is not UTF-8".into()))?;
        let og: OptimalG =
            serde_json::from_str(text).map_err(|e| Fail(OlStatus::InvalidArgument, e.to_string()))?;
        write(out, Box::into_raw(Box::new(OlOptimalG(og))), "out")
    })
}

/// # Safety
/// `handle` must come from this library and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_free(handle: *mut OlOptimalG) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_eval(handle: *const OlOptimalG, x: f64, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        write(out, og.0.evaluate(x), "out")
    })
}

/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_coefficients(handle: *const OlOptimalG, out: *mut OlCoefficients) -> OlStatus {
    guard(|| {
        let og = &borrow(handle, "handle")?.0;
        write(out, OlCoefficients { c1: og.c1, c2: og.c2, c3: og.c3, lambda: og.lambda }, "out")
    })
}

/// Max `|(I + K) g - 1|` over `grid_size` points.
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_verify(handle: *const OlOptimalG, grid_size: usize, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        write(out, verify_criterion(&og.0, grid_size)?, "out")
    })
}

/// JSON rendering; release the string with [`ol_string_free`].
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_optimal_to_json(handle: *const OlOptimalG, out: *mut *mut c_char) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&og.0).map_err(|e| Fail(OlStatus::Panic, e.to_string()))?;
        let c = CString::new(text).map_err(|e| Fail(OlStatus::Panic, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_infimum_bound(handle: *const OlOptimalG, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        write(out, infimum_bound(&og.0)?, "out")
    })
}

/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_corollary_bound(group: i32, sigma: f64, out: *mut f64) -> OlStatus {
    guard(|| write(out, corollary_bound(group_of(group)?, sigma)?, "out"))
}

/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_naive_bound(group: i32, sigma: f64, out: *mut f64) -> OlStatus {
    guard(|| write(out, naive_bound(group_of(group)?, sigma)?, "out"))
}

/// Bound from `phi^ = g * g` against the density of `group`, which may
/// differ from the group `handle` was built for.
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_fourier_side_bound(group: i32, handle: *const OlOptimalG, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        write(out, fourier_side_bound(group_of(group)?, &og.0)?, "out")
    })
}

/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_phi_value(handle: *const OlOptimalG, x: f64, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(handle, "handle")?;
        write(out, phi_value(&og.0.f, x), "out")
    })
}

/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ol_nystrom_solve(group: i32, sigma: f64, node_count: usize, out: *mut *mut OlSampled) -> OlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = NystromConfig::new(node_count)?;
        let s = nystrom_solve(group_of(group)?, sigma, &cfg)?;
        write(out, Box::into_raw(Box::new(OlSampled(s))), "out")
    })
}

/// # Safety
/// `handle` must come from this library and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ol_sampled_free(handle: *mut OlSampled) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of nodes in a Nystrom solution.
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_sampled_len(handle: *const OlSampled, out: *mut usize) -> OlStatus {
    guard(|| {
        let s = borrow(handle, "handle")?;
        write(out, s.0.nodes.len(), "out")
    })
}

/// Copies nodes and values into caller buffers of length `len`, which must
/// equal [`ol_sampled_len`]. Either buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ol_sampled_copy(handle: *const OlSampled, nodes: *mut f64, values: *mut f64, len: usize) -> OlStatus {
    guard(|| {
        let s = &borrow(handle, "handle")?.0;
        if len != s.nodes.len() {
            return Err(Fail(
                OlStatus::InvalidArgument,
                format!("buffer length {len} does not match {} nodes", s.nodes.len()),
            ));
        }
        if !nodes.is_null() {
            ptr::copy_nonoverlapping(s.nodes.as_ptr(), nodes, len);
        }
        if !values.is_null() {
            ptr::copy_nonoverlapping(s.values.as_ptr(), values, len);
        }
        Ok(())
    })
}

/// # Safety
/// Both handles must be live and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_oracle_discrepancy(og: *const OlOptimalG, sampled: *const OlSampled, out: *mut f64) -> OlStatus {
    guard(|| {
        let og = borrow(og, "og")?;
        let s = borrow(sampled, "sampled")?;
        write(out, oracle_discrepancy(&og.0, &s.0)?, "out")
    })
}

/// Builds, verifies and solves for one `(group, sigma)` and fills `out`.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ol_make_report(
    group: i32,
    sigma: f64,
    grid_size: usize,
    nystrom_nodes: usize,
    out: *mut OlBoundReport,
) -> OlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = ReportOptions { grid_size, nystrom_nodes };
        let r = make_report_with(group_of(group)?, sigma, &opts)?;
        let report = OlBoundReport {
            group: group_code(r.group),
            sigma: r.sigma,
            optimal_bound: r.optimal_bound,
            corollary_bound: r.corollary_bound,
            naive_bound: r.naive_bound,
            fourier_side_bound: r.fourier_side_bound,
            criterion_residual: r.criterion_residual,
            oracle_discrepancy: r.oracle_discrepancy,
            grid_size: r.grid_size,
            nystrom_nodes: r.nystrom_nodes,
        };
        write(out, report, "out")
    })
}
