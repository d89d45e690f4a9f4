//! C ABI over `hybrid-core`.
//!
//! Objects cross the boundary as opaque handles created by `hk_*_new`/`hk_*_from_*`
//! functions and released by the matching `hk_*_free`. Every fallible function returns
//! an [`HkStatus`]; the message of the last failure on the calling thread is available
//! from [`hk_last_error`]. Strings returned by the library are released with
//! [`hk_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hybrid_core::coreset::{self, AnchorOptions};
use hybrid_core::io::InstanceFile;
use hybrid_core::metric::{self, Site};
use hybrid_core::solver::{self, BestSolution, SolverConfig};
use hybrid_core::{oracle, Error, Instance, WeightedClientSet};
use libc::{c_char, size_t};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidInstance = 4,
    Unsupported = 5,
    NoSolution = 6,
    TooLarge = 7,
    BufferTooSmall = 8,
    Io = 9,
    Panic = 10,
}

/// A validated instance: metric space, `k`, `r` and `z`.
pub struct HkInstance {
    inner: Instance,
}

/// Best solution found by [`hk_solve`].
pub struct HkSolution {
    best: BestSolution,
}

/// A weighted client subset built by [`hk_coreset`].
pub struct HkCoreset {
    set: WeightedClientSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HkStatus {
    match e {
        Error::InvalidInstance(_) | Error::InvalidPoint(_) => HkStatus::InvalidInstance,
        Error::InvalidArgument(_)
        | Error::EmptySolution
        | Error::EmptyRequests
        | Error::GuessTooLarge { .. } => HkStatus::InvalidArgument,
        Error::Unsupported(_) | Error::BudgetExceeded { .. } => HkStatus::Unsupported,
        Error::TooLarge { .. } => HkStatus::TooLarge,
        Error::NoSolutionFound(_) => HkStatus::NoSolution,
        Error::Io(_) => HkStatus::Io,
        Error::Json(_) => HkStatus::InvalidInstance,
    }
}

fn fail(status: HkStatus, msg: impl Into<String>) -> HkStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), HkStatus>) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HkStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(HkStatus::Panic, "internal panic"),
    }
}

fn core<T>(r: hybrid_core::Result<T>) -> Result<T, HkStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, HkStatus> {
    p.as_ref()
        .ok_or_else(|| fail(HkStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, HkStatus> {
    p.as_mut()
        .ok_or_else(|| fail(HkStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: size_t, what: &str) -> Result<&'a [T], HkStatus> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(fail(HkStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn slice_out<'a, T>(
    p: *mut T,
    len: size_t,
    need: usize,
    what: &str,
) -> Result<&'a mut [T], HkStatus> {
    if len < need {
        return Err(fail(
            HkStatus::BufferTooSmall,
            format!("{what} holds {len} entries but {need} are needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(HkStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn hk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from its JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_instance_from_json(
    json: *const c_char,
    out: *mut *mut HkInstance,
) -> HkStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(fail(HkStatus::NullPointer, "json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| fail(HkStatus::InvalidUtf8, e.to_string()))?;
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| fail(HkStatus::InvalidInstance, e.to_string()))?;
        let inner = core(file.into_instance())?;
        *out = Box::into_raw(Box::new(HkInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a live handle from [`hk_instance_from_json`].
#[no_mangle]
pub unsafe extern "C" fn hk_instance_free(inst: *mut HkInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of clients, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn hk_instance_num_clients(inst: *const HkInstance) -> size_t {
    inst.as_ref().map_or(0, |i| i.inner.space.n_clients())
}

/// Number of facilities, or 0 for a null handle or a continuous instance.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn hk_instance_num_facilities(inst: *const HkInstance) -> size_t {
    inst.as_ref()
        .and_then(|i| i.inner.space.n_facilities())
        .unwrap_or(0)
}

/// `cost(P, X, alpha, z)` for facility centers `X`.
///
/// # Safety
/// `facilities` must point to `len` indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_cost(
    inst: *const HkInstance,
    facilities: *const size_t,
    len: size_t,
    alpha: f64,
    z: f64,
    out: *mut f64,
) -> HkStatus {
    guard(|| {
        let inst = borrow(inst, "instance")?;
        let out = out_ptr(out, "out")?;
        let centers: Vec<Site> = slice_arg(facilities, len, "facilities")?
            .iter()
            .map(|&f| Site::Facility(f))
            .collect();
        *out = core(metric::cost(&inst.inner.space, &centers, alpha, z))?;
        Ok(())
    })
}

/// Runs the solver over the guess grid. Returns [`HkStatus::NoSolution`] when every guess fails.
///
/// # Safety
/// `inst` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_solve(
    inst: *const HkInstance,
    epsilon: f64,
    repetitions: size_t,
    seed: u64,
    out: *mut *mut HkSolution,
) -> HkStatus {
    guard(|| {
        let inst = borrow(inst, "instance")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let mut cfg = SolverConfig::new(epsilon);
        cfg.repetitions = repetitions;
        cfg.seed = seed;
        let report = core(solver::solve(&inst.inner, &cfg))?;
        let best = report
            .best
            .ok_or_else(|| fail(HkStatus::NoSolution, "no guess produced a solution"))?;
        *out = Box::into_raw(Box::new(HkSolution { best }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a live handle from [`hk_solve`].
#[no_mangle]
pub unsafe extern "C" fn hk_solution_free(sol: *mut HkSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of centers, or 0 for a null handle.
///
/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn hk_solution_len(sol: *const HkSolution) -> size_t {
    sol.as_ref().map_or(0, |s| s.best.centers.len())
}

/// Cost at the inflated radius `(1 + eps/3) r` and at the reported radius `(1 + eps) r`.
///
/// # Safety
/// `sol` must be a live solution handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_solution_costs(
    sol: *const HkSolution,
    cost_r_prime: *mut f64,
    cost_bicriteria: *mut f64,
) -> HkStatus {
    guard(|| {
        let sol = borrow(sol, "solution")?;
        *out_ptr(cost_r_prime, "cost_r_prime")? = sol.best.cost_r_prime;
        *out_ptr(cost_bicriteria, "cost_bicriteria")? = sol.best.cost_bicriteria;
        Ok(())
    })
}

/// Copies the facility indices of a discrete solution into `out[0..len]`.
///
/// # Safety
/// `out` must have room for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn hk_solution_facilities(
    sol: *const HkSolution,
    out: *mut size_t,
    len: size_t,
) -> HkStatus {
    guard(|| {
        let sol = borrow(sol, "solution")?;
        let out = slice_out(out, len, sol.best.centers.len(), "out")?;
        for (slot, c) in out.iter_mut().zip(&sol.best.centers) {
            *slot = match c {
                Site::Facility(f) => *f,
                _ => {
                    return Err(fail(
                        HkStatus::Unsupported,
                        "solution centers are coordinates",
                    ))
                }
            };
        }
        Ok(())
    })
}

/// JSON list of the solution's centers. Release with [`hk_string_free`].
///
/// # Safety
/// `sol` must be a live solution handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_solution_to_json(
    sol: *const HkSolution,
    out: *mut *mut c_char,
) -> HkStatus {
    guard(|| {
        let sol = borrow(sol, "solution")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let text = core(serde_json::to_string(&sol.best.centers).map_err(Error::from))?;
        *out = CString::new(text)
            .expect("json has no nul bytes")
            .into_raw();
        Ok(())
    })
}

/// Exact optimum of the instance by enumeration.
///
/// # Safety
/// `inst` must be a live instance handle; `opt_cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_brute_force(inst: *const HkInstance, opt_cost: *mut f64) -> HkStatus {
    guard(|| {
        let inst = borrow(inst, "instance")?;
        let out = out_ptr(opt_cost, "opt_cost")?;
        let i = &inst.inner;
        *out = core(oracle::brute_force(&i.space, i.k, i.r, i.z))?.opt_cost;
        Ok(())
    })
}

/// Builds an anchor set and the coreset for `epsilon`.
///
/// # Safety
/// `inst` must be a live instance handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_coreset(
    inst: *const HkInstance,
    epsilon: f64,
    seed: u64,
    out: *mut *mut HkCoreset,
) -> HkStatus {
    guard(|| {
        let inst = borrow(inst, "instance")?;
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let options = AnchorOptions {
            seed,
            ..AnchorOptions::default()
        };
        let anchors = core(coreset::build_anchor_set(&inst.inner, &options))?;
        let built = core(coreset::build_coreset(
            &inst.inner.space,
            inst.inner.r,
            epsilon,
            &anchors,
        ))?;
        *out = Box::into_raw(Box::new(HkCoreset { set: built.coreset }));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a live handle from [`hk_coreset`].
#[no_mangle]
pub unsafe extern "C" fn hk_coreset_free(set: *mut HkCoreset) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of coreset members, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live coreset handle.
#[no_mangle]
pub unsafe extern "C" fn hk_coreset_len(set: *const HkCoreset) -> size_t {
    set.as_ref().map_or(0, |s| s.set.len())
}

/// Copies member client indices and weights into `points[0..len]` and `weights[0..len]`.
///
/// # Safety
/// Both buffers must have room for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn hk_coreset_members(
    set: *const HkCoreset,
    points: *mut size_t,
    weights: *mut u64,
    len: size_t,
) -> HkStatus {
    guard(|| {
        let set = borrow(set, "coreset")?;
        let need = set.set.len();
        let points = slice_out(points, len, need, "points")?;
        let weights = slice_out(weights, len, need, "weights")?;
        for (i, &(p, w)) in set.set.members().iter().enumerate() {
            points[i] = p;
            weights[i] = w;
        }
        Ok(())
    })
}
