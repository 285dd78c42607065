//! C ABI over the `excluwall` core.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions and
//! released by the matching `*_free`. Every fallible function returns an
//! [`ExclStatus`]; on failure a message is kept per thread and can be read with
//! [`excl_last_error`]. Initial conditions are passed as JSON, e.g.
//! `{"kind":"half_periodic","d":2}`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use excluwall::asymptotics::{classify_example_wall, Law};
use excluwall::dynamics::{simulate, InitialCondition, PiecewiseFn, Trajectory, Wall};
use excluwall::experiments::tagged_samples;
use excluwall::identities::{estimate_wall_identity, IdentitySetup};
use excluwall::multispecies::{colour_position_check, SwapSequence};
use excluwall::stats::wilson_ci;
use excluwall::{ClockField, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Precondition = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Per-site Poisson clocks.
pub struct ExclClockField(ClockField);

/// Nondecreasing piecewise-linear wall.
pub struct ExclWall(PiecewiseFn);

/// Simulated particle paths.
pub struct ExclTrajectory(Trajectory);

/// Two-sided estimate of the wall identity at one level.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ExclIdentityEstimate {
    pub p_lhs: f64,
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    pub p_rhs: f64,
    pub rhs_lo: f64,
    pub rhs_hi: f64,
    /// 1 when the two intervals overlap.
    pub verdict: i32,
}

/// Limit law family: 0 GUE, 1 GOE, 2 product of two GOE, 3 Airy 2->1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ExclRegime {
    pub xi: f64,
    pub law: i32,
    pub n_scales: u32,
    pub scales: [f64; 2],
    pub n_influence: u32,
    pub influence: [f64; 2],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: ExclStatus, msg: impl AsRef<str>) -> ExclStatus {
    set_error(msg.as_ref());
    status
}

fn from_core(e: Error) -> ExclStatus {
    let status = match e {
        Error::Range { .. } | Error::OutOfRange(_) => ExclStatus::OutOfRange,
        Error::Precondition(_) => ExclStatus::Precondition,
        Error::Domain(_) | Error::Degenerate { .. } | Error::Empty(_) => ExclStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> ExclStatus) -> ExclStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ExclStatus::Internal, "panic inside excluwall"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(ExclStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

unsafe fn parse_ic(json: *const c_char) -> Result<InitialCondition, ExclStatus> {
    let text = CStr::from_ptr(json)
        .to_str()
        .map_err(|_| fail(ExclStatus::InvalidArgument, "initial condition is not UTF-8"))?;
    let ic: InitialCondition = serde_json::from_str(text)
        .map_err(|e| fail(ExclStatus::InvalidArgument, format!("initial condition: {e}")))?;
    ic.validate().map_err(from_core)?;
    Ok(ic)
}

/// Message of the last failed call on this thread; empty if none. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn excl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn excl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates clocks for `seed` on `[0, horizon]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn excl_clockfield_new(
    seed: u64,
    horizon: f64,
    out: *mut *mut ExclClockField,
) -> ExclStatus {
    guard(|| {
        non_null!(out);
        match ClockField::new(seed, horizon) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(ExclClockField(c)));
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must come from [`excl_clockfield_new`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn excl_clockfield_free(h: *mut ExclClockField) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// First ring of site `z` after `after`; `*found` is 0 if none before the horizon.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_clockfield_next_event(
    h: *mut ExclClockField,
    z: i64,
    after: f64,
    out_time: *mut f64,
    found: *mut i32,
) -> ExclStatus {
    guard(|| {
        non_null!(h, out_time, found);
        match (*h).0.next_event(z, after) {
            Ok(Some(t)) => {
                *out_time = t;
                *found = 1;
                ExclStatus::Ok
            }
            Ok(None) => {
                *found = 0;
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Wall from `n_knots` triples `(t, left value, jump)` stored consecutively in `knots`.
///
/// # Safety
/// `knots` must hold `3 * n_knots` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_wall_new(
    knots: *const f64,
    n_knots: usize,
    out: *mut *mut ExclWall,
) -> ExclStatus {
    guard(|| {
        non_null!(knots, out);
        let raw = std::slice::from_raw_parts(knots, 3 * n_knots);
        let triples: Vec<(f64, f64, f64)> = raw.chunks(3).map(|c| (c[0], c[1], c[2])).collect();
        match PiecewiseFn::from_triples(&triples) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(ExclWall(f)));
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// The kinked example wall for horizon `horizon`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_wall_example(horizon: f64, out: *mut *mut ExclWall) -> ExclStatus {
    guard(|| {
        non_null!(out);
        match PiecewiseFn::example_wall(horizon) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(ExclWall(f)));
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must come from a wall constructor and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn excl_wall_free(h: *mut ExclWall) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_wall_eval(h: *const ExclWall, t: f64, out: *mut f64) -> ExclStatus {
    guard(|| {
        non_null!(h, out);
        match (*h).0.eval(t) {
            Ok(v) => {
                *out = v;
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Runs TASEP from `n` strictly decreasing `positions` up to `horizon`, with an
/// optional right wall (`wall` may be null), driven by `clocks`.
///
/// # Safety
/// `positions` must hold `n` values; other non-nullable pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_simulate(
    positions: *const i64,
    n: usize,
    wall: *const ExclWall,
    horizon: f64,
    clocks: *mut ExclClockField,
    out: *mut *mut ExclTrajectory,
) -> ExclStatus {
    guard(|| {
        non_null!(positions, clocks, out);
        let x0 = std::slice::from_raw_parts(positions, n);
        let wall = if wall.is_null() {
            Wall::None
        } else {
            match Wall::right((*wall).0.clone()) {
                Ok(w) => w,
                Err(e) => return from_core(e),
            }
        };
        match simulate(x0, &wall, horizon, &mut (*clocks).0) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(ExclTrajectory(t)));
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `h` must come from [`excl_simulate`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn excl_trajectory_free(h: *mut ExclTrajectory) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of labels in the trajectory, 0 for null.
///
/// # Safety
/// `h` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn excl_trajectory_len(h: *const ExclTrajectory) -> usize {
    if h.is_null() {
        0
    } else {
        (*h).0.n_labels()
    }
}

/// Position of `label` (from 1) at time `t`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_trajectory_position(
    h: *const ExclTrajectory,
    label: usize,
    t: f64,
    out: *mut i64,
) -> ExclStatus {
    guard(|| {
        non_null!(h, out);
        match (*h).0.position_at(label, t) {
            Ok(x) => {
                *out = x;
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Copies the final positions into `out`, which must have room for `len` values.
///
/// # Safety
/// `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn excl_trajectory_final_positions(
    h: *const ExclTrajectory,
    out: *mut i64,
    len: usize,
) -> ExclStatus {
    guard(|| {
        non_null!(h, out);
        let xs = (*h).0.final_positions();
        if len < xs.len() {
            return fail(
                ExclStatus::BufferTooSmall,
                format!("need {} slots, got {len}", xs.len()),
            );
        }
        std::slice::from_raw_parts_mut(out, xs.len()).copy_from_slice(&xs);
        ExclStatus::Ok
    })
}

/// `x_label(T)` for `samples` independent replicas, written to `out`.
///
/// # Safety
/// `ic_json` must be a NUL-terminated string, `out` must hold `samples` values,
/// `wall` may be null.
#[no_mangle]
pub unsafe extern "C" fn excl_tagged_samples(
    ic_json: *const c_char,
    wall: *const ExclWall,
    label: usize,
    horizon: f64,
    samples: usize,
    seed: u64,
    threads: usize,
    out: *mut i64,
) -> ExclStatus {
    guard(|| {
        non_null!(ic_json, out);
        let ic = match parse_ic(ic_json) {
            Ok(ic) => ic,
            Err(s) => return s,
        };
        let f = if wall.is_null() { None } else { Some(&(*wall).0) };
        match tagged_samples(&ic, f, label, horizon, samples, seed, threads) {
            Ok(xs) => {
                std::slice::from_raw_parts_mut(out, samples).copy_from_slice(&xs);
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Estimates `P(x^f_n(T) > s)` directly and through the step-TASEP representation.
///
/// # Safety
/// `ic_json` must be a NUL-terminated string, `out` valid, `wall` may be null.
#[no_mangle]
pub unsafe extern "C" fn excl_estimate_identity(
    ic_json: *const c_char,
    wall: *const ExclWall,
    n: usize,
    horizon: f64,
    s: i64,
    samples: usize,
    seed: u64,
    threads: usize,
    out: *mut ExclIdentityEstimate,
) -> ExclStatus {
    guard(|| {
        non_null!(ic_json, out);
        let ic = match parse_ic(ic_json) {
            Ok(ic) => ic,
            Err(st) => return st,
        };
        let setup = IdentitySetup {
            ic,
            wall: if wall.is_null() { None } else { Some((*wall).0.clone()) },
            n,
            horizon,
        };
        match estimate_wall_identity(&setup, &[s], samples, seed, threads) {
            Ok(reps) => {
                let r = &reps[0];
                *out = ExclIdentityEstimate {
                    p_lhs: r.p_lhs,
                    lhs_lo: r.ci_lhs.0,
                    lhs_hi: r.ci_lhs.1,
                    p_rhs: r.p_rhs,
                    rhs_lo: r.ci_rhs.0,
                    rhs_hi: r.ci_rhs.1,
                    verdict: r.verdict as i32,
                };
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Checks the colour-position symmetry for the swap word of `len` sites; `*holds` is 0 or 1.
///
/// # Safety
/// `word` must hold `len` values (may be null when `len` is 0); `holds` valid.
#[no_mangle]
pub unsafe extern "C" fn excl_colour_position_check(
    word: *const i64,
    len: usize,
    holds: *mut i32,
) -> ExclStatus {
    guard(|| {
        non_null!(holds);
        let w = if len == 0 {
            Vec::new()
        } else {
            non_null!(word);
            std::slice::from_raw_parts(word, len).to_vec()
        };
        *holds = colour_position_check(&SwapSequence(w)) as i32;
        ExclStatus::Ok
    })
}

/// Regime of label `alpha T` under the kinked example wall with half-`d`-periodic data.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_classify(d: f64, alpha: f64, out: *mut ExclRegime) -> ExclStatus {
    guard(|| {
        non_null!(out);
        match classify_example_wall(d, alpha) {
            Ok(r) => {
                let mut reg = ExclRegime {
                    xi: r.xi,
                    law: match r.law {
                        Law::Gue => 0,
                        Law::Goe => 1,
                        Law::GoeProduct => 2,
                        Law::Airy2To1 => 3,
                    },
                    n_scales: r.scales.len() as u32,
                    n_influence: r.influence.len() as u32,
                    ..Default::default()
                };
                for (dst, v) in reg.scales.iter_mut().zip(&r.scales) {
                    *dst = *v;
                }
                for (dst, v) in reg.influence.iter_mut().zip(&r.influence) {
                    *dst = *v;
                }
                *out = reg;
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Wilson score interval for `k` successes in `n` trials.
///
/// # Safety
/// `lo` and `hi` must be valid.
#[no_mangle]
pub unsafe extern "C" fn excl_wilson_ci(
    k: u64,
    n: u64,
    level: f64,
    lo: *mut f64,
    hi: *mut f64,
) -> ExclStatus {
    guard(|| {
        non_null!(lo, hi);
        match wilson_ci(k, n, level) {
            Ok((a, b)) => {
                *lo = a;
                *hi = b;
                ExclStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}
