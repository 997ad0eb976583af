//! C ABI over the `nrule` library.
//!
//! Systems are loaded from the same JSON configs the CLI reads and handed out
//! as opaque `NrSystem` pointers. Every fallible call returns an `NrStatus`;
//! on failure the message is kept per thread and read back with
//! `nr_last_error_message`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nrule::curves::build_closed_curve;
use nrule::error::Error;
use nrule::geometry::{self, Line, Orientation, Point};
use nrule::io::{simulate, System, SystemConfig};
use nrule::piecewise;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// JSON parse or validation failure.
    Config = 3,
    /// The call needs a symbolic system and got a piecewise one, or vice versa.
    WrongMode = 4,
    InvalidArgument = 5,
    /// The induced map has |scale| = 1.
    Neutral = 6,
    NotInvertible = 7,
    /// An orbit reached an invariant point.
    Degenerate = 8,
    NotConverged = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrPoint {
    pub x: f64,
    pub y: f64,
}

impl From<Point> for NrPoint {
    fn from(p: Point) -> Self {
        NrPoint { x: p.x, y: p.y }
    }
}

impl From<NrPoint> for Point {
    fn from(p: NrPoint) -> Self {
        Point::new(p.x, p.y)
    }
}

/// `t ↦ scale·t + shift` on the induced line's arc-length parameter.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrAffine {
    pub scale: f64,
    pub shift: f64,
}

/// Angles in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrAccReport {
    pub satisfied: bool,
    pub mean_theta: f64,
    pub delta: f64,
    pub margin: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NrSimulation {
    /// Points written, including the start. On `BufferTooSmall` this is the
    /// capacity the run needs.
    pub count: usize,
    /// Detected period in rule applications, 0 when none.
    pub period: usize,
    pub degenerate: bool,
    pub escaped: bool,
}

/// Opaque handle to a validated system.
pub struct NrSystem {
    config: SystemConfig,
    system: System,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(NrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NeutralCycle(_) => NrStatus::Neutral,
            Error::NotInvertible => NrStatus::NotInvertible,
            Error::DegenerateHit(_) => NrStatus::Degenerate,
            Error::NotConverged(_) => NrStatus::NotConverged,
            _ => NrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: NrStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, records any failure or panic, and returns the status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NrStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(NrStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return fail(NrStatus::NullPointer, format!("{what} is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(NrStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(NrStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn symbolic(sys: &NrSystem) -> Result<&nrule::symbolic::SymbolicMap, Failure> {
    match &sys.system {
        System::Symbolic(m) => Ok(m),
        System::Piecewise(_) => fail(NrStatus::WrongMode, "system is piecewise, not symbolic"),
    }
}

fn piecewise_map(sys: &NrSystem) -> Result<&piecewise::PiecewiseMap, Failure> {
    match &sys.system {
        System::Piecewise(m) => Ok(m),
        System::Symbolic(_) => fail(NrStatus::WrongMode, "system is symbolic, not piecewise"),
    }
}

fn orientation(bit: u8) -> Result<Orientation, Failure> {
    Orientation::from_bit(bit)
        .ok_or_else(|| Failure(NrStatus::InvalidArgument, format!("orientation {bit} is not 0 or 1")))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses and validates a JSON config. On success `*out` owns a new handle
/// that must be released with `nr_system_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_system_from_json(json: *const c_char, out: *mut *mut NrSystem) -> NrStatus {
    guard(|| {
        if out.is_null() {
            return fail(NrStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = c_str(json, "json")?;
        let config =
            SystemConfig::from_json(text).map_err(|e| Failure(NrStatus::Config, e.to_string()))?;
        let system = config
            .system()
            .map_err(|e| Failure(NrStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(NrSystem { config, system }));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a handle from `nr_system_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nr_system_free(sys: *mut NrSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Writes true for symbolic systems and false for piecewise ones.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_system_is_symbolic(sys: *const NrSystem, out: *mut bool) -> NrStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        write(out, matches!(sys.system, System::Symbolic(_)), "out")
    })
}

/// Number of rules in the cycle.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_system_rule_count(sys: *const NrSystem, out: *mut usize) -> NrStatus {
    guard(|| write(out, deref(sys, "sys")?.system.len(), "out"))
}

/// The configured start point, or the seeded default the CLI would use.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_system_default_start(sys: *const NrSystem, out: *mut NrPoint) -> NrStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        write(out, sys.config.default_start(&sys.system).into(), "out")
    })
}

/// Composite affine action of one full symbolic cycle.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_cycle_affine(sys: *const NrSystem, out: *mut NrAffine) -> NrStatus {
    guard(|| {
        let a = symbolic(deref(sys, "sys")?)?.cycle_affine();
        write(out, NrAffine { scale: a.scale, shift: a.shift }, "out")
    })
}

/// Product of the per-rule similarity coefficients.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_induced_coefficient(sys: *const NrSystem, out: *mut f64) -> NrStatus {
    guard(|| write(out, symbolic(deref(sys, "sys")?)?.induced_coefficient(), "out"))
}

/// Unique fixed point of the induced map on the last rule's target line.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_fixed_point(sys: *const NrSystem, out: *mut NrPoint) -> NrStatus {
    guard(|| {
        let p = symbolic(deref(sys, "sys")?)?.induced_fixed_point()?;
        write(out, p.into(), "out")
    })
}

/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_is_collapsing(sys: *const NrSystem, out: *mut bool) -> NrStatus {
    guard(|| write(out, symbolic(deref(sys, "sys")?)?.is_collapsing(), "out"))
}

/// Applies one full cycle to `x`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_cycle(sys: *const NrSystem, x: NrPoint, out: *mut NrPoint) -> NrStatus {
    guard(|| {
        let y = symbolic(deref(sys, "sys")?)?.cycle(x.into())?;
        write(out, y.into(), "out")
    })
}

/// Preimage of `y` (on the induced line) under one full cycle.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_symbolic_invert(sys: *const NrSystem, y: NrPoint, out: *mut NrPoint) -> NrStatus {
    guard(|| {
        let x = symbolic(deref(sys, "sys")?)?.invert_cycle(y.into())?;
        write(out, x.into(), "out")
    })
}

/// Average contraction check of a piecewise system.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_piecewise_acc_check(sys: *const NrSystem, out: *mut NrAccReport) -> NrStatus {
    guard(|| {
        let r = piecewise_map(deref(sys, "sys")?)?.acc_check();
        let report = NrAccReport {
            satisfied: r.satisfied,
            mean_theta: r.mean_theta,
            delta: r.delta,
            margin: r.margin(),
        };
        write(out, report, "out")
    })
}

/// Number of invariant points of a piecewise system.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_piecewise_invariant_count(sys: *const NrSystem, out: *mut usize) -> NrStatus {
    guard(|| write(out, piecewise_map(deref(sys, "sys")?)?.invariant_points().len(), "out"))
}

/// Product of the away-branch coefficients of two angles at intersection
/// angle `delta` (radians).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_separation_product(theta1: f64, theta2: f64, delta: f64, out: *mut f64) -> NrStatus {
    guard(|| {
        if ![theta1, theta2, delta].iter().all(|v| v.is_finite()) {
            return fail(NrStatus::InvalidArgument, "angles must be finite");
        }
        write(out, piecewise::separation_product(theta1, theta2, delta), "out")
    })
}

/// Projects `x` at angle `theta` onto the line through `line_point` at
/// direction angle `line_angle` (radians).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_project(
    x: NrPoint,
    theta: f64,
    orientation_bit: u8,
    line_point: NrPoint,
    line_angle: f64,
    out: *mut NrPoint,
) -> NrStatus {
    guard(|| {
        let line = Line::from_point_angle(line_point.into(), line_angle, "target")?;
        let p = geometry::project(x.into(), theta, orientation(orientation_bit)?, &line)?;
        write(out, p.into(), "out")
    })
}

/// Iterates `steps` rule applications from `start`, writing the orbit
/// (start first) into `points[..capacity]`. A run that stops at an
/// invariant point still returns `Ok` with `degenerate` set.
///
/// # Safety
/// `sys` must be a live handle; `points` must hold `capacity` elements;
/// `summary` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_simulate(
    sys: *const NrSystem,
    start: NrPoint,
    steps: usize,
    points: *mut NrPoint,
    capacity: usize,
    summary: *mut NrSimulation,
) -> NrStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        if summary.is_null() {
            return fail(NrStatus::NullPointer, "summary is null");
        }
        let run = simulate(&sys.system, start.into(), steps)?;
        let s = NrSimulation {
            count: run.points.len(),
            period: run.cycle.as_ref().map_or(0, |c| c.period),
            degenerate: run.degenerate,
            escaped: run.escaped,
        };
        if run.points.len() > capacity {
            summary.write(s);
            return fail(
                NrStatus::BufferTooSmall,
                format!("orbit needs {} points, buffer holds {capacity}", run.points.len()),
            );
        }
        if points.is_null() {
            return fail(NrStatus::NullPointer, "points is null");
        }
        for (i, p) in run.points.iter().enumerate() {
            points.add(i).write((*p).into());
        }
        summary.write(s);
        Ok(())
    })
}

/// Runs up to `max_steps` applications from `start` and reports the limit
/// period `k·n` for the smallest `k ≤ k_max` the tail confirms.
///
/// # Safety
/// `sys` must be a live handle; `period` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nr_detect_period(
    sys: *const NrSystem,
    start: NrPoint,
    max_steps: usize,
    k_max: usize,
    period: *mut usize,
) -> NrStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let n = sys.system.len();
        let points = match &sys.system {
            System::Symbolic(m) => m.orbit(start.into(), max_steps)?,
            System::Piecewise(m) => {
                let orbit = m.iterate(start.into(), max_steps)?;
                if orbit.terminated_degenerate {
                    return fail(NrStatus::Degenerate, "orbit reached an invariant point");
                }
                orbit.points
            }
        };
        let cycle =
            piecewise::detect_periodic_points(&points, n, piecewise::DEFAULT_PERIOD_TOL, k_max)?;
        write(period, cycle.period, "period")
    })
}

/// Builds a closed curve over the system's lines: vertex `k` lies on
/// `labels[k]` and segment `k` meets it at `angles_deg[k]`. Writes `n`
/// vertices to `vertices`.
///
/// # Safety
/// `sys` must be a live handle; `angles_deg` and `labels` must hold `n`
/// elements, each label NUL-terminated; `vertices` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn nr_build_curve(
    sys: *const NrSystem,
    angles_deg: *const f64,
    labels: *const *const c_char,
    n: usize,
    vertices: *mut NrPoint,
) -> NrStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        if angles_deg.is_null() || labels.is_null() || vertices.is_null() {
            return fail(NrStatus::NullPointer, "angles, labels and vertices must be non-null");
        }
        let angles: Vec<f64> = std::slice::from_raw_parts(angles_deg, n)
            .iter()
            .map(|a| a.to_radians())
            .collect();
        let names = std::slice::from_raw_parts(labels, n)
            .iter()
            .map(|&l| c_str(l, "label").map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        let arr = sys.system.arrangement();
        let curve = build_closed_curve(arr, &angles, &names)?;
        for (i, v) in curve.vertices().iter().enumerate() {
            vertices.add(i).write((*v).into());
        }
        Ok(())
    })
}
