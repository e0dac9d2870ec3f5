//! C ABI for the twoch solver and verification library.
//!
//! All objects cross the boundary as opaque handles created and destroyed
//! by this library; every fallible call returns a [`TwochStatus`] and
//! writes results through out-pointers. Handles are not thread-safe to
//! mutate concurrently, but distinct handles are independent.

use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twoch::cli::{simulate, RunConfig};
use twoch::dynamics::{Outcome, Trajectory};
use twoch::error::Error;
use twoch::persistence::{gronwall_constant, verify_theorem1};
use twoch::spectral::NormOrder;
use twoch::weights::{certify, parse_weight_spec, ModerateCertificate, Smoothing, WeightSpec};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwochStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAdmissible = 3,
    PreconditionFailed = 4,
    BlowUp = 5,
    DomainTooSmall = 6,
    InfiniteNorm = 7,
    WindowError = 8,
    StrideTooCoarse = 9,
    RangeError = 10,
    UnboundedDerivative = 11,
    IoError = 12,
    InternalError = 13,
}

fn status_of(e: &Error) -> TwochStatus {
    match e {
        Error::NotAdmissible(_) => TwochStatus::NotAdmissible,
        Error::Range { .. } => TwochStatus::RangeError,
        Error::UnboundedDerivative(_) => TwochStatus::UnboundedDerivative,
        Error::ShapeMismatch(_) | Error::Domain(_) | Error::Parse { .. } => {
            TwochStatus::InvalidArgument
        }
        Error::Precondition(_) => TwochStatus::PreconditionFailed,
        Error::BlowUp { .. } => TwochStatus::BlowUp,
        Error::DomainTooSmall { .. } => TwochStatus::DomainTooSmall,
        Error::InfiniteNorm(_) => TwochStatus::InfiniteNorm,
        Error::Window(_) => TwochStatus::WindowError,
        Error::StrideTooCoarse(_) => TwochStatus::StrideTooCoarse,
        Error::Io(_) => TwochStatus::IoError,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn twoch_status_message(status: TwochStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        TwochStatus::Ok => b"ok\0",
        TwochStatus::NullPointer => b"null pointer argument\0",
        TwochStatus::InvalidArgument => b"invalid argument\0",
        TwochStatus::NotAdmissible => b"weight not admissible\0",
        TwochStatus::PreconditionFailed => b"precondition failed\0",
        TwochStatus::BlowUp => b"solution blow-up\0",
        TwochStatus::DomainTooSmall => b"domain too small for the solution tails\0",
        TwochStatus::InfiniteNorm => b"weighted norm diverges\0",
        TwochStatus::WindowError => b"no admissible fit window\0",
        TwochStatus::StrideTooCoarse => b"snapshot stride too coarse\0",
        TwochStatus::RangeError => b"weight evaluation out of range\0",
        TwochStatus::UnboundedDerivative => b"derivative bound unbounded\0",
        TwochStatus::IoError => b"i/o error\0",
        TwochStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Opaque weight handle.
pub struct TwochWeight {
    spec: WeightSpec,
}

/// Opaque trajectory handle.
pub struct TwochTrajectory {
    traj: Trajectory,
}

/// Moderateness certificate, plain data across the boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TwochCertificate {
    pub c_mod: f64,
    pub a_bound: f64,
    pub v_integral: f64,
    pub dgv_l1: f64,
    pub gv_l1: f64,
    pub sample_box: f64,
}

/// Two-sided weight.
pub const TWOCH_SIDE_BOTH: c_int = 0;
/// Weight acting on x >= 0 only.
pub const TWOCH_SIDE_RIGHT: c_int = 1;
/// Literal |x| in the exponential factor.
pub const TWOCH_SMOOTHING_EXACT: c_int = 0;
/// Regularized |x| in the exponential factor.
pub const TWOCH_SMOOTHING_REGULARIZED: c_int = 1;
/// Pick exact for b in {0,1}, regularized otherwise.
pub const TWOCH_SMOOTHING_DEFAULT: c_int = -1;

/// Build a weight e^{a|x|^b} (1+|x|)^c (log(e+|x|))^d.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_new(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    side: c_int,
    smoothing: c_int,
    out: *mut *mut TwochWeight,
) -> TwochStatus {
    if out.is_null() {
        return TwochStatus::NullPointer;
    }
    let mut spec = match WeightSpec::new(a, b, c, d) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    match side {
        TWOCH_SIDE_BOTH => {}
        TWOCH_SIDE_RIGHT => spec = spec.right_only(),
        _ => return TwochStatus::InvalidArgument,
    }
    match smoothing {
        TWOCH_SMOOTHING_DEFAULT => {}
        TWOCH_SMOOTHING_EXACT => spec = spec.with_smoothing(Smoothing::Exact),
        TWOCH_SMOOTHING_REGULARIZED => spec = spec.with_smoothing(Smoothing::Regularized),
        _ => return TwochStatus::InvalidArgument,
    }
    unsafe {
        *out = Box::into_raw(Box::new(TwochWeight { spec }));
    }
    TwochStatus::Ok
}

/// Parse a key=value weight block (`a=`, `b=`, `c=`, `d=`, `side=`,
/// `smoothing=`).
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_parse(
    text: *const c_char,
    out: *mut *mut TwochWeight,
) -> TwochStatus {
    if text.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: caller passes a NUL-terminated string.
    let text = match unsafe { CStr::from_ptr(text) }.to_str() {
        Ok(t) => t,
        Err(_) => return TwochStatus::InvalidArgument,
    };
    match parse_weight_spec(text) {
        Ok(spec) => {
            unsafe {
                *out = Box::into_raw(Box::new(TwochWeight { spec }));
            }
            TwochStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Evaluate the weight at x.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_eval(
    weight: *const TwochWeight,
    x: f64,
    out: *mut f64,
) -> TwochStatus {
    if weight.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: handle created by this library.
    let w = unsafe { &*weight };
    match w.spec.eval(x) {
        Ok(v) => {
            unsafe { *out = v };
            TwochStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// True (1) when the weight satisfies a >= 0, 0 <= b <= 1, ab < 1.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_admissible(weight: *const TwochWeight) -> c_int {
    if weight.is_null() {
        return 0;
    }
    // Safety: handle created by this library.
    let w = unsafe { &*weight };
    w.spec.is_admissible() as c_int
}

/// Certify moderateness: the constant c_mod against the standard
/// companion, the derivative bound A, and the kernel integrals.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_certify(
    weight: *const TwochWeight,
    sample_box: f64,
    samples: usize,
    out: *mut TwochCertificate,
) -> TwochStatus {
    if weight.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: handle created by this library.
    let w = unsafe { &*weight };
    let result = catch_unwind(AssertUnwindSafe(|| certify(&w.spec, sample_box, samples)));
    match result {
        Ok(Ok(cert)) => {
            unsafe {
                *out = TwochCertificate {
                    c_mod: cert.c_mod,
                    a_bound: cert.a_bound,
                    v_integral: cert.v_integral,
                    dgv_l1: cert.dgv_l1,
                    gv_l1: cert.gv_l1,
                    sample_box: cert.sample_box,
                };
            }
            TwochStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => TwochStatus::InternalError,
    }
}

/// The traced Gronwall constant for a certificate.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_gronwall_constant(
    cert: *const TwochCertificate,
    out: *mut f64,
) -> TwochStatus {
    if cert.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: plain data filled by twoch_weight_certify.
    let c = unsafe { &*cert };
    let full = ModerateCertificate {
        c_mod: c.c_mod,
        a_bound: c.a_bound,
        v_integral: c.v_integral,
        dgv_l1: c.dgv_l1,
        gv_l1: c.gv_l1,
        sample_box: c.sample_box,
    };
    unsafe { *out = gronwall_constant(&full) };
    TwochStatus::Ok
}

/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_weight_free(weight: *mut TwochWeight) {
    if !weight.is_null() {
        // Safety: handle created by this library, freed exactly once.
        unsafe {
            drop(Box::from_raw(weight));
        }
    }
}

/// Integrate a run described by a key=value config (same format as the
/// CLI) and return a trajectory handle.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_simulate(
    config_text: *const c_char,
    out: *mut *mut TwochTrajectory,
) -> TwochStatus {
    if config_text.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: caller passes a NUL-terminated string.
    let text = match unsafe { CStr::from_ptr(config_text) }.to_str() {
        Ok(t) => t,
        Err(_) => return TwochStatus::InvalidArgument,
    };
    let result = catch_unwind(|| -> Result<Trajectory, Error> {
        let cfg = RunConfig::parse(text)?;
        simulate(&cfg)
    });
    match result {
        Ok(Ok(traj)) => {
            unsafe {
                *out = Box::into_raw(Box::new(TwochTrajectory { traj }));
            }
            TwochStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => TwochStatus::InternalError,
    }
}

/// Number of stored snapshots.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_len(traj: *const TwochTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    // Safety: handle created by this library.
    unsafe { &*traj }.traj.snapshots.len()
}

/// Number of grid points per snapshot.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_grid_len(traj: *const TwochTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    // Safety: handle created by this library.
    unsafe { &*traj }.traj.initial().grid().len()
}

/// Time of snapshot `index`.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_time(
    traj: *const TwochTrajectory,
    index: usize,
    out: *mut f64,
) -> TwochStatus {
    if traj.is_null() || out.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: handle created by this library.
    let t = unsafe { &*traj };
    match t.traj.snapshots.get(index) {
        Some(s) => {
            unsafe { *out = s.state.t };
            TwochStatus::Ok
        }
        None => TwochStatus::InvalidArgument,
    }
}

/// Copy snapshot `index` into caller-provided buffers of length `len`
/// (= grid length). Null buffers are skipped.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_fields(
    traj: *const TwochTrajectory,
    index: usize,
    x: *mut f64,
    u: *mut f64,
    rho: *mut f64,
    len: usize,
) -> TwochStatus {
    if traj.is_null() {
        return TwochStatus::NullPointer;
    }
    // Safety: handle created by this library.
    let t = unsafe { &*traj };
    let snap = match t.traj.snapshots.get(index) {
        Some(s) => s,
        None => return TwochStatus::InvalidArgument,
    };
    let grid = snap.state.grid();
    if len != grid.len() {
        return TwochStatus::InvalidArgument;
    }
    // Safety: caller guarantees each non-null buffer holds `len` doubles.
    unsafe {
        if !x.is_null() {
            ptr::copy_nonoverlapping(grid.points().as_ptr(), x, len);
        }
        if !u.is_null() {
            ptr::copy_nonoverlapping(snap.state.u.values().as_ptr(), u, len);
        }
        if !rho.is_null() {
            ptr::copy_nonoverlapping(snap.state.rho.values().as_ptr(), rho, len);
        }
    }
    TwochStatus::Ok
}

/// Run outcome: writes the breakdown time and returns 1 on blow-up,
/// returns 0 for a completed run.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_outcome(
    traj: *const TwochTrajectory,
    blow_up_time: *mut f64,
) -> c_int {
    if traj.is_null() {
        return 0;
    }
    // Safety: handle created by this library.
    match unsafe { &*traj }.traj.outcome {
        Outcome::Completed => 0,
        Outcome::BlowUp { t } => {
            if !blow_up_time.is_null() {
                unsafe { *blow_up_time = t };
            }
            1
        }
    }
}

/// Verify the weighted persistence bound N(t) <= e^{CMt} N(0) along the
/// trajectory. `p_is_inf` selects the sup norm, otherwise `p` >= 1 is the
/// norm order. Writes the verdict (1 pass / 0 fail), the traced constant,
/// the run-wide M and the worst margin relative to the bound.
/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_verify_persistence(
    traj: *const TwochTrajectory,
    weight: *const TwochWeight,
    p_is_inf: c_int,
    p: f64,
    pass: *mut c_int,
    c_used: *mut f64,
    m_sup: *mut f64,
    worst_margin: *mut f64,
) -> TwochStatus {
    if traj.is_null() || weight.is_null() || pass.is_null() {
        return TwochStatus::NullPointer;
    }
    let order = if p_is_inf != 0 {
        NormOrder::Infinity
    } else {
        if p.is_nan() || p < 1.0 {
            return TwochStatus::InvalidArgument;
        }
        NormOrder::Finite(p)
    };
    // Safety: handles created by this library.
    let t = unsafe { &*traj };
    let w = unsafe { &*weight };
    let result = catch_unwind(AssertUnwindSafe(|| {
        verify_theorem1(&t.traj, &w.spec, order)
    }));
    match result {
        Ok(Ok(rep)) => {
            let worst = rep
                .margin
                .iter()
                .zip(&rep.bound)
                .map(|(mg, b)| if *b != 0.0 { mg / b } else { 0.0 })
                .fold(f64::INFINITY, f64::min);
            unsafe {
                *pass = rep.verdict as c_int;
                if !c_used.is_null() {
                    *c_used = rep.c_used;
                }
                if !m_sup.is_null() {
                    *m_sup = rep.m;
                }
                if !worst_margin.is_null() {
                    *worst_margin = worst;
                }
            }
            TwochStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => TwochStatus::InternalError,
    }
}

/// # Safety
/// Pointer arguments must be valid (or null where documented); handles
/// must have been created by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn twoch_trajectory_free(traj: *mut TwochTrajectory) {
    if !traj.is_null() {
        // Safety: handle created by this library, freed exactly once.
        unsafe {
            drop(Box::from_raw(traj));
        }
    }
}
