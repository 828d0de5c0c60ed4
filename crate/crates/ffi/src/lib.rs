//! C ABI for giant-scatter.
//!
//! Every entry point returns a [`GsStatus`]. On failure the message is
//! available from [`gs_last_error`] on the calling thread. Models are opaque
//! handles created by `gs_model_*` and released with [`gs_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use giant_scatter::closed_form::two_level_amplitudes;
use giant_scatter::error::Error;
use giant_scatter::model::{
    delta_to_model, nabla_to_model, two_level_to_model, DeltaParams, NablaParams, ScatterModel, TwoLevelParams,
};
use giant_scatter::solver::s_matrix;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    PortOutOfRange = 3,
    SingularSystem = 4,
    Residual = 5,
    Unsupported = 6,
    UndefinedContrast = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

impl From<&Error> for GsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_)
            | Error::Model(_)
            | Error::UnknownObservable(_)
            | Error::UnknownParameter { .. }
            | Error::UnknownPreset(_)
            | Error::Grid(_) => GsStatus::InvalidParameter,
            Error::PortOutOfRange { .. } => GsStatus::PortOutOfRange,
            Error::UndefinedContrast => GsStatus::UndefinedContrast,
            Error::UnsupportedConfiguration(_) => GsStatus::Unsupported,
            Error::SingularSystem { .. } => GsStatus::SingularSystem,
            Error::Residual { .. } => GsStatus::Residual,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for GsComplex {
    fn from(z: num_complex::Complex64) -> Self {
        GsComplex { re: z.re, im: z.im }
    }
}

/// Two-level atom on one waveguide, coupled at two points.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GsTwoLevelParams {
    pub gamma_wg: f64,
    pub gamma_ext: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub phi0: f64,
    pub tau: f64,
}

/// ∇-type atom on two waveguides with a classical drive between the excited levels.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GsNablaParams {
    pub gamma1_wg: f64,
    pub gamma2_wg: f64,
    pub gamma_e1: f64,
    pub gamma_e2: f64,
    pub rabi: f64,
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub phi_a0: f64,
    pub phi_b0: f64,
    pub tau_a: f64,
    pub tau_b: f64,
}

/// Δ-type atom on two waveguides with a drive between the lower levels.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GsDeltaParams {
    pub gamma1_wg: f64,
    pub gamma2_wg: f64,
    pub gamma_g2: f64,
    pub gamma_e: f64,
    pub drive: f64,
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    pub phi_a0: f64,
    pub phi_b0: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    pub omega_g2: f64,
}

/// Closed-form two-level amplitudes. `t`, `r` for incidence from the left,
/// `t_rev`, `r_rev` from the right, `u_fwd`, `u_rev` the atomic amplitudes.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GsTwoLevelAmplitudes {
    pub t: GsComplex,
    pub r: GsComplex,
    pub t_rev: GsComplex,
    pub r_rev: GsComplex,
    pub u_fwd: GsComplex,
    pub u_rev: GsComplex,
}

impl From<GsTwoLevelParams> for TwoLevelParams {
    fn from(p: GsTwoLevelParams) -> Self {
        TwoLevelParams {
            gamma_wg: p.gamma_wg,
            gamma_ext: p.gamma_ext,
            theta1: p.theta1,
            theta2: p.theta2,
            phi0: p.phi0,
            tau: p.tau,
        }
    }
}

impl From<TwoLevelParams> for GsTwoLevelParams {
    fn from(p: TwoLevelParams) -> Self {
        GsTwoLevelParams {
            gamma_wg: p.gamma_wg,
            gamma_ext: p.gamma_ext,
            theta1: p.theta1,
            theta2: p.theta2,
            phi0: p.phi0,
            tau: p.tau,
        }
    }
}

impl From<GsNablaParams> for NablaParams {
    fn from(p: GsNablaParams) -> Self {
        NablaParams {
            gamma1_wg: p.gamma1_wg,
            gamma2_wg: p.gamma2_wg,
            gamma_e1: p.gamma_e1,
            gamma_e2: p.gamma_e2,
            rabi: p.rabi,
            alpha: p.alpha,
            theta1: p.theta1,
            theta2: p.theta2,
            theta3: p.theta3,
            theta4: p.theta4,
            phi_a0: p.phi_a0,
            phi_b0: p.phi_b0,
            tau_a: p.tau_a,
            tau_b: p.tau_b,
        }
    }
}

impl From<NablaParams> for GsNablaParams {
    fn from(p: NablaParams) -> Self {
        GsNablaParams {
            gamma1_wg: p.gamma1_wg,
            gamma2_wg: p.gamma2_wg,
            gamma_e1: p.gamma_e1,
            gamma_e2: p.gamma_e2,
            rabi: p.rabi,
            alpha: p.alpha,
            theta1: p.theta1,
            theta2: p.theta2,
            theta3: p.theta3,
            theta4: p.theta4,
            phi_a0: p.phi_a0,
            phi_b0: p.phi_b0,
            tau_a: p.tau_a,
            tau_b: p.tau_b,
        }
    }
}

impl From<GsDeltaParams> for DeltaParams {
    fn from(p: GsDeltaParams) -> Self {
        DeltaParams {
            gamma1_wg: p.gamma1_wg,
            gamma2_wg: p.gamma2_wg,
            gamma_g2: p.gamma_g2,
            gamma_e: p.gamma_e,
            drive: p.drive,
            beta: p.beta,
            theta1: p.theta1,
            theta2: p.theta2,
            theta3: p.theta3,
            theta4: p.theta4,
            phi_a0: p.phi_a0,
            phi_b0: p.phi_b0,
            tau_a: p.tau_a,
            tau_b: p.tau_b,
            omega_g2: p.omega_g2,
        }
    }
}

impl From<DeltaParams> for GsDeltaParams {
    fn from(p: DeltaParams) -> Self {
        GsDeltaParams {
            gamma1_wg: p.gamma1_wg,
            gamma2_wg: p.gamma2_wg,
            gamma_g2: p.gamma_g2,
            gamma_e: p.gamma_e,
            drive: p.drive,
            beta: p.beta,
            theta1: p.theta1,
            theta2: p.theta2,
            theta3: p.theta3,
            theta4: p.theta4,
            phi_a0: p.phi_a0,
            phi_b0: p.phi_b0,
            tau_a: p.tau_a,
            tau_b: p.tau_b,
            omega_g2: p.omega_g2,
        }
    }
}

/// Opaque scattering model.
pub struct GsModel {
    model: ScatterModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: GsStatus, msg: impl Into<String>) -> GsStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), GsStatus>) -> GsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(GsStatus::Internal, "internal panic"),
    }
}

fn lift(e: Error) -> GsStatus {
    let status = GsStatus::from(&e);
    fail(status, e.to_string())
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), GsStatus> {
    if p.is_null() {
        Err(fail(GsStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into this library from the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn gs_two_level_params_default() -> GsTwoLevelParams {
    TwoLevelParams::default().into()
}

#[no_mangle]
pub extern "C" fn gs_nabla_params_default() -> GsNablaParams {
    NablaParams::default().into()
}

#[no_mangle]
pub extern "C" fn gs_delta_params_default() -> GsDeltaParams {
    DeltaParams::default().into()
}

fn new_model(out: *mut *mut GsModel, build: impl FnOnce() -> giant_scatter::error::Result<ScatterModel>) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = build().map_err(lift)?;
        let handle = Box::into_raw(Box::new(GsModel { model }));
        // SAFETY: `out` was checked for null and the caller guarantees it is writable.
        unsafe { *out = handle };
        Ok(())
    })
}

/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gs_model_two_level(params: *const GsTwoLevelParams, out: *mut *mut GsModel) -> GsStatus {
    if params.is_null() {
        return fail(GsStatus::NullPointer, "`params` is null");
    }
    let p = TwoLevelParams::from(*params);
    new_model(out, || two_level_to_model(&p))
}

/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gs_model_nabla(params: *const GsNablaParams, out: *mut *mut GsModel) -> GsStatus {
    if params.is_null() {
        return fail(GsStatus::NullPointer, "`params` is null");
    }
    let p = NablaParams::from(*params);
    new_model(out, || nabla_to_model(&p))
}

/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gs_model_delta(params: *const GsDeltaParams, out: *mut *mut GsModel) -> GsStatus {
    if params.is_null() {
        return fail(GsStatus::NullPointer, "`params` is null");
    }
    let p = DeltaParams::from(*params);
    new_model(out, || delta_to_model(&p))
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from a `gs_model_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gs_model_free(model: *mut GsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of ports, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_model_n_ports(model: *const GsModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.n_ports())
}

unsafe fn fill_s_matrix<T>(
    model: *const GsModel,
    delta: f64,
    out: *mut T,
    len: usize,
    pick: impl Fn(&giant_scatter::solver::SMatrix, usize, usize) -> T,
) -> GsStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let m = &(*model).model;
        let n = m.n_ports();
        if len < n * n {
            return Err(fail(GsStatus::BufferTooSmall, format!("need {} entries, got {len}", n * n)));
        }
        let s = s_matrix(m, delta).map_err(lift)?;
        let buf = std::slice::from_raw_parts_mut(out, n * n);
        for i in 0..n {
            for j in 0..n {
                buf[i * n + j] = pick(&s, i, j);
            }
        }
        Ok(())
    })
}

/// Writes the n×n probability matrix row-major: entry `i*n + j` is the
/// probability from port `i+1` into port `j+1`.
///
/// # Safety
/// `model` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_s_matrix(model: *const GsModel, delta: f64, out: *mut f64, len: usize) -> GsStatus {
    fill_s_matrix(model, delta, out, len, |s, i, j| s.probabilities[i][j])
}

/// Same layout as [`gs_s_matrix`] with complex amplitudes.
///
/// # Safety
/// `model` must be a live handle and `out` must hold `len` complex values.
#[no_mangle]
pub unsafe extern "C" fn gs_s_matrix_amplitudes(
    model: *const GsModel,
    delta: f64,
    out: *mut GsComplex,
    len: usize,
) -> GsStatus {
    fill_s_matrix(model, delta, out, len, |s, i, j| s.amplitudes[i][j].into())
}

/// # Safety
/// `params` must point to a valid struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn gs_two_level_amplitudes(
    params: *const GsTwoLevelParams,
    delta: f64,
    out: *mut GsTwoLevelAmplitudes,
) -> GsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let a = two_level_amplitudes(&TwoLevelParams::from(*params), delta).map_err(lift)?;
        *out = GsTwoLevelAmplitudes {
            t: a.t.into(),
            r: a.r.into(),
            t_rev: a.t_rev.into(),
            r_rev: a.r_rev.into(),
            u_fwd: a.u_fwd.into(),
            u_rev: a.u_rev.into(),
        };
        Ok(())
    })
}
