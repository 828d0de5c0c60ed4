use std::f64::consts::FRAC_PI_2;
use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use giant_scatter_ffi::*;

fn last_error() -> Option<String> {
    let p = gs_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn two_level(params: &GsTwoLevelParams) -> *mut GsModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { gs_model_two_level(params, &mut m) }, GsStatus::Ok);
    m
}

#[test]
fn two_level_matrix_matches_closed_form() {
    let p = GsTwoLevelParams { theta2: 1.1, phi0: 0.4, tau: 0.3, gamma_ext: 0.5, ..gs_two_level_params_default() };
    let m = two_level(&p);
    assert_eq!(unsafe { gs_model_n_ports(m) }, 2);
    let mut amps = [GsComplex::default(); 4];
    let mut probs = [0.0; 4];
    let mut cf = GsTwoLevelAmplitudes::default();
    unsafe {
        assert_eq!(gs_s_matrix_amplitudes(m, 0.7, amps.as_mut_ptr(), 4), GsStatus::Ok);
        assert_eq!(gs_s_matrix(m, 0.7, probs.as_mut_ptr(), 4), GsStatus::Ok);
        assert_eq!(gs_two_level_amplitudes(&p, 0.7, &mut cf), GsStatus::Ok);
        gs_model_free(m);
    }
    let near = |a: GsComplex, b: GsComplex| (a.re - b.re).hypot(a.im - b.im) < 1e-12;
    assert!(near(amps[0], cf.r));
    assert!(near(amps[1], cf.t));
    assert!(near(amps[2], cf.t_rev));
    assert!(near(amps[3], cf.r_rev));
    assert!((probs[1] - (cf.t.re * cf.t.re + cf.t.im * cf.t.im)).abs() < 1e-12);
    assert!(last_error().is_none());
}

#[test]
fn circulator_through_handle() {
    let p = GsNablaParams {
        rabi: 2.0,
        theta2: FRAC_PI_2,
        theta4: 3.0 * FRAC_PI_2,
        phi_a0: FRAC_PI_2,
        phi_b0: FRAC_PI_2,
        ..gs_nabla_params_default()
    };
    let mut m = ptr::null_mut();
    let mut probs = [0.0; 16];
    unsafe {
        assert_eq!(gs_model_nabla(&p, &mut m), GsStatus::Ok);
        assert_eq!(gs_model_n_ports(m), 4);
        assert_eq!(gs_s_matrix(m, 0.0, probs.as_mut_ptr(), 16), GsStatus::Ok);
        gs_model_free(m);
    }
    for (from, to) in [(1, 3), (3, 4), (4, 2), (2, 1)] {
        assert!((probs[(from - 1) * 4 + (to - 1)] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn delta_model_is_lossless_without_dissipation() {
    let p = GsDeltaParams { drive: 3.0, beta: 0.4, phi_a0: FRAC_PI_2, ..gs_delta_params_default() };
    let mut m = ptr::null_mut();
    let mut probs = [0.0; 16];
    unsafe {
        assert_eq!(gs_model_delta(&p, &mut m), GsStatus::Ok);
        assert_eq!(gs_s_matrix(m, 0.3, probs.as_mut_ptr(), 16), GsStatus::Ok);
        gs_model_free(m);
    }
    for row in probs.chunks(4) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    let bad = GsTwoLevelParams { gamma_wg: 0.0, ..gs_two_level_params_default() };
    unsafe {
        assert_eq!(gs_model_two_level(&bad, &mut m), GsStatus::InvalidParameter);
        assert!(m.is_null());
        assert!(last_error().unwrap().contains("gamma_wg"));
        assert_eq!(gs_model_two_level(ptr::null(), &mut m), GsStatus::NullPointer);
        assert_eq!(gs_model_two_level(&gs_two_level_params_default(), ptr::null_mut()), GsStatus::NullPointer);
        assert_eq!(gs_model_n_ports(ptr::null()), 0);
        gs_model_free(ptr::null_mut());

        let m = two_level(&gs_two_level_params_default());
        let mut small = [0.0; 3];
        assert_eq!(gs_s_matrix(m, 0.0, small.as_mut_ptr(), 3), GsStatus::BufferTooSmall);
        assert_eq!(gs_s_matrix(m, 0.0, ptr::null_mut(), 4), GsStatus::NullPointer);
        assert_eq!(gs_s_matrix(ptr::null(), 0.0, small.as_mut_ptr(), 4), GsStatus::NullPointer);
        let mut ok = [0.0; 4];
        assert_eq!(gs_s_matrix(m, 0.0, ok.as_mut_ptr(), 4), GsStatus::Ok);
        assert!(last_error().is_none());
        gs_model_free(m);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/giant_scatter.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in
        ["gs_model_two_level", "gs_model_nabla", "gs_model_delta", "gs_model_free", "gs_s_matrix", "gs_last_error"]
    {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
