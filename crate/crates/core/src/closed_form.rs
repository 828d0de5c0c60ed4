//! Closed-form amplitudes for the two-level giant atom and the ∇-type atom
//! with a single W_b coupling point.
//!
//! Two-level atom, left incidence, `θ = θ₂ − θ₁`, `φ = φ₀ + τΔ`:
//!
//! ```text
//! den = Δ + iγ_e/2 + 2iΓ(1 + e^{iφ} cos θ)
//! t   = (Δ + iγ_e/2 − 2Γ e^{iθ} sin φ) / den
//! r   = (t − 1)(1 + e^{i(θ+φ)}) / (1 + e^{i(θ−φ)})
//! u   = g (e^{−iθ₁} + e^{i(φ−θ₂)}) / den
//! ```
//!
//! Right incidence is the same with `θ₁ ↔ θ₂`. Amplitudes use the phase
//! frames of [`crate::solver`], so both agree as complex numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{two_level_to_model, NablaParams, Port, TwoLevelParams};
use crate::solver::solve_scattering;

type Complex = Complex64;

const I: Complex = Complex::new(0.0, 1.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Below this modulus the factored reflection formula is not evaluated.
pub const REFLECTION_FACTOR_FLOOR: f64 = 1e-8;

/// Below this sum a contrast ratio is undefined.
pub const CONTRAST_FLOOR: f64 = 1e-20;

pub fn phase_accumulated(phi0: f64, tau: f64, delta: f64) -> f64 {
    phi0 + tau * delta
}

/// `(a − b)/(a + b)`, or [`Error::UndefinedContrast`] when both vanish.
pub fn contrast_ratio(a: f64, b: f64) -> Result<f64> {
    let sum = a + b;
    if sum < CONTRAST_FLOOR {
        return Err(Error::UndefinedContrast);
    }
    Ok(((a - b) / sum).clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub t: Complex,
    pub r: Complex,
    pub t_rev: Complex,
    pub r_rev: Complex,
    pub u_fwd: Complex,
    pub u_rev: Complex,
    /// `r` came from the solver because the factored form was singular.
    pub r_from_solver: bool,
    pub r_rev_from_solver: bool,
}

impl TwoLevelAmplitudes {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn transmission_rev(&self) -> f64 {
        self.t_rev.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn reflection_rev(&self) -> f64 {
        self.r_rev.norm_sqr()
    }
}

fn two_level_denominator(p: &TwoLevelParams, delta: f64, phi: f64) -> Complex {
    Complex::new(delta, p.gamma_ext / 2.0) + 2.0 * I * p.gamma_wg * (ONE + (I * phi).exp() * p.theta().cos())
}

pub fn two_level_amplitudes(p: &TwoLevelParams, delta: f64) -> Result<TwoLevelAmplitudes> {
    p.validate()?;
    let theta = p.theta();
    let phi = phase_accumulated(p.phi0, p.tau, delta);
    let gamma = p.gamma_wg;
    let g = gamma.sqrt();
    let den = two_level_denominator(p, delta, phi);
    if den.norm() == 0.0 {
        return Err(Error::SingularSystem { delta, condition: f64::INFINITY });
    }
    let bare = Complex::new(delta, p.gamma_ext / 2.0);
    let t = (bare - 2.0 * gamma * (I * theta).exp() * phi.sin()) / den;
    let t_rev = (bare - 2.0 * gamma * (-I * theta).exp() * phi.sin()) / den;
    let u_fwd = g * ((-I * p.theta1).exp() + (I * (phi - p.theta2)).exp()) / den;
    let u_rev = g * ((-I * p.theta2).exp() + (I * (phi - p.theta1)).exp()) / den;

    let solver_reflection = |port: Port| -> Result<Complex> {
        let model = two_level_to_model(p)?;
        Ok(solve_scattering(&model, delta, port)?.amplitude(port))
    };

    let fwd_factor = ONE + (I * (theta - phi)).exp();
    let (r, r_from_solver) = if fwd_factor.norm() < REFLECTION_FACTOR_FLOOR {
        (solver_reflection(Port(1))?, true)
    } else {
        ((t - ONE) * (ONE + (I * (theta + phi)).exp()) / fwd_factor, false)
    };
    let rev_factor = ONE + (-I * (theta + phi)).exp();
    let (r_rev, r_rev_from_solver) = if rev_factor.norm() < REFLECTION_FACTOR_FLOOR {
        (solver_reflection(Port(2))?, true)
    } else {
        ((t_rev - ONE) * (ONE + (I * (phi - theta)).exp()) / rev_factor, false)
    };

    Ok(TwoLevelAmplitudes { t, r, t_rev, r_rev, u_fwd, u_rev, r_from_solver, r_rev_from_solver })
}

/// Phase-dependent `(effective detuning, effective half-width)`.
pub fn effective_lamb_and_width(p: &TwoLevelParams, delta: f64) -> (f64, f64) {
    let theta = p.theta();
    let phi = phase_accumulated(p.phi0, p.tau, delta);
    (
        delta - 2.0 * p.gamma_wg * theta.cos() * phi.sin(),
        p.gamma_ext / 2.0 + 2.0 * p.gamma_wg * (1.0 + theta.cos() * phi.cos()),
    )
}

/// Transmission contrast `(T₂→₁ − T₁→₂)/(T₂→₁ + T₁→₂)`.
pub fn contrast_i(p: &TwoLevelParams, delta: f64) -> Result<f64> {
    let a = two_level_amplitudes(p, delta)?;
    contrast_ratio(a.transmission_rev(), a.transmission())
}

/// Excitation contrast `(|u₂→₁|² − |u₁→₂|²)/(|u₂→₁|² + |u₁→₂|²)`.
///
/// The common denominator of both amplitudes cancels, so only the
/// interference weights `|e^{−iθ₁} + e^{i(φ−θ₂)}|²` and the exchanged one
/// enter. This makes the ratio exactly independent of `γ_e`.
pub fn contrast_d(p: &TwoLevelParams, delta: f64) -> Result<f64> {
    p.validate()?;
    let phi = phase_accumulated(p.phi0, p.tau, delta);
    let fwd = ((-I * p.theta1).exp() + (I * (phi - p.theta2)).exp()).norm_sqr();
    let rev = ((-I * p.theta2).exp() + (I * (phi - p.theta1)).exp()).norm_sqr();
    contrast_ratio(rev, fwd)
}

/// Non-negative residual whose zeros are exactly the points with `R = 1`.
pub fn perfect_reflection_residual(p: &TwoLevelParams, delta: f64) -> f64 {
    let theta = p.theta();
    let phi = phase_accumulated(p.phi0, p.tau, delta);
    let (g, ge) = (p.gamma_wg, p.gamma_ext);
    let shift = delta - 2.0 * g * phi.sin() * theta.cos();
    shift * shift
        + ge * ge / 4.0
        + 2.0 * ge * g * (1.0 + theta.cos() * phi.cos())
        + 4.0 * g * g * (phi.sin() * theta.sin()).powi(2)
}

/// External loss that minimises `T₁→₂` at `θ = φ = π/2`.
pub fn optimal_blocking_gamma(delta: f64, gamma_wg: f64) -> f64 {
    2.0 * (delta * delta + 4.0 * gamma_wg * gamma_wg).sqrt()
}

/// Form of the W_a → W_b transfer kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransferKernel {
    /// `f = 1/(Δ′ + i(γ_{e₂}/2 + Γ₂))`.
    #[default]
    Resolved,
    /// Sign of the imaginary part flipped; only used as a negative control.
    SignFlipped,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NablaAmplitudes {
    pub s12: Complex,
    pub s21: Complex,
    pub s13: Complex,
    pub s14: Complex,
    pub s23: Complex,
    pub s24: Complex,
    pub s41: Complex,
    pub f: Complex,
    pub u_fwd: Complex,
    pub u_rev: Complex,
}

/// ∇-type amplitudes for a single W_b coupling point.
///
/// With `X = Δ′ + iγ_{e₁}/2 − Ω² f` and
/// `den = X + 2iΓ₁(1 + e^{iφ_a} cos θ)`, the W_a amplitudes have the
/// two-level form with `Δ + iγ_e/2 → X`, and each transfer into W_b is
/// `−i g₂ e^{iθ₃} Ω e^{−iα} f u` where `u` is the |e₁⟩ amplitude for the
/// incidence side. `s₄→₁` carries the reverse-path phase
/// `e^{−i(2θ₃ − 2α + φ_a − θ₁ − θ₂)}` relative to `s₂→₃`.
pub fn nabla_amplitudes(p: &NablaParams, delta: f64) -> Result<NablaAmplitudes> {
    nabla_amplitudes_with(p, delta, TransferKernel::Resolved)
}

pub fn nabla_amplitudes_with(p: &NablaParams, delta: f64, kernel: TransferKernel) -> Result<NablaAmplitudes> {
    p.validate()?;
    if !p.wb_single_point() {
        return Err(Error::UnsupportedConfiguration(
            "closed form needs a single W_b coupling point (phi_b0 = tau_b = 0, theta3 = theta4)".into(),
        ));
    }
    let theta = p.theta();
    let phi = phase_accumulated(p.phi_a0, p.tau_a, delta);
    let (g1, g2) = (p.gamma1_wg.sqrt(), p.gamma2_wg.sqrt());
    let width = p.gamma_e2 / 2.0 + p.gamma2_wg;
    let f = match kernel {
        TransferKernel::Resolved => ONE / Complex::new(delta, width),
        TransferKernel::SignFlipped => ONE / Complex::new(delta, -width),
    };
    let x = Complex::new(delta, p.gamma_e1 / 2.0) - p.rabi * p.rabi * f;
    let den = x + 2.0 * I * p.gamma1_wg * (ONE + (I * phi).exp() * theta.cos());
    if den.norm() == 0.0 {
        return Err(Error::SingularSystem { delta, condition: f64::INFINITY });
    }
    let s12 = (x - 2.0 * p.gamma1_wg * (I * theta).exp() * phi.sin()) / den;
    let s21 = (x - 2.0 * p.gamma1_wg * (-I * theta).exp() * phi.sin()) / den;
    let u_fwd = g1 * ((-I * p.theta1).exp() + (I * (phi - p.theta2)).exp()) / den;
    let u_rev = g1 * ((-I * p.theta2).exp() + (I * (phi - p.theta1)).exp()) / den;
    let transfer = -I * g2 * (I * p.theta3).exp() * p.rabi * (-I * p.alpha).exp() * f;
    let s13 = transfer * u_fwd;
    let s23 = transfer * u_rev;
    let s41 = s23 * (-I * (2.0 * p.theta3 - 2.0 * p.alpha + phi - p.theta1 - p.theta2)).exp();
    Ok(NablaAmplitudes { s12, s21, s13, s14: s13, s23, s24: s23, s41, f, u_fwd, u_rev })
}

/// Chirality `(S₁→₄ − S₂→₃)/(S₁→₄ + S₂→₃)` from the closed form.
pub fn chirality_c(p: &NablaParams, delta: f64) -> Result<f64> {
    let a = nabla_amplitudes(p, delta)?;
    contrast_ratio(a.s14.norm_sqr(), a.s23.norm_sqr())
}
