//! Physical parameter records and the generic scattering-model description.
//!
//! All rates and energies are in units of the emission rate into the first
//! waveguide (Γ for the two-level atom, Γ₁ for the three-level atoms), and
//! every energy is a detuning from the reference transition (|g⟩↔|e⟩,
//! |g⟩↔|e₁⟩ or |g₁⟩↔|e⟩). The group velocity is set to one, so a coupling
//! strength `g` and its emission rate are related by `Γ = g²`.
//!
//! Geometry is stored as phase data: each coupling point carries the
//! accumulated phase `φ₀` at zero detuning and the delay `τ` relative to the
//! first point of its waveguide, and the phase at detuning `Δ` is
//! `φ₀ + τ (Δ − ε_c)` with `ε_c` the channel reference energy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite, got {v}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be > 0, got {v}")))
    }
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be >= 0, got {v}")))
    }
}

/// Two-level giant atom with two coupling points on one waveguide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoLevelParams {
    /// Emission rate Γ into the waveguide.
    pub gamma_wg: f64,
    /// External (non-waveguide) dissipation γ_e.
    #[serde(alias = "gamma_e")]
    pub gamma_ext: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Accumulated phase between the points at zero detuning.
    pub phi0: f64,
    /// Propagation time between the points.
    pub tau: f64,
}

impl Default for TwoLevelParams {
    fn default() -> Self {
        Self { gamma_wg: 1.0, gamma_ext: 0.0, theta1: 0.0, theta2: 0.0, phi0: 0.0, tau: 0.0 }
    }
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("gamma_wg", self.gamma_wg)?;
        check_non_negative("gamma_ext", self.gamma_ext)?;
        check_non_negative("tau", self.tau)?;
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2), ("phi0", self.phi0)] {
            check_finite(name, v)?;
        }
        Ok(())
    }

    /// Coupling phase difference θ = θ₂ − θ₁.
    pub fn theta(&self) -> f64 {
        self.theta2 - self.theta1
    }

    /// The same atom with θ₁ and θ₂ swapped.
    pub fn exchanged(&self) -> Self {
        Self { theta1: self.theta2, theta2: self.theta1, ..*self }
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "gamma_wg" => self.gamma_wg = value,
            "gamma_ext" | "gamma_e" => self.gamma_ext = value,
            "theta1" => self.theta1 = value,
            "theta2" => self.theta2 = value,
            "theta" => self.theta2 = self.theta1 + value,
            "phi0" => self.phi0 = value,
            "tau" => self.tau = value,
            _ => return Err(Error::UnknownParameter { name: name.to_string(), model: "two-level" }),
        }
        Ok(())
    }
}

/// ∇-type atom: W_a drives |g⟩↔|e₁⟩, W_b drives |g⟩↔|e₂⟩, and a classical
/// field Ω e^{iα} couples |e₁⟩↔|e₂⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NablaParams {
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

impl Default for NablaParams {
    fn default() -> Self {
        Self {
            gamma1_wg: 1.0,
            gamma2_wg: 1.0,
            gamma_e1: 0.0,
            gamma_e2: 0.0,
            rabi: 0.0,
            alpha: 0.0,
            theta1: 0.0,
            theta2: 0.0,
            theta3: 0.0,
            theta4: 0.0,
            phi_a0: 0.0,
            phi_b0: 0.0,
            tau_a: 0.0,
            tau_b: 0.0,
        }
    }
}

impl NablaParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("gamma1_wg", self.gamma1_wg)?;
        check_non_negative("gamma2_wg", self.gamma2_wg)?;
        check_non_negative("gamma_e1", self.gamma_e1)?;
        check_non_negative("gamma_e2", self.gamma_e2)?;
        check_non_negative("rabi", self.rabi)?;
        check_non_negative("tau_a", self.tau_a)?;
        check_non_negative("tau_b", self.tau_b)?;
        for (name, v) in [
            ("alpha", self.alpha),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("theta3", self.theta3),
            ("theta4", self.theta4),
            ("phi_a0", self.phi_a0),
            ("phi_b0", self.phi_b0),
        ] {
            check_finite(name, v)?;
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        self.theta2 - self.theta1
    }

    pub fn theta_prime(&self) -> f64 {
        self.theta4 - self.theta3
    }

    /// W_b touches the atom at a single point: no propagation phase and equal
    /// coupling phases on its two legs.
    pub fn wb_single_point(&self) -> bool {
        self.phi_b0 == 0.0 && self.tau_b == 0.0 && self.theta3 == self.theta4
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "gamma1_wg" => self.gamma1_wg = value,
            "gamma2_wg" => self.gamma2_wg = value,
            "gamma_e1" => self.gamma_e1 = value,
            "gamma_e2" => self.gamma_e2 = value,
            "rabi" => self.rabi = value,
            "alpha" => self.alpha = value,
            "theta1" => self.theta1 = value,
            "theta2" => self.theta2 = value,
            "theta3" => self.theta3 = value,
            "theta4" => self.theta4 = value,
            "theta" => self.theta2 = self.theta1 + value,
            "theta_prime" => self.theta4 = self.theta3 + value,
            "phi_a0" => self.phi_a0 = value,
            "phi_b0" => self.phi_b0 = value,
            "tau_a" => self.tau_a = value,
            "tau_b" => self.tau_b = value,
            _ => return Err(Error::UnknownParameter { name: name.to_string(), model: "nabla" }),
        }
        Ok(())
    }
}

/// Δ-type atom: W_a drives |g₁⟩↔|e⟩, W_b drives |g₂⟩↔|e⟩, and a classical
/// field ε e^{iβ} couples the two ground states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaParams {
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
    /// Energy of |g₂⟩ above |g₁⟩.
    pub omega_g2: f64,
}

impl Default for DeltaParams {
    fn default() -> Self {
        Self {
            gamma1_wg: 1.0,
            gamma2_wg: 1.0,
            gamma_g2: 0.0,
            gamma_e: 0.0,
            drive: 0.0,
            beta: 0.0,
            theta1: 0.0,
            theta2: 0.0,
            theta3: 0.0,
            theta4: 0.0,
            phi_a0: 0.0,
            phi_b0: 0.0,
            tau_a: 0.0,
            tau_b: 0.0,
            omega_g2: 0.0,
        }
    }
}

impl DeltaParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("gamma1_wg", self.gamma1_wg)?;
        check_non_negative("gamma2_wg", self.gamma2_wg)?;
        check_non_negative("gamma_g2", self.gamma_g2)?;
        check_non_negative("gamma_e", self.gamma_e)?;
        check_non_negative("drive", self.drive)?;
        check_non_negative("tau_a", self.tau_a)?;
        check_non_negative("tau_b", self.tau_b)?;
        for (name, v) in [
            ("beta", self.beta),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("theta3", self.theta3),
            ("theta4", self.theta4),
            ("phi_a0", self.phi_a0),
            ("phi_b0", self.phi_b0),
            ("omega_g2", self.omega_g2),
        ] {
            check_finite(name, v)?;
        }
        Ok(())
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "gamma1_wg" => self.gamma1_wg = value,
            "gamma2_wg" => self.gamma2_wg = value,
            "gamma_g2" => self.gamma_g2 = value,
            "gamma_e" => self.gamma_e = value,
            "drive" => self.drive = value,
            "beta" => self.beta = value,
            "theta1" => self.theta1 = value,
            "theta2" => self.theta2 = value,
            "theta3" => self.theta3 = value,
            "theta4" => self.theta4 = value,
            "theta" => self.theta2 = self.theta1 + value,
            "theta_prime" => self.theta4 = self.theta3 + value,
            "phi_a0" => self.phi_a0 = value,
            "phi_b0" => self.phi_b0 = value,
            "tau_a" => self.tau_a = value,
            "tau_b" => self.tau_b = value,
            "omega_g2" => self.omega_g2 = value,
            _ => return Err(Error::UnknownParameter { name: name.to_string(), model: "delta" }),
        }
        Ok(())
    }
}

/// An atomic level. `energy` is complex: real part is the detuning from the
/// reference transition, imaginary part is `−γ/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub name: String,
    pub energy: Complex,
}

/// A scattering channel: photons in `waveguide` while the atom sits in the
/// `companion` level. The photon detuning that enters the propagation phase
/// is `Δ − reference_energy`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub waveguide: String,
    pub companion: usize,
    pub reference_energy: Complex,
}

/// A point where `channel` couples to the transition
/// `companion(channel) ↔ level` with coefficient `strength · e^{i phase}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingPoint {
    pub channel: usize,
    pub level: usize,
    pub strength: f64,
    pub phase: f64,
    pub phase_offset: f64,
    pub delay: f64,
}

/// Classical drive `amplitude · e^{i phase} |a⟩⟨b| + h.c.`.
#[derive(Clone, Debug, PartialEq)]
pub struct Drive {
    pub levels: (usize, usize),
    pub amplitude: f64,
    pub phase: f64,
}

/// Which end of a channel a port sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Left,
    Right,
}

/// A 1-based port number. Channel `c` owns ports `2c + 1` (left end) and
/// `2c + 2` (right end), so W_a has ports 1, 2 and W_b has ports 3, 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port(pub usize);

impl Port {
    pub fn from_end(channel: usize, end: End) -> Self {
        match end {
            End::Left => Port(2 * channel + 1),
            End::Right => Port(2 * channel + 2),
        }
    }

    pub fn number(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn channel(self) -> usize {
        (self.0 - 1) / 2
    }

    pub fn end(self) -> End {
        if self.0 % 2 == 1 {
            End::Left
        } else {
            End::Right
        }
    }

    pub fn check(self, n_ports: usize) -> Result<Self> {
        if self.0 >= 1 && self.0 <= n_ports {
            Ok(self)
        } else {
            Err(Error::PortOutOfRange { port: self.0, n_ports })
        }
    }
}

impl std::fmt::Display for Port {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Single-excitation scattering problem: levels, channels, coupling points
/// and classical drives.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterModel {
    pub levels: Vec<Level>,
    pub channels: Vec<Channel>,
    pub couplings: Vec<CouplingPoint>,
    pub drives: Vec<Drive>,
}

impl ScatterModel {
    pub fn n_ports(&self) -> usize {
        2 * self.channels.len()
    }

    pub fn is_companion(&self, level: usize) -> bool {
        self.channels.iter().any(|c| c.companion == level)
    }

    /// Coupling points on `channel`, in model order.
    pub fn couplings_on(&self, channel: usize) -> impl Iterator<Item = &CouplingPoint> + '_ {
        self.couplings.iter().filter(move |c| c.channel == channel)
    }

    /// Transition `(lower, upper)` addressed by a coupling point.
    pub fn transition(&self, coupling: &CouplingPoint) -> (usize, usize) {
        (self.channels[coupling.channel].companion, coupling.level)
    }

    /// True when no level has a dissipative (imaginary) energy component.
    pub fn is_lossless(&self) -> bool {
        self.levels.iter().all(|l| l.energy.im == 0.0) && self.channels.iter().all(|c| c.reference_energy.im == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let n_levels = self.levels.len();
        if self.channels.is_empty() {
            return Err(Error::Model("model has no channels".into()));
        }
        for l in &self.levels {
            if !(l.energy.re.is_finite() && l.energy.im.is_finite()) || l.energy.im > 0.0 {
                return Err(Error::Model(format!("level `{}` has invalid energy {}", l.name, l.energy)));
            }
        }
        for (i, c) in self.channels.iter().enumerate() {
            if c.companion >= n_levels {
                return Err(Error::Model(format!("channel {i} references missing level {}", c.companion)));
            }
            if !(c.reference_energy.re.is_finite() && c.reference_energy.im.is_finite()) {
                return Err(Error::Model(format!("channel {i} has a non-finite reference energy")));
            }
        }
        for (i, cp) in self.couplings.iter().enumerate() {
            if cp.channel >= self.channels.len() {
                return Err(Error::Model(format!("coupling {i} references missing channel {}", cp.channel)));
            }
            if cp.level >= n_levels {
                return Err(Error::Model(format!("coupling {i} references missing level {}", cp.level)));
            }
            let (lower, upper) = self.transition(cp);
            if lower == upper {
                return Err(Error::Model(format!("coupling {i} connects level {lower} to itself")));
            }
            if self.is_companion(upper) {
                return Err(Error::Model(format!(
                    "coupling {i} targets level `{}`, which is itself a channel companion",
                    self.levels[upper].name
                )));
            }
            for (name, v) in
                [("strength", cp.strength), ("phase", cp.phase), ("phase_offset", cp.phase_offset), ("delay", cp.delay)]
            {
                if !v.is_finite() {
                    return Err(Error::Model(format!("coupling {i} has non-finite {name}")));
                }
            }
            if cp.strength < 0.0 || cp.delay < 0.0 {
                return Err(Error::Model(format!("coupling {i} has negative strength or delay")));
            }
        }
        for ch in 0..self.channels.len() {
            let pts: Vec<_> = self.couplings_on(ch).collect();
            if let Some(first) = pts.first() {
                if first.phase_offset != 0.0 || first.delay != 0.0 {
                    return Err(Error::Model(format!(
                        "first coupling point of channel {ch} must sit at the phase origin"
                    )));
                }
            }
            for w in pts.windows(2) {
                if w[1].phase_offset < w[0].phase_offset || w[1].delay < w[0].delay {
                    return Err(Error::Model(format!("coupling points of channel {ch} are not ordered by position")));
                }
            }
        }
        for (i, d) in self.drives.iter().enumerate() {
            let (a, b) = d.levels;
            if a >= n_levels || b >= n_levels || a == b {
                return Err(Error::Model(format!("drive {i} has invalid levels ({a}, {b})")));
            }
            if !(d.amplitude.is_finite() && d.phase.is_finite()) {
                return Err(Error::Model(format!("drive {i} is not finite")));
            }
            if self.is_companion(a) != self.is_companion(b) {
                return Err(Error::UnsupportedConfiguration(format!(
                    "drive {i} connects a channel companion level with an excited level"
                )));
            }
        }
        Ok(())
    }
}

fn level(name: &str, detuning: f64, gamma: f64) -> Level {
    Level { name: name.to_string(), energy: Complex::new(detuning, -gamma / 2.0) }
}

fn point(channel: usize, level: usize, rate: f64, phase: f64, phase_offset: f64, delay: f64) -> CouplingPoint {
    CouplingPoint { channel, level, strength: rate.sqrt(), phase, phase_offset, delay }
}

/// Two levels, one waveguide, two coupling points.
pub fn two_level_to_model(p: &TwoLevelParams) -> Result<ScatterModel> {
    p.validate()?;
    Ok(ScatterModel {
        levels: vec![level("g", 0.0, 0.0), level("e", 0.0, p.gamma_ext)],
        channels: vec![Channel { waveguide: "W".into(), companion: 0, reference_energy: Complex::new(0.0, 0.0) }],
        couplings: vec![point(0, 1, p.gamma_wg, p.theta1, 0.0, 0.0), point(0, 1, p.gamma_wg, p.theta2, p.phi0, p.tau)],
        drives: vec![],
    })
}

/// ∇-type atom in the frame co-rotating with a resonant drive, so |e₂⟩ sits
/// at the same detuning as |e₁⟩ and both channels share the Δ′ axis. W_b
/// collapses to one coupling point of rate Γ₂ when
/// [`NablaParams::wb_single_point`] holds.
pub fn nabla_to_model(p: &NablaParams) -> Result<ScatterModel> {
    p.validate()?;
    let mut couplings = vec![
        point(0, 1, p.gamma1_wg, p.theta1, 0.0, 0.0),
        point(0, 1, p.gamma1_wg, p.theta2, p.phi_a0, p.tau_a),
        point(1, 2, p.gamma2_wg, p.theta3, 0.0, 0.0),
    ];
    if !p.wb_single_point() {
        couplings.push(point(1, 2, p.gamma2_wg, p.theta4, p.phi_b0, p.tau_b));
    }
    let zero = Complex::new(0.0, 0.0);
    Ok(ScatterModel {
        levels: vec![level("g", 0.0, 0.0), level("e1", 0.0, p.gamma_e1), level("e2", 0.0, p.gamma_e2)],
        channels: vec![
            Channel { waveguide: "W_a".into(), companion: 0, reference_energy: zero },
            Channel { waveguide: "W_b".into(), companion: 0, reference_energy: zero },
        ],
        couplings,
        drives: vec![Drive { levels: (1, 2), amplitude: p.rabi, phase: p.alpha }],
    })
}

/// Δ-type atom: W_a photons accompany |g₁⟩, W_b photons accompany |g₂⟩, so
/// the W_b propagation phase uses `Δ − (ω_{g₂} − iγ_{g₂}/2)`.
pub fn delta_to_model(p: &DeltaParams) -> Result<ScatterModel> {
    p.validate()?;
    let g2 = level("g2", p.omega_g2, p.gamma_g2);
    let g2_energy = g2.energy;
    Ok(ScatterModel {
        levels: vec![level("g1", 0.0, 0.0), g2, level("e", 0.0, p.gamma_e)],
        channels: vec![
            Channel { waveguide: "W_a".into(), companion: 0, reference_energy: Complex::new(0.0, 0.0) },
            Channel { waveguide: "W_b".into(), companion: 1, reference_energy: g2_energy },
        ],
        couplings: vec![
            point(0, 2, p.gamma1_wg, p.theta1, 0.0, 0.0),
            point(0, 2, p.gamma1_wg, p.theta2, p.phi_a0, p.tau_a),
            point(1, 2, p.gamma2_wg, p.theta3, 0.0, 0.0),
            point(1, 2, p.gamma2_wg, p.theta4, p.phi_b0, p.tau_b),
        ],
        drives: vec![Drive { levels: (0, 1), amplitude: p.drive, phase: p.beta }],
    })
}
