//! Device figures of merit computed from an [`SMatrix`].

use std::fmt;

use crate::closed_form::contrast_ratio;
use crate::error::{Error, Result};
use crate::model::Port;
use crate::solver::SMatrix;

/// Named scalar results at one detuning. `None` marks an undefined value.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceReport {
    pub config_label: String,
    pub at_detuning: f64,
    pub values: Vec<(String, Option<f64>)>,
}

impl DeviceReport {
    pub fn new(config_label: impl Into<String>, at_detuning: f64) -> Self {
        Self { config_label: config_label.into(), at_detuning, values: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, value: Option<f64>) {
        self.values.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).and_then(|(_, v)| *v)
    }
}

impl fmt::Display for DeviceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config={}", self.config_label)?;
        writeln!(f, "delta={}", self.at_detuning)?;
        for (name, value) in &self.values {
            match value {
                Some(v) => writeln!(f, "{name}={v:.6}")?,
                None => writeln!(f, "{name}=undefined")?,
            }
        }
        Ok(())
    }
}

fn check(s: &SMatrix, port: Port) -> Result<Port> {
    port.check(s.n_ports)
}

/// Fraction of the flux entering at `incidence` that leaves through no port.
pub fn conservation_deficit(s: &SMatrix, incidence: Port) -> Result<f64> {
    Ok(1.0 - s.row_sum(check(s, incidence)?))
}

/// `(S_{j→i} − S_{i→j})/(S_{j→i} + S_{i→j})`.
pub fn port_contrast(s: &SMatrix, i: Port, j: Port) -> Result<f64> {
    let (i, j) = (check(s, i)?, check(s, j)?);
    contrast_ratio(s.get(j, i), s.get(i, j))
}

pub fn router_efficiency(s: &SMatrix, source: Port, target: Port) -> Result<f64> {
    Ok(s.get(check(s, source)?, check(s, target)?))
}

fn check_cycle(s: &SMatrix, cycle: &[Port]) -> Result<()> {
    let mut seen = vec![false; s.n_ports];
    for &p in cycle {
        let k = check(s, p)?.index();
        if seen[k] {
            return Err(Error::Parameter(format!("port {p} appears twice in the cycle")));
        }
        seen[k] = true;
    }
    if cycle.len() != s.n_ports {
        return Err(Error::Parameter(format!("cycle must visit all {} ports, got {}", s.n_ports, cycle.len())));
    }
    Ok(())
}

fn cycle_edges(cycle: &[Port]) -> impl Iterator<Item = (Port, Port)> + '_ {
    cycle.iter().enumerate().map(move |(k, &p)| (p, cycle[(k + 1) % cycle.len()]))
}

/// Mean probability along the directed edges of `cycle`, closing edge included.
pub fn circulator_fidelity(s: &SMatrix, cycle: &[Port]) -> Result<f64> {
    check_cycle(s, cycle)?;
    Ok(cycle_edges(cycle).map(|(a, b)| s.get(a, b)).sum::<f64>() / cycle.len() as f64)
}

/// Mean probability, per incidence port, of leaving through any port other
/// than the next one on `cycle`.
pub fn off_cycle_leakage(s: &SMatrix, cycle: &[Port]) -> Result<f64> {
    check_cycle(s, cycle)?;
    Ok(cycle_edges(cycle).map(|(a, b)| s.row_sum(a) - s.get(a, b)).sum::<f64>() / cycle.len() as f64)
}

/// Parses a cycle such as `1,3,4,2` or `1-3-4-2`.
pub fn parse_cycle(text: &str) -> Result<Vec<Port>> {
    text.split([',', '-', '>'])
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map(Port).map_err(|_| Error::Parameter(format!("bad port `{t}` in cycle"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{nabla_to_model, two_level_to_model, NablaParams, TwoLevelParams};
    use crate::solver::s_matrix;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn ports(v: &[usize]) -> Vec<Port> {
        v.iter().map(|&p| Port(p)).collect()
    }

    fn fig8(rabi: f64, theta_prime: f64) -> NablaParams {
        NablaParams {
            rabi,
            theta2: FRAC_PI_2,
            theta4: theta_prime,
            phi_a0: FRAC_PI_2,
            phi_b0: FRAC_PI_2,
            ..Default::default()
        }
    }

    fn smat(p: &NablaParams, delta: f64) -> SMatrix {
        s_matrix(&nabla_to_model(p).unwrap(), delta).unwrap()
    }

    #[test]
    fn deficits_for_blocking_configuration() {
        let p = TwoLevelParams { theta2: FRAC_PI_2, phi0: FRAC_PI_2, gamma_ext: 4.0, ..Default::default() };
        let s = s_matrix(&two_level_to_model(&p).unwrap(), 0.0).unwrap();
        assert!((conservation_deficit(&s, Port(1)).unwrap() - 1.0).abs() < 1e-9);
        assert!(conservation_deficit(&s, Port(2)).unwrap().abs() < 1e-9);
        assert!(conservation_deficit(&s, Port(3)).is_err());
    }

    #[test]
    fn reciprocal_two_level_contrast() {
        let p = TwoLevelParams { theta2: 1.1, phi0: 0.4, tau: 0.3, ..Default::default() };
        let m = two_level_to_model(&p).unwrap();
        for delta in [-5.0, -0.2, 0.0, 3.3] {
            let s = s_matrix(&m, delta).unwrap();
            assert!(port_contrast(&s, Port(1), Port(2)).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn fig6_transfer_contrast() {
        let p = NablaParams { rabi: 5.0, theta2: FRAC_PI_2, phi_a0: FRAC_PI_2, ..Default::default() };
        let m = nabla_to_model(&p).unwrap();
        let (mut best, mut at) = (0.0, 0.0);
        for k in 0..=2000 {
            let delta = -10.0 + 0.01 * k as f64;
            let s = s_matrix(&m, delta).unwrap();
            if s.get(Port(1), Port(4)) > best {
                best = s.get(Port(1), Port(4));
                at = delta;
            }
        }
        let s = s_matrix(&m, at).unwrap();
        // S₁→₄ dominates S₄→₁, so the (4, 1) ordering gives +1.
        assert!((port_contrast(&s, Port(4), Port(1)).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn routers() {
        assert!((router_efficiency(&smat(&fig8(2.0, FRAC_PI_2), 0.0), Port(1), Port(4)).unwrap() - 1.0).abs() < 1e-6);
        assert!(
            (router_efficiency(&smat(&fig8(2.0, 3.0 * FRAC_PI_2), 0.0), Port(1), Port(3)).unwrap() - 1.0).abs() < 1e-6
        );
        for delta in [-10.0, -2.0, 0.0, 4.0, 10.0] {
            let s = smat(&fig8(0.0, FRAC_PI_2), delta);
            assert!((router_efficiency(&s, Port(1), Port(2)).unwrap() - 1.0).abs() < 1e-6);
            assert_eq!(router_efficiency(&s, Port(1), Port(4)).unwrap(), 0.0);
        }
    }

    #[test]
    fn circulator() {
        let s = smat(&fig8(2.0, 3.0 * FRAC_PI_2), 0.0);
        assert!((circulator_fidelity(&s, &ports(&[1, 3, 4, 2])).unwrap() - 1.0).abs() < 1e-6);
        assert!(circulator_fidelity(&s, &ports(&[1, 2, 4, 3])).unwrap() < 0.05);
        let off = smat(&fig8(0.0, 3.0 * FRAC_PI_2), 0.0);
        assert!(circulator_fidelity(&off, &ports(&[1, 3, 4, 2])).unwrap() <= 0.5);
    }

    #[test]
    fn malformed_cycles() {
        let s = smat(&fig8(2.0, 3.0 * FRAC_PI_2), 0.0);
        assert!(circulator_fidelity(&s, &ports(&[1, 3, 4])).is_err());
        assert!(circulator_fidelity(&s, &ports(&[1, 3, 3, 2])).is_err());
        assert!(circulator_fidelity(&s, &ports(&[1, 3, 5, 2])).is_err());
        assert_eq!(parse_cycle("1-3-4-2").unwrap(), ports(&[1, 3, 4, 2]));
        assert_eq!(parse_cycle("1,3,4,2").unwrap(), ports(&[1, 3, 4, 2]));
        assert!(parse_cycle("1,x").is_err());
    }

    #[test]
    fn report_format() {
        let mut r = DeviceReport::new("circulator", 0.0);
        r.push("fidelity", Some(1.0));
        r.push("contrast_1_4", None);
        assert_eq!(r.to_string(), "config=circulator\ndelta=0\nfidelity=1.000000\ncontrast_1_4=undefined\n");
        assert_eq!(r.get("fidelity"), Some(1.0));
    }

    proptest! {
        #[test]
        fn contrast_is_antisymmetric(
            th in prop::array::uniform4(0.0..TAU), rabi in 0.0..6.0, ge in 0.0..2.0, delta in -8.0..8.0f64,
            i in 1usize..=4, j in 1usize..=4,
        ) {
            let p = NablaParams {
                rabi, gamma_e1: ge, theta1: th[0], theta2: th[1], theta3: th[2], theta4: th[3],
                phi_a0: FRAC_PI_2, phi_b0: 1.0, ..Default::default()
            };
            let s = smat(&p, delta);
            if let (Ok(a), Ok(b)) = (port_contrast(&s, Port(i), Port(j)), port_contrast(&s, Port(j), Port(i))) {
                prop_assert_eq!(a, -b);
                prop_assert!((-1.0..=1.0).contains(&a));
            }
        }

        #[test]
        fn deficit_tracks_dissipation(
            th in prop::array::uniform4(0.0..TAU), rabi in 0.5..6.0, ge1 in 0.0..2.0, ge2 in 0.0..2.0,
            delta in -8.0..8.0f64, lossless in any::<bool>(),
        ) {
            let (ge1, ge2) = if lossless { (0.0, 0.0) } else { (ge1 + 0.05, ge2) };
            let p = NablaParams {
                rabi, gamma_e1: ge1, gamma_e2: ge2, theta1: th[0], theta2: th[1], theta3: th[2], theta4: th[3],
                phi_a0: FRAC_PI_2, phi_b0: 0.7, ..Default::default()
            };
            let s = smat(&p, delta);
            let cycle = ports(&[1, 3, 4, 2]);
            prop_assert!(circulator_fidelity(&s, &cycle).unwrap() + off_cycle_leakage(&s, &cycle).unwrap() <= 1.0 + 1e-9);
            let worst = (1..=4).map(|k| conservation_deficit(&s, Port(k)).unwrap()).fold(f64::MIN, f64::max);
            let least = (1..=4).map(|k| conservation_deficit(&s, Port(k)).unwrap()).fold(f64::MAX, f64::min);
            prop_assert!(least >= -1e-9);
            if lossless {
                prop_assert!(worst.abs() < 1e-9);
            } else {
                prop_assert!(worst > 1e-9);
            }
        }
    }
}
