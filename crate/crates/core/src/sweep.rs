//! Grid sweeps over detuning and model parameters, and the figure presets.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    contrast_ratio, effective_lamb_and_width, nabla_amplitudes, perfect_reflection_residual, two_level_amplitudes,
    NablaAmplitudes, TwoLevelAmplitudes,
};
use crate::error::{Error, Result};
use crate::model::{
    delta_to_model, nabla_to_model, two_level_to_model, DeltaParams, NablaParams, Port, ScatterModel, TwoLevelParams,
};
use crate::solver::{s_matrix, solve_scattering, SMatrix};

/// Name of the axis that scans the detuning instead of a model parameter.
pub const DELTA_AXIS: &str = "delta";

pub const DEFAULT_POINTS: usize = 1001;
pub const MAP_POINTS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    TwoLevel,
    Nabla,
    Delta,
}

impl ModelKind {
    pub fn n_ports(self) -> usize {
        match self {
            ModelKind::TwoLevel => 2,
            _ => 4,
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-level" | "two_level" => Ok(ModelKind::TwoLevel),
            "nabla" => Ok(ModelKind::Nabla),
            "delta" => Ok(ModelKind::Delta),
            _ => Err(Error::Parameter(format!("unknown model kind `{s}` (expected two-level, nabla or delta)"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::TwoLevel => "two-level",
            ModelKind::Nabla => "nabla",
            ModelKind::Delta => "delta",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseParams {
    TwoLevel(TwoLevelParams),
    Nabla(NablaParams),
    Delta(DeltaParams),
}

impl BaseParams {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::TwoLevel => BaseParams::TwoLevel(TwoLevelParams::default()),
            ModelKind::Nabla => BaseParams::Nabla(NablaParams::default()),
            ModelKind::Delta => BaseParams::Delta(DeltaParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            BaseParams::TwoLevel(_) => ModelKind::TwoLevel,
            BaseParams::Nabla(_) => ModelKind::Nabla,
            BaseParams::Delta(_) => ModelKind::Delta,
        }
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self {
            BaseParams::TwoLevel(p) => p.set(name, value),
            BaseParams::Nabla(p) => p.set(name, value),
            BaseParams::Delta(p) => p.set(name, value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BaseParams::TwoLevel(p) => p.validate(),
            BaseParams::Nabla(p) => p.validate(),
            BaseParams::Delta(p) => p.validate(),
        }
    }

    pub fn to_model(&self) -> Result<ScatterModel> {
        match self {
            BaseParams::TwoLevel(p) => two_level_to_model(p),
            BaseParams::Nabla(p) => nabla_to_model(p),
            BaseParams::Delta(p) => delta_to_model(p),
        }
    }

    /// True when every dissipation rate is zero.
    pub fn is_lossless(&self) -> bool {
        match self {
            BaseParams::TwoLevel(p) => p.gamma_ext == 0.0,
            BaseParams::Nabla(p) => p.gamma_e1 == 0.0 && p.gamma_e2 == 0.0,
            BaseParams::Delta(p) => p.gamma_e == 0.0 && p.gamma_g2 == 0.0,
        }
    }
}

/// Axis values: either an inclusive uniform range or an explicit list.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Range { min: f64, max: f64, points: usize },
    Values { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub param: String,
    pub grid: Grid,
}

impl Axis {
    pub fn range(param: &str, min: f64, max: f64, points: usize) -> Self {
        Self { param: param.to_string(), grid: Grid::Range { min, max, points } }
    }

    pub fn values(param: &str, values: Vec<f64>) -> Self {
        Self { param: param.to_string(), grid: Grid::Values { values } }
    }

    /// Parses `min:max:points`.
    pub fn parse_range(param: &str, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Grid(format!("expected min:max:points, got `{text}`")));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Grid(format!("bad number `{s}` in `{text}`")));
        let points =
            parts[2].trim().parse::<usize>().map_err(|_| Error::Grid(format!("bad point count in `{text}`")))?;
        Ok(Self::range(param, num(parts[0])?, num(parts[1])?, points))
    }

    pub fn len(&self) -> usize {
        match &self.grid {
            Grid::Range { points, .. } => *points,
            Grid::Values { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match &self.grid {
            Grid::Range { min, max, points } => {
                if !(min.is_finite() && max.is_finite()) {
                    return Err(Error::Grid(format!("axis `{}` has non-finite bounds", self.param)));
                }
                if *points == 1 && min == max {
                    return Ok(());
                }
                if *points < 2 {
                    return Err(Error::Grid(format!("axis `{}` needs at least 2 points", self.param)));
                }
                if min >= max {
                    return Err(Error::Grid(format!("axis `{}` needs min < max", self.param)));
                }
                Ok(())
            }
            Grid::Values { values } => {
                if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Grid(format!("axis `{}` needs a non-empty list of finite values", self.param)));
                }
                Ok(())
            }
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match &self.grid {
            Grid::Range { min, max, points } => {
                if *points == 1 {
                    return vec![*min];
                }
                let step = (max - min) / (*points - 1) as f64;
                (0..*points).map(|k| if k + 1 == *points { *max } else { min + step * k as f64 }).collect()
            }
            Grid::Values { values } => values.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    Auto,
    ClosedForm,
    Solver,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "closed-form" | "closed_form" => Ok(Engine::ClosedForm),
            "solver" => Ok(Engine::Solver),
            _ => Err(Error::Parameter(format!("unknown engine `{s}` (expected auto, closed-form or solver)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// Port-to-port probability.
    S(Port, Port),
    I,
    D,
    C,
    Deficit(Port),
    EffectiveDetuning,
    EffectiveWidth,
    ReflectionResidual,
}

impl Observable {
    pub fn parse(name: &str, kind: ModelKind) -> Result<Self> {
        let unknown = || Error::UnknownObservable(name.to_string());
        let port = |s: &str| -> Result<Port> {
            let p: usize = s.parse().map_err(|_| unknown())?;
            Port(p).check(kind.n_ports()).map_err(|_| unknown())
        };
        let two_level = kind == ModelKind::TwoLevel;
        let obs = match name {
            "T_1to2" => Observable::S(Port(1), Port(2)),
            "T_2to1" => Observable::S(Port(2), Port(1)),
            "R" => Observable::S(Port(1), Port(1)),
            "R_rev" => Observable::S(Port(2), Port(2)),
            "I" if two_level => Observable::I,
            "D" if two_level => Observable::D,
            "C" if !two_level => Observable::C,
            "conservation_deficit" => Observable::Deficit(Port(1)),
            "effective_detuning" if two_level => Observable::EffectiveDetuning,
            "effective_width" if two_level => Observable::EffectiveWidth,
            "reflection_residual" if two_level => Observable::ReflectionResidual,
            _ => {
                if let Some(rest) = name.strip_prefix("deficit_") {
                    Observable::Deficit(port(rest)?)
                } else if let Some(rest) = name.strip_prefix("S_") {
                    let (a, b) = rest.split_once("to").ok_or_else(unknown)?;
                    Observable::S(port(a)?, port(b)?)
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(obs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub model_kind: ModelKind,
    pub base_params: BaseParams,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub observables: Vec<String>,
    /// Detuning used when no axis scans it.
    pub delta: f64,
    pub engine: Engine,
}

impl SweepSpec {
    pub fn new(base_params: BaseParams, axis1: Axis, observables: &[&str]) -> Self {
        Self {
            model_kind: base_params.kind(),
            base_params,
            axis1,
            axis2: None,
            observables: observables.iter().map(|s| s.to_string()).collect(),
            delta: 0.0,
            engine: Engine::Auto,
        }
    }

    pub fn with_axis2(mut self, axis: Axis) -> Self {
        self.axis2 = Some(axis);
        self
    }

    pub fn axes(&self) -> Vec<&Axis> {
        std::iter::once(&self.axis1).chain(self.axis2.as_ref()).collect()
    }

    pub fn validate(&self) -> Result<Vec<Observable>> {
        if self.base_params.kind() != self.model_kind {
            return Err(Error::Parameter(format!(
                "parameters are for {} but model kind is {}",
                self.base_params.kind(),
                self.model_kind
            )));
        }
        self.base_params.validate()?;
        if !self.delta.is_finite() {
            return Err(Error::Parameter("detuning must be finite".into()));
        }
        let axes = self.axes();
        for axis in &axes {
            axis.validate()?;
            if axis.param != DELTA_AXIS {
                let mut probe = self.base_params;
                probe.set(&axis.param, 0.0)?;
            }
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(Error::Grid(format!("both axes scan `{}`", axes[0].param)));
        }
        if self.observables.is_empty() {
            return Err(Error::Parameter("no observables requested".into()));
        }
        self.observables.iter().map(|o| Observable::parse(o, self.model_kind)).collect()
    }

    /// Every grid point as `(axis values, parameters, detuning)`, in row order.
    pub fn grid(&self) -> Result<Vec<(Vec<f64>, BaseParams, f64)>> {
        let axes = self.axes();
        let values: Vec<Vec<f64>> = axes.iter().map(|a| a.points()).collect();
        let mut out = Vec::with_capacity(values.iter().map(Vec::len).product());
        let inner: Vec<f64> = values.get(1).cloned().unwrap_or_else(|| vec![f64::NAN]);
        for &v1 in &values[0] {
            for &v2 in &inner {
                let coords: Vec<f64> = if axes.len() == 2 { vec![v1, v2] } else { vec![v1] };
                let mut params = self.base_params;
                let mut delta = self.delta;
                for (axis, &v) in axes.iter().zip(&coords) {
                    if axis.param == DELTA_AXIS {
                        delta = v;
                    } else {
                        params.set(&axis.param, v)?;
                    }
                }
                params.validate()?;
                out.push((coords, params, delta));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros dropped.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        trim(&format!("{:.*}", (11 - exp) as usize, v))
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(format_number).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Lazily evaluated amplitudes at one grid point.
struct Point {
    params: BaseParams,
    delta: f64,
    engine: Engine,
    two_level: Option<TwoLevelAmplitudes>,
    nabla: Option<Option<NablaAmplitudes>>,
    smatrix: Option<SMatrix>,
}

impl Point {
    fn new(params: BaseParams, delta: f64, engine: Engine) -> Self {
        Self { params, delta, engine, two_level: None, nabla: None, smatrix: None }
    }

    fn two_level(&mut self, p: &TwoLevelParams) -> Result<TwoLevelAmplitudes> {
        if self.two_level.is_none() {
            self.two_level = Some(two_level_amplitudes(p, self.delta)?);
        }
        Ok(self.two_level.unwrap())
    }

    fn nabla(&mut self, p: &NablaParams) -> Result<Option<NablaAmplitudes>> {
        if self.nabla.is_none() {
            self.nabla = Some(if p.wb_single_point() { Some(nabla_amplitudes(p, self.delta)?) } else { None });
        }
        Ok(self.nabla.unwrap())
    }

    fn smatrix(&mut self) -> Result<&SMatrix> {
        if self.smatrix.is_none() {
            self.smatrix = Some(s_matrix(&self.params.to_model()?, self.delta)?);
        }
        Ok(self.smatrix.as_ref().unwrap())
    }

    fn closed_form(&mut self, obs: Observable) -> Result<Option<f64>> {
        let unavailable =
            || Error::UnsupportedConfiguration(format!("no closed form for {obs:?} in this configuration"));
        match self.params {
            BaseParams::TwoLevel(p) => {
                let a = self.two_level(&p)?;
                Ok(Some(match obs {
                    Observable::S(i, j) => match (i.number(), j.number()) {
                        (1, 1) => a.reflection(),
                        (1, 2) => a.transmission(),
                        (2, 1) => a.transmission_rev(),
                        _ => a.reflection_rev(),
                    },
                    Observable::Deficit(port) => {
                        if port.number() == 1 {
                            1.0 - a.transmission() - a.reflection()
                        } else {
                            1.0 - a.transmission_rev() - a.reflection_rev()
                        }
                    }
                    Observable::I => return contrast_ratio(a.transmission_rev(), a.transmission()).map(Some),
                    Observable::D => return crate::closed_form::contrast_d(&p, self.delta).map(Some),
                    Observable::EffectiveDetuning => effective_lamb_and_width(&p, self.delta).0,
                    Observable::EffectiveWidth => effective_lamb_and_width(&p, self.delta).1,
                    Observable::ReflectionResidual => perfect_reflection_residual(&p, self.delta),
                    Observable::C => return Err(unavailable()),
                }))
            }
            BaseParams::Nabla(p) => {
                let a = self.nabla(&p)?.ok_or_else(unavailable)?;
                let amp = match obs {
                    Observable::S(i, j) => match (i.number(), j.number()) {
                        (1, 2) => a.s12,
                        (2, 1) => a.s21,
                        (1, 3) => a.s13,
                        (1, 4) => a.s14,
                        (2, 3) => a.s23,
                        (2, 4) => a.s24,
                        (4, 1) => a.s41,
                        _ => return Err(unavailable()),
                    },
                    Observable::C => return contrast_ratio(a.s14.norm_sqr(), a.s23.norm_sqr()).map(Some),
                    _ => return Err(unavailable()),
                };
                Ok(Some(amp.norm_sqr()))
            }
            BaseParams::Delta(_) => Err(unavailable()),
        }
    }

    fn solved(&mut self, obs: Observable) -> Result<Option<f64>> {
        match obs {
            Observable::S(i, j) => Ok(Some(self.smatrix()?.get(i, j))),
            Observable::Deficit(port) => Ok(Some(1.0 - self.smatrix()?.row_sum(port))),
            Observable::I => {
                let s = self.smatrix()?;
                contrast_ratio(s.get(Port(2), Port(1)), s.get(Port(1), Port(2))).map(Some)
            }
            Observable::C => {
                let s = self.smatrix()?;
                contrast_ratio(s.get(Port(1), Port(4)), s.get(Port(2), Port(3))).map(Some)
            }
            Observable::D => {
                let model = self.params.to_model()?;
                let excited = 1;
                let fwd = solve_scattering(&model, self.delta, Port(1))?.atomic_amplitude(excited).norm_sqr();
                let rev = solve_scattering(&model, self.delta, Port(2))?.atomic_amplitude(excited).norm_sqr();
                contrast_ratio(rev, fwd).map(Some)
            }
            Observable::EffectiveDetuning | Observable::EffectiveWidth | Observable::ReflectionResidual => {
                self.closed_form(obs)
            }
        }
    }

    fn eval(&mut self, obs: Observable) -> Result<Option<f64>> {
        let value = match self.engine {
            Engine::ClosedForm => self.closed_form(obs),
            Engine::Solver => self.solved(obs),
            Engine::Auto => match self.closed_form(obs) {
                Err(Error::UnsupportedConfiguration(_)) => self.solved(obs),
                other => other,
            },
        };
        match value {
            Err(Error::UndefinedContrast) | Err(Error::SingularSystem { .. }) => Ok(None),
            other => other,
        }
    }
}

/// Evaluates one observable at one parameter point.
pub fn evaluate(params: &BaseParams, delta: f64, obs: Observable, engine: Engine) -> Result<Option<f64>> {
    Point::new(*params, delta, engine).eval(obs)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let observables = spec.validate()?;
    let grid = spec.grid()?;
    let rows = grid
        .par_iter()
        .map(|(coords, params, delta)| {
            let mut point = Point::new(*params, *delta, spec.engine);
            let mut row: Vec<Option<f64>> = coords.iter().map(|&v| Some(v)).collect();
            for &obs in &observables {
                row.push(point.eval(obs)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<String> = spec.axes().iter().map(|a| a.param.clone()).collect();
    columns.extend(spec.observables.iter().cloned());
    Ok(SweepTable { columns, rows })
}

pub const PRESET_IDS: &[&str] = &[
    "fig2a",
    "fig2b",
    "fig2c",
    "fig2d",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig3d",
    "fig3e",
    "fig4",
    "fig4inset",
    "fig6a",
    "fig6b",
    "fig6c",
    "fig6d",
    "fig7a",
    "fig7b",
    "fig7c",
    "fig8a",
    "fig8b",
    "fig8c",
    "fig8d",
    "fig9",
];

fn delta_axis(points: usize) -> Axis {
    Axis::range(DELTA_AXIS, -10.0, 10.0, points)
}

fn theta_axis(points: usize) -> Axis {
    Axis::range("theta", 0.0, TAU, points)
}

fn two_level(theta: f64, phi0: f64, tau: f64, gamma_ext: f64) -> BaseParams {
    BaseParams::TwoLevel(TwoLevelParams { theta2: theta, phi0, tau, gamma_ext, ..Default::default() })
}

fn nabla_fig6(theta: f64) -> BaseParams {
    BaseParams::Nabla(NablaParams { rabi: 5.0, theta2: theta, phi_a0: FRAC_PI_2, ..Default::default() })
}

/// Router and circulator panels: both waveguides couple at two points.
pub fn nabla_fig8(rabi: f64, theta: f64, theta_prime: f64) -> NablaParams {
    NablaParams { rabi, theta2: theta, theta4: theta_prime, phi_a0: FRAC_PI_2, phi_b0: FRAC_PI_2, ..Default::default() }
}

pub fn delta_fig9(beta: f64) -> DeltaParams {
    DeltaParams { drive: 30.0, beta, phi_a0: FRAC_PI_2, phi_b0: FRAC_PI_2, ..Default::default() }
}

fn row_from_port1() -> Vec<&'static str> {
    vec!["S_1to1", "S_1to2", "S_1to3", "S_1to4"]
}

pub fn figure_preset(id: &str) -> Result<SweepSpec> {
    let t = 0.01;
    let map = |gamma: f64, obs: &str| {
        SweepSpec::new(two_level(0.0, FRAC_PI_2, t, gamma), delta_axis(MAP_POINTS), &[obs])
            .with_axis2(theta_axis(MAP_POINTS))
    };
    let fig3 = |gamma: f64| {
        SweepSpec::new(
            two_level(0.0, FRAC_PI_2, t, gamma),
            Axis::values("theta", vec![FRAC_PI_2, PI]),
            &["T_1to2", "T_2to1"],
        )
        .with_axis2(delta_axis(DEFAULT_POINTS))
    };
    let fig6 =
        |obs: &str| SweepSpec::new(nabla_fig6(0.0), delta_axis(MAP_POINTS), &[obs]).with_axis2(theta_axis(MAP_POINTS));
    let fig7 = |theta: f64| SweepSpec::new(nabla_fig6(theta), delta_axis(DEFAULT_POINTS), &["S_1to4", "S_2to3"]);
    let fig8 = |rabi: f64, theta_prime: f64, obs: Vec<&str>| {
        SweepSpec::new(BaseParams::Nabla(nabla_fig8(rabi, FRAC_PI_2, theta_prime)), delta_axis(DEFAULT_POINTS), &obs)
    };
    let spec = match id {
        "fig2a" => map(0.0, "T_1to2"),
        "fig2b" => map(0.0, "T_2to1"),
        "fig2c" => map(10.0, "T_1to2"),
        "fig2d" => map(10.0, "T_2to1"),
        "fig3a" => fig3(0.0),
        "fig3b" => fig3(4.0),
        "fig3c" => fig3(20.0),
        "fig3d" => SweepSpec::new(two_level(0.0, FRAC_PI_2, t, 0.0), theta_axis(DEFAULT_POINTS), &["I", "D"])
            .with_axis2(Axis::values("gamma_e", vec![0.0, 4.0, 20.0])),
        "fig3e" => SweepSpec::new(two_level(0.0, 0.0, t, 0.0), theta_axis(MAP_POINTS), &["D"])
            .with_axis2(Axis::range("phi0", 0.0, TAU, MAP_POINTS)),
        "fig4" => SweepSpec::new(
            two_level(FRAC_PI_2, FRAC_PI_2, 1.0, 0.0),
            Axis::values("gamma_e", vec![0.0, 0.5, 1.0]),
            &["R"],
        )
        .with_axis2(delta_axis(DEFAULT_POINTS)),
        "fig4inset" => SweepSpec::new(two_level(FRAC_PI_2, PI, 1.0, 0.0), delta_axis(DEFAULT_POINTS), &["R"]),
        "fig6a" => fig6("S_1to2"),
        "fig6b" => fig6("S_2to1"),
        "fig6c" => fig6("S_1to4"),
        "fig6d" => fig6("S_4to1"),
        "fig7a" => SweepSpec::new(nabla_fig6(0.0), theta_axis(DEFAULT_POINTS), &["C"]),
        "fig7b" => fig7(FRAC_PI_2),
        "fig7c" => fig7(3.0 * FRAC_PI_2),
        "fig8a" => fig8(0.0, FRAC_PI_2, row_from_port1()),
        "fig8b" => fig8(2.0, FRAC_PI_2, row_from_port1()),
        "fig8c" => fig8(2.0, 3.0 * FRAC_PI_2, row_from_port1()),
        "fig8d" => {
            let all: Vec<String> = (1..=4).flat_map(|i| (1..=4).map(move |j| format!("S_{i}to{j}"))).collect();
            let refs: Vec<&str> = all.iter().map(String::as_str).collect();
            fig8(2.0, 3.0 * FRAC_PI_2, refs)
        }
        "fig9" => SweepSpec::new(
            BaseParams::Delta(delta_fig9(0.0)),
            Axis::values("beta", vec![0.0, FRAC_PI_2, PI]),
            &["S_1to4", "S_4to1"],
        )
        .with_axis2(delta_axis(DEFAULT_POINTS)),
        _ => return Err(Error::UnknownPreset(id.to_string())),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-10.0), "-10");
        assert_eq!(format_number(0.02), "0.02");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(123456.789), "123456.789");
        assert_eq!(format_number(1e-7), "1e-07");
        assert_eq!(format_number(2.5e15), "2.5e+15");
        assert_eq!(format_number(0.99999999999999), "1");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(1.5e-5), "1.5e-05");
        assert_eq!(format_number(1.5e-4), "0.00015");
    }

    #[test]
    fn grid_includes_endpoints() {
        let a = Axis::range("delta", -10.0, 10.0, 1001);
        let p = a.points();
        assert_eq!(p.len(), 1001);
        assert_eq!(p[0], -10.0);
        assert_eq!(p[500], 0.0);
        assert_eq!(p[1000], 10.0);
    }

    #[test]
    fn grid_validation() {
        assert!(Axis::range("delta", 0.0, 0.0, 1).validate().is_ok());
        assert!(Axis::range("delta", 0.0, 1.0, 1).validate().is_err());
        assert!(Axis::range("delta", 1.0, 0.0, 5).validate().is_err());
        assert!(Axis::values("theta", vec![]).validate().is_err());
        assert!(Axis::parse_range("delta", "-10:10:1001").is_ok());
        assert!(Axis::parse_range("delta", "-10:10").is_err());
    }

    #[test]
    fn fig3a_transparent_rows() {
        let spec = figure_preset("fig3a").unwrap();
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 2 * DEFAULT_POINTS);
        // τΓ = 0.01 detunes φ from π/2 by τΔ, so the plateau is flat to O(τ²Δ²).
        for row in table.rows.iter().filter(|r| r[0] == Some(FRAC_PI_2)) {
            let (t12, t21) = (row[2].unwrap(), row[3].unwrap());
            assert!((t12 - 1.0).abs() < 1e-3);
            assert!((t12 - t21).abs() < 1e-12);
            if row[1] == Some(0.0) {
                assert!((t12 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fig2_map_shape() {
        let spec = figure_preset("fig2c").unwrap();
        assert_eq!(spec.axes().len(), 2);
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), MAP_POINTS * MAP_POINTS);
        assert_eq!(table.columns, vec!["delta", "theta", "T_1to2"]);
    }

    #[test]
    fn single_point_grid() {
        let spec = SweepSpec::new(two_level(0.0, 0.0, 0.0, 0.0), Axis::range("delta", 0.0, 0.0, 1), &["R"]);
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!((table.rows[0][1].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn preset_details() {
        let s = figure_preset("fig4inset").unwrap();
        match s.base_params {
            BaseParams::TwoLevel(p) => {
                assert_eq!((p.theta(), p.phi0, p.tau, p.gamma_ext), (FRAC_PI_2, PI, 1.0, 0.0));
            }
            _ => panic!("wrong model"),
        }
        assert_eq!(s.observables, vec!["R"]);
        let s = figure_preset("fig8d").unwrap();
        assert_eq!(s.observables.len(), 16);
        match s.base_params {
            BaseParams::Nabla(p) => {
                assert_eq!(
                    (p.rabi, p.theta(), p.theta_prime(), p.phi_a0, p.phi_b0),
                    (2.0, FRAC_PI_2, 3.0 * FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)
                );
            }
            _ => panic!("wrong model"),
        }
        let s = figure_preset("fig3d").unwrap();
        assert_eq!(s.observables, vec!["I", "D"]);
        assert_eq!(s.delta, 0.0);
        assert_eq!(s.axis2.unwrap().points(), vec![0.0, 4.0, 20.0]);
        assert!(matches!(figure_preset("nope"), Err(Error::UnknownPreset(_))));
        for id in PRESET_IDS {
            figure_preset(id).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn unknown_names_fail_loudly() {
        let mut spec = figure_preset("fig4inset").unwrap();
        spec.observables.push("Q".into());
        assert!(matches!(run_sweep(&spec), Err(Error::UnknownObservable(_))));
        let mut spec = figure_preset("fig4inset").unwrap();
        spec.axis1.param = "rabi".into();
        assert!(matches!(run_sweep(&spec), Err(Error::UnknownParameter { .. })));
        assert!(Observable::parse("S_1to3", ModelKind::TwoLevel).is_err());
        assert!(Observable::parse("C", ModelKind::TwoLevel).is_err());
        assert_eq!(Observable::parse("S_4to1", ModelKind::Nabla).unwrap(), Observable::S(Port(4), Port(1)));
    }

    #[test]
    fn undefined_contrast_is_empty_cell() {
        let spec = SweepSpec::new(two_level(0.0, PI, 0.0, 0.0), Axis::range("delta", -1.0, 1.0, 3), &["D", "T_1to2"]);
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows[1][1], None);
        assert!(table.to_csv().lines().nth(2).unwrap().starts_with("0,,"));
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = figure_preset("fig7a").unwrap();
        assert_eq!(run_sweep(&spec).unwrap().to_csv(), run_sweep(&spec).unwrap().to_csv());
    }

    fn max_engine_gap(spec: &SweepSpec) -> f64 {
        let a = run_sweep(spec).unwrap();
        let b = run_sweep(&SweepSpec { engine: Engine::Solver, ..spec.clone() }).unwrap();
        a.rows
            .iter()
            .flatten()
            .zip(b.rows.iter().flatten())
            .map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) => (x - y).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn engines_agree_on_presets() {
        for id in ["fig3b", "fig3d", "fig4", "fig7a", "fig7b"] {
            let gap = max_engine_gap(&figure_preset(id).unwrap());
            assert!(gap < 1e-9, "{id}: {gap}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn engines_agree_on_random_specs(
            th in 0.0..TAU, phi0 in 0.0..TAU, tau in 0.0..1.5, ge in 0.0..6.0, rabi in 0.0..5.0,
        ) {
            let spec = SweepSpec::new(two_level(th, phi0, tau, ge), Axis::range("delta", -5.0, 5.0, 41),
                &["T_1to2", "T_2to1", "R", "R_rev", "I", "D", "conservation_deficit"]);
            prop_assert!(max_engine_gap(&spec) < 1e-9);
            let spec = SweepSpec::new(
                BaseParams::Nabla(NablaParams { rabi, theta2: th, phi_a0: phi0, tau_a: tau, gamma_e1: ge, ..Default::default() }),
                Axis::range("delta", -5.0, 5.0, 41),
                &["S_1to2", "S_2to1", "S_1to3", "S_1to4", "S_2to3", "S_2to4", "S_4to1", "C"]);
            prop_assert!(max_engine_gap(&spec) < 1e-9);
        }
    }
}
