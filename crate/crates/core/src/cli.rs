//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter
//! error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::closed_form::{nabla_amplitudes_with, two_level_amplitudes, TransferKernel};
use crate::error::Error;
use crate::metrics::{
    circulator_fidelity, conservation_deficit, off_cycle_leakage, parse_cycle, port_contrast, router_efficiency,
    DeviceReport,
};
use crate::model::{nabla_to_model, two_level_to_model, DeltaParams, NablaParams, Port, TwoLevelParams};
use crate::solver::s_matrix;
use crate::sweep::{
    delta_fig9, figure_preset, nabla_fig8, run_sweep, Axis, BaseParams, Engine, Grid, ModelKind, SweepSpec,
    DEFAULT_POINTS, DELTA_AXIS, PRESET_IDS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "giant-scatter", version, about = "Single-photon scattering through giant atoms")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep observables over the detuning (and optionally a second axis).
    #[command(visible_alias = "map")]
    Spectrum(SpectrumArgs),
    /// Write the data table of a figure preset.
    Figure(FigureArgs),
    /// Compare closed forms against the solver at random parameter points.
    Verify(VerifyArgs),
    /// Router, circulator and contrast figures of merit at one detuning.
    Device(DeviceArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct ModelArgs {
    #[arg(long)]
    gamma_wg: Option<f64>,
    #[arg(long, alias = "gamma-ext")]
    gamma_e: Option<f64>,
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    theta3: Option<f64>,
    #[arg(long)]
    theta4: Option<f64>,
    /// Sets theta2 = theta1 + value.
    #[arg(long)]
    theta: Option<f64>,
    /// Sets theta4 = theta3 + value.
    #[arg(long)]
    theta_prime: Option<f64>,
    #[arg(long)]
    phi0: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    gamma1_wg: Option<f64>,
    #[arg(long)]
    gamma2_wg: Option<f64>,
    #[arg(long)]
    gamma_e1: Option<f64>,
    #[arg(long)]
    gamma_e2: Option<f64>,
    #[arg(long)]
    rabi: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi_a0: Option<f64>,
    #[arg(long)]
    phi_b0: Option<f64>,
    #[arg(long)]
    tau_a: Option<f64>,
    #[arg(long)]
    tau_b: Option<f64>,
    #[arg(long)]
    gamma_g2: Option<f64>,
    #[arg(long)]
    drive: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    omega_g2: Option<f64>,
    /// Read every angle (flags and axes) in degrees.
    #[arg(long)]
    deg: bool,
}

fn is_angle(name: &str) -> bool {
    name.starts_with("theta") || name.starts_with("phi") || name == "alpha" || name == "beta"
}

impl ModelArgs {
    fn entries(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("gamma_wg", self.gamma_wg),
            ("gamma_e", self.gamma_e),
            ("theta1", self.theta1),
            ("theta2", self.theta2),
            ("theta3", self.theta3),
            ("theta4", self.theta4),
            ("theta", self.theta),
            ("theta_prime", self.theta_prime),
            ("phi0", self.phi0),
            ("tau", self.tau),
            ("gamma1_wg", self.gamma1_wg),
            ("gamma2_wg", self.gamma2_wg),
            ("gamma_e1", self.gamma_e1),
            ("gamma_e2", self.gamma_e2),
            ("rabi", self.rabi),
            ("alpha", self.alpha),
            ("phi_a0", self.phi_a0),
            ("phi_b0", self.phi_b0),
            ("tau_a", self.tau_a),
            ("tau_b", self.tau_b),
            ("gamma_g2", self.gamma_g2),
            ("drive", self.drive),
            ("beta", self.beta),
            ("omega_g2", self.omega_g2),
        ]
    }

    fn any_set(&self) -> bool {
        self.deg || self.entries().iter().any(|(_, v)| v.is_some())
    }

    fn angle(&self, name: &str, v: f64) -> f64 {
        if self.deg && is_angle(name) {
            v.to_radians()
        } else {
            v
        }
    }

    /// Applies explicit values in a fixed order: individual phases before
    /// the differences that are defined relative to them.
    fn apply(&self, params: &mut BaseParams) -> Result<(), Error> {
        let entries = self.entries();
        let (diffs, plain): (Vec<_>, Vec<_>) =
            entries.into_iter().partition(|(n, _)| *n == "theta" || *n == "theta_prime");
        for (name, value) in plain.into_iter().chain(diffs) {
            if let Some(v) = value {
                params.set(name, self.angle(name, v))?;
            }
        }
        params.validate()
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// JSON run configuration; excludes every other flag.
    #[arg(long, conflicts_with_all = ["model", "obs", "delta", "axis1", "axis2", "at_delta", "engine", "out"])]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated observables, e.g. T_1to2,T_2to1.
    #[arg(long)]
    obs: Option<String>,
    /// Detuning axis as min:max:points.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// First axis as name=min:max:points or name=v1,v2,...; replaces the detuning axis.
    #[arg(long, allow_hyphen_values = true)]
    axis1: Option<String>,
    /// Second axis as name=min:max:points or name=v1,v2,...
    #[arg(long, allow_hyphen_values = true)]
    axis2: Option<String>,
    /// Fixed detuning when no axis scans it.
    #[arg(long)]
    at_delta: Option<f64>,
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ModelArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Preset id (fig2a … fig9) or `all`.
    id: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = "auto")]
    engine: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Negative control: evaluate the transfer kernel with the wrong sign.
    #[arg(long, hide = true)]
    corrupt_kernel: bool,
}

#[derive(Args, Debug)]
struct DeviceArgs {
    /// fig8a|drive-off, fig8b|router-14, fig8c|router-13, fig8d|circulator, fig9|delta, fig6
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    target: Option<usize>,
    /// Port cycle such as 1,3,4,2.
    #[arg(long)]
    cycle: Option<String>,
    /// Port pair such as 1,4.
    #[arg(long)]
    contrast: Option<String>,
    #[command(flatten)]
    params: ModelArgs,
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Device(a) => cmd_device(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn parse_axis(text: &str, deg: bool) -> Result<Axis, Error> {
    let (name, spec) = text
        .split_once('=')
        .ok_or_else(|| Error::Grid(format!("expected name=min:max:points or name=v1,v2,..., got `{text}`")))?;
    let name = name.trim();
    let mut axis = if spec.contains(':') {
        Axis::parse_range(name, spec)?
    } else {
        let values = spec
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Grid(format!("bad value `{v}` in `{text}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Axis::values(name, values)
    };
    if deg {
        to_radians(&mut axis);
    }
    Ok(axis)
}

fn to_radians(axis: &mut Axis) {
    if !is_angle(&axis.param) {
        return;
    }
    match &mut axis.grid {
        Grid::Range { min, max, .. } => {
            *min = min.to_radians();
            *max = max.to_radians();
        }
        Grid::Values { values } => values.iter_mut().for_each(|v| *v = v.to_radians()),
    }
}

/// JSON form of a sweep.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    model: ModelKind,
    #[serde(default)]
    params: Option<serde_json::Value>,
    axis1: AxisConfig,
    #[serde(default)]
    axis2: Option<AxisConfig>,
    observables: Vec<String>,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    engine: Engine,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct AxisConfig {
    param: String,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    values: Option<Vec<f64>>,
}

impl AxisConfig {
    fn into_axis(self) -> Result<Axis, Error> {
        match (self.min, self.max, self.points, self.values) {
            (Some(min), Some(max), Some(points), None) => Ok(Axis::range(&self.param, min, max, points)),
            (None, None, None, Some(values)) => Ok(Axis::values(&self.param, values)),
            _ => Err(Error::Grid(format!("axis `{}` needs either min/max/points or values", self.param))),
        }
    }
}

fn params_from_json(kind: ModelKind, value: Option<serde_json::Value>) -> Result<BaseParams, Error> {
    let value = value.unwrap_or_else(|| serde_json::json!({}));
    let bad = |e: serde_json::Error| Error::Parameter(format!("params: {e}"));
    let params = match kind {
        ModelKind::TwoLevel => BaseParams::TwoLevel(serde_json::from_value::<TwoLevelParams>(value).map_err(bad)?),
        ModelKind::Nabla => BaseParams::Nabla(serde_json::from_value::<NablaParams>(value).map_err(bad)?),
        ModelKind::Delta => BaseParams::Delta(serde_json::from_value::<DeltaParams>(value).map_err(bad)?),
    };
    params.validate()?;
    Ok(params)
}

fn spec_from_config(path: &Path) -> Result<(SweepSpec, Option<PathBuf>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let base = params_from_json(cfg.model, cfg.params)?;
    let spec = SweepSpec {
        model_kind: cfg.model,
        base_params: base,
        axis1: cfg.axis1.into_axis()?,
        axis2: cfg.axis2.map(AxisConfig::into_axis).transpose()?,
        observables: cfg.observables,
        delta: cfg.delta,
        engine: cfg.engine,
    };
    Ok((spec, cfg.out))
}

fn spec_from_flags(a: &SpectrumArgs) -> Result<SweepSpec, Error> {
    let kind: ModelKind = a.model.as_deref().unwrap_or("two-level").parse()?;
    let mut base = BaseParams::default_for(kind);
    a.params.apply(&mut base)?;
    let obs = a.obs.as_deref().ok_or_else(|| Error::Parameter("--obs is required".into()))?;
    let observables: Vec<&str> = obs.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let axis1 = match (&a.axis1, &a.delta) {
        (Some(_), Some(_)) => return Err(Error::Parameter("--axis1 replaces --delta; give only one".into())),
        (Some(text), None) => parse_axis(text, a.params.deg)?,
        (None, Some(text)) => Axis::parse_range(DELTA_AXIS, text)?,
        (None, None) => Axis::range(DELTA_AXIS, -10.0, 10.0, DEFAULT_POINTS),
    };
    let mut spec = SweepSpec::new(base, axis1, &observables);
    if let Some(text) = &a.axis2 {
        spec = spec.with_axis2(parse_axis(text, a.params.deg)?);
    }
    spec.delta = a.at_delta.unwrap_or(0.0);
    if let Some(e) = &a.engine {
        spec.engine = e.parse()?;
    }
    Ok(spec)
}

fn cmd_spectrum(a: SpectrumArgs) -> CmdResult {
    let (spec, out) = match &a.config {
        Some(path) => {
            if a.params.any_set() {
                return Err(Failure::Usage("--config cannot be combined with parameter flags".into()));
            }
            spec_from_config(path)?
        }
        None => (spec_from_flags(&a)?, a.out.clone()),
    };
    let table = run_sweep(&spec)?;
    write_output(out.as_deref(), &table.to_csv())
}

fn cmd_figure(a: FigureArgs) -> CmdResult {
    let engine: Engine = a.engine.parse()?;
    let ids: Vec<&str> = if a.id == "all" { PRESET_IDS.to_vec() } else { vec![a.id.as_str()] };
    let specs = ids
        .iter()
        .map(|id| figure_preset(id).map(|s| (*id, SweepSpec { engine, ..s })))
        .collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", a.out_dir.display())))?;
    for (id, spec) in specs {
        let table = run_sweep(&spec)?;
        let path = a.out_dir.join(format!("{id}.csv"));
        write_output(Some(&path), &table.to_csv())?;
        println!("{}", path.display());
    }
    Ok(())
}

/// Largest closed-form versus solver deviations over random parameter points.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub trials: usize,
    pub two_level_max: f64,
    pub nabla_max: f64,
    /// Points where the solver reported a singular system.
    pub skipped: usize,
}

impl VerifyReport {
    pub fn max_deviation(&self) -> f64 {
        self.two_level_max.max(self.nabla_max)
    }
}

fn max_gap(pairs: &[(Complex64, Complex64)]) -> f64 {
    pairs.iter().map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Samples `trials` two-level and `trials` single-point ∇ configurations.
pub fn verify_suite(seed: u64, trials: usize, kernel: TransferKernel) -> Result<VerifyReport, Error> {
    use std::f64::consts::TAU;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport { trials, two_level_max: 0.0, nabla_max: 0.0, skipped: 0 };
    for _ in 0..trials {
        let p = TwoLevelParams {
            gamma_wg: rng.gen_range(0.2..3.0),
            gamma_ext: if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..6.0) },
            theta1: rng.gen_range(0.0..TAU),
            theta2: rng.gen_range(0.0..TAU),
            phi0: rng.gen_range(0.0..TAU),
            tau: if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) },
        };
        let delta = rng.gen_range(-10.0..10.0);
        let s = match s_matrix(&two_level_to_model(&p)?, delta) {
            Ok(s) => s,
            Err(Error::SingularSystem { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let a = two_level_amplitudes(&p, delta)?;
        let gap = max_gap(&[
            (a.t, s.amplitude(Port(1), Port(2))),
            (a.r, s.amplitude(Port(1), Port(1))),
            (a.t_rev, s.amplitude(Port(2), Port(1))),
            (a.r_rev, s.amplitude(Port(2), Port(2))),
        ]);
        report.two_level_max = report.two_level_max.max(gap);
    }
    for _ in 0..trials {
        let theta3 = rng.gen_range(0.0..TAU);
        let p = NablaParams {
            gamma1_wg: rng.gen_range(0.2..3.0),
            gamma2_wg: rng.gen_range(0.2..3.0),
            gamma_e1: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..3.0) },
            gamma_e2: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..3.0) },
            rabi: rng.gen_range(0.0..6.0),
            alpha: rng.gen_range(0.0..TAU),
            theta1: rng.gen_range(0.0..TAU),
            theta2: rng.gen_range(0.0..TAU),
            theta3,
            theta4: theta3,
            phi_a0: rng.gen_range(0.0..TAU),
            tau_a: if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) },
            ..Default::default()
        };
        let delta = rng.gen_range(-10.0..10.0);
        let s = match s_matrix(&nabla_to_model(&p)?, delta) {
            Ok(s) => s,
            Err(Error::SingularSystem { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let a = nabla_amplitudes_with(&p, delta, kernel)?;
        let gap = max_gap(&[
            (a.s12, s.amplitude(Port(1), Port(2))),
            (a.s21, s.amplitude(Port(2), Port(1))),
            (a.s13, s.amplitude(Port(1), Port(3))),
            (a.s14, s.amplitude(Port(1), Port(4))),
            (a.s23, s.amplitude(Port(2), Port(3))),
            (a.s24, s.amplitude(Port(2), Port(4))),
            (a.s41, s.amplitude(Port(4), Port(1))),
        ]);
        report.nabla_max = report.nabla_max.max(gap);
    }
    Ok(report)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let kernel = if a.corrupt_kernel { TransferKernel::SignFlipped } else { TransferKernel::Resolved };
    let report = verify_suite(a.seed, a.trials, kernel)?;
    let pass = report.max_deviation() < a.tol;
    println!("seed={}", a.seed);
    println!("trials={}", report.trials);
    println!("skipped={}", report.skipped);
    println!("two_level_max_deviation={:.3e}", report.two_level_max);
    println!("nabla_max_deviation={:.3e}", report.nabla_max);
    println!("max_deviation={:.3e}", report.max_deviation());
    println!("tolerance={:.3e}", a.tol);
    println!("result={}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn device_preset(name: &str) -> Result<BaseParams, Error> {
    use std::f64::consts::FRAC_PI_2;
    Ok(match name {
        "fig8a" | "drive-off" => BaseParams::Nabla(nabla_fig8(0.0, FRAC_PI_2, FRAC_PI_2)),
        "fig8b" | "router-14" => BaseParams::Nabla(nabla_fig8(2.0, FRAC_PI_2, FRAC_PI_2)),
        "fig8c" | "router-13" => BaseParams::Nabla(nabla_fig8(2.0, FRAC_PI_2, 3.0 * FRAC_PI_2)),
        "fig8d" | "circulator" => BaseParams::Nabla(nabla_fig8(2.0, FRAC_PI_2, 3.0 * FRAC_PI_2)),
        "fig6" => {
            BaseParams::Nabla(NablaParams { rabi: 5.0, theta2: FRAC_PI_2, phi_a0: FRAC_PI_2, ..Default::default() })
        }
        "fig9" | "delta" => BaseParams::Delta(delta_fig9(0.0)),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    })
}

fn port_pair(text: &str) -> Result<(Port, Port), Error> {
    let ports = parse_cycle(text)?;
    match ports.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Parameter(format!("expected two ports, got `{text}`"))),
    }
}

fn cmd_device(a: DeviceArgs) -> CmdResult {
    let (label, mut base) = match (&a.preset, &a.model) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--preset and --model are exclusive".into())),
        (Some(p), None) => (p.clone(), device_preset(p)?),
        (None, m) => {
            let kind: ModelKind = m.as_deref().unwrap_or("nabla").parse()?;
            (kind.to_string(), BaseParams::default_for(kind))
        }
    };
    a.params.apply(&mut base)?;
    let s = s_matrix(&base.to_model()?, a.delta)?;
    let port = |k: usize| Port(k).check(s.n_ports);
    let mut report = DeviceReport::new(label, a.delta);

    let pairs: Vec<(Port, Port)> = match (a.source, a.target) {
        (Some(i), Some(j)) => vec![(port(i)?, port(j)?)],
        (None, None) => (2..=s.n_ports).map(|j| (Port(1), Port(j))).collect(),
        _ => return Err(Failure::Usage("--source and --target go together".into())),
    };
    for (i, j) in pairs {
        report.push(format!("efficiency_{i}to{j}"), Some(router_efficiency(&s, i, j)?));
    }
    if s.n_ports == 4 || a.cycle.is_some() {
        let cycle = parse_cycle(a.cycle.as_deref().unwrap_or("1,3,4,2"))?;
        report.push("fidelity", Some(circulator_fidelity(&s, &cycle)?));
        report.push("leakage", Some(off_cycle_leakage(&s, &cycle)?));
    }
    let (ci, cj) = match &a.contrast {
        Some(text) => port_pair(text)?,
        None => (Port(1), Port(s.n_ports)),
    };
    let contrast = match port_contrast(&s, ci, cj) {
        Ok(v) => Some(v),
        Err(Error::UndefinedContrast) => None,
        Err(e) => return Err(e.into()),
    };
    report.push(format!("contrast_{ci}_{cj}"), contrast);
    for k in 1..=s.n_ports {
        report.push(format!("deficit_{k}"), Some(conservation_deficit(&s, Port(k))?));
    }
    print!("{report}");
    Ok(())
}
