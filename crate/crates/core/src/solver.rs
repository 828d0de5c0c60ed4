//! Boundary-matching solver for the single-excitation sector.
//!
//! Each channel carries a piecewise plane-wave field: right movers
//! `R_0 … R_m` and left movers `L_0 … L_m` on the `m + 1` segments cut by its
//! coupling points. At point `j` with phase `φ_j` the delta coupling imposes
//!
//! ```text
//! −i (R_{j+1} − R_j) e^{ iφ_j} + g e^{iθ_j} u = 0
//! −i (L_j − L_{j+1}) e^{−iφ_j} + g e^{iθ_j} u = 0
//! ```
//!
//! and every excited amplitude obeys
//!
//! ```text
//! −(Δ − ε) u + Σ_j (g/2) e^{−iθ_j} [e^{iφ_j}(R_j + R_{j+1}) + e^{−iφ_j}(L_j + L_{j+1})] + drives = 0
//! ```
//!
//! where the field at a point is the mean of its one-sided limits.
//!
//! Left-end incidence fixes `R_0 = 1` and reports outputs in the frame of the
//! first coupling point. Right-end incidence fixes a unit incoming wave at the
//! last coupling point of its channel and reports each channel's outputs in
//! the mirrored frame anchored at that channel's last point, so that solving
//! from the right with `(θ₁, θ₂)` equals solving from the left with
//! `(θ₂, θ₁)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{condition_1, relative_residual, Lu, Matrix};
use crate::model::{End, Port, ScatterModel};

type Complex = Complex64;

pub const CONDITION_LIMIT: f64 = 1e12;
pub const RESIDUAL_LIMIT: f64 = 1e-12;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Complex>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterSolution {
    pub incidence: Port,
    pub delta: f64,
    /// Outgoing amplitude per port, indexed by `Port::index`.
    pub outgoing: Vec<Complex>,
    /// Interior segment amplitudes, labelled `<waveguide>:R<k>` / `<waveguide>:L<k>`.
    pub segments: Vec<(String, Complex)>,
    /// Excitation amplitude of every level that takes part in the dynamics.
    pub atomic: Vec<(usize, Complex)>,
}

impl ScatterSolution {
    pub fn amplitude(&self, port: Port) -> Complex {
        self.outgoing[port.index()]
    }

    /// Zero for levels that are excluded from the dynamics.
    pub fn atomic_amplitude(&self, level: usize) -> Complex {
        self.atomic.iter().find(|(l, _)| *l == level).map(|(_, u)| *u).unwrap_or(ZERO)
    }

    pub fn total_probability(&self) -> f64 {
        self.outgoing.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Port-to-port scattering table at one detuning.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    pub n_ports: usize,
    pub delta: f64,
    /// `amplitudes[i][j]` is the amplitude from port `i + 1` into port `j + 1`.
    pub amplitudes: Vec<Vec<Complex>>,
    pub probabilities: Vec<Vec<f64>>,
}

impl SMatrix {
    pub fn get(&self, from: Port, to: Port) -> f64 {
        self.probabilities[from.index()][to.index()]
    }

    pub fn amplitude(&self, from: Port, to: Port) -> Complex {
        self.amplitudes[from.index()][to.index()]
    }

    pub fn row_sum(&self, from: Port) -> f64 {
        self.probabilities[from.index()].iter().sum()
    }
}

#[derive(Clone, Copy)]
enum Var {
    Unknown(usize),
    Fixed(Complex),
}

struct ChannelLayout {
    offset: usize,
    points: Vec<usize>,
    /// e^{iφ} at each point.
    phases: Vec<Complex>,
}

impl ChannelLayout {
    fn m(&self) -> usize {
        self.points.len()
    }

    fn last_phase(&self) -> Complex {
        self.phases.last().copied().unwrap_or(ONE)
    }
}

struct Layout {
    channels: Vec<ChannelLayout>,
    atomic: Vec<usize>,
    atomic_offset: usize,
    n: usize,
}

impl Layout {
    fn new(model: &ScatterModel, delta: f64) -> Self {
        let mut offset = 0;
        let mut channels = Vec::with_capacity(model.channels.len());
        for (c, ch) in model.channels.iter().enumerate() {
            let points: Vec<usize> = (0..model.couplings.len()).filter(|&k| model.couplings[k].channel == c).collect();
            let detuning = Complex::new(delta, 0.0) - ch.reference_energy;
            let phases = points
                .iter()
                .map(|&k| {
                    let cp = &model.couplings[k];
                    (I * (cp.phase_offset + cp.delay * detuning)).exp()
                })
                .collect();
            let m = points.len();
            channels.push(ChannelLayout { offset, points, phases });
            offset += 2 * m;
        }
        let atomic = active_levels(model);
        Self { channels, atomic_offset: offset, n: offset + atomic.len(), atomic }
    }

    fn atomic_index(&self, level: usize) -> Option<usize> {
        self.atomic.iter().position(|&l| l == level).map(|k| self.atomic_offset + k)
    }

    fn right(&self, c: usize, s: usize, incidence: Port) -> Var {
        let ch = &self.channels[c];
        if s == 0 {
            let incoming = incidence.channel() == c && incidence.end() == End::Left;
            Var::Fixed(if incoming { ONE } else { ZERO })
        } else {
            Var::Unknown(ch.offset + s - 1)
        }
    }

    fn left(&self, c: usize, s: usize, incidence: Port) -> Var {
        let ch = &self.channels[c];
        if s == ch.m() {
            let incoming = incidence.channel() == c && incidence.end() == End::Right;
            Var::Fixed(if incoming { ch.last_phase() } else { ZERO })
        } else {
            Var::Unknown(ch.offset + ch.m() + s)
        }
    }
}

/// Levels that carry an excitation amplitude: excited levels with a nonzero
/// coupling, closed under nonzero drives between non-companion levels.
fn active_levels(model: &ScatterModel) -> Vec<usize> {
    let mut active = vec![false; model.levels.len()];
    for cp in &model.couplings {
        if cp.strength != 0.0 {
            active[cp.level] = true;
        }
    }
    loop {
        let mut changed = false;
        for d in &model.drives {
            let (a, b) = d.levels;
            if d.amplitude == 0.0 || model.is_companion(a) || model.is_companion(b) {
                continue;
            }
            if active[a] != active[b] {
                active[a] = true;
                active[b] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..model.levels.len()).filter(|&l| active[l]).collect()
}

struct Assembler<'a> {
    matrix: &'a mut Matrix,
    rhs: &'a mut [Complex],
}

impl Assembler<'_> {
    fn add(&mut self, row: usize, var: Var, coef: Complex) {
        match var {
            Var::Unknown(col) => self.matrix.add(row, col, coef),
            Var::Fixed(v) => self.rhs[row] -= coef * v,
        }
    }
}

fn assemble(model: &ScatterModel, delta: f64, layout: &Layout, incidence: Port) -> (Matrix, Vec<Complex>) {
    let n = layout.n;
    let mut matrix = Matrix::zeros(n);
    let mut rhs = vec![ZERO; n];
    let mut asm = Assembler { matrix: &mut matrix, rhs: &mut rhs };
    let mut row = 0;

    for (c, ch) in layout.channels.iter().enumerate() {
        for (j, &k) in ch.points.iter().enumerate() {
            let cp = &model.couplings[k];
            let ep = ch.phases[j];
            let em = ep.inv();
            let source = layout.atomic_index(cp.level).map(|col| (col, cp.strength * (I * cp.phase).exp()));

            asm.add(row, layout.right(c, j + 1, incidence), -I * ep);
            asm.add(row, layout.right(c, j, incidence), I * ep);
            if let Some((col, g)) = source {
                asm.matrix.add(row, col, g);
            }
            row += 1;

            asm.add(row, layout.left(c, j, incidence), -I * em);
            asm.add(row, layout.left(c, j + 1, incidence), I * em);
            if let Some((col, g)) = source {
                asm.matrix.add(row, col, g);
            }
            row += 1;
        }
    }

    for &level in &layout.atomic {
        let col = layout.atomic_index(level).expect("active level");
        asm.matrix.add(row, col, -(Complex::new(delta, 0.0) - model.levels[level].energy));
        for (c, ch) in layout.channels.iter().enumerate() {
            for (j, &k) in ch.points.iter().enumerate() {
                let cp = &model.couplings[k];
                if cp.level != level || cp.strength == 0.0 {
                    continue;
                }
                let w = 0.5 * cp.strength * (-I * cp.phase).exp();
                let ep = ch.phases[j];
                let em = ep.inv();
                asm.add(row, layout.right(c, j, incidence), w * ep);
                asm.add(row, layout.right(c, j + 1, incidence), w * ep);
                asm.add(row, layout.left(c, j, incidence), w * em);
                asm.add(row, layout.left(c, j + 1, incidence), w * em);
            }
        }
        for d in &model.drives {
            let (a, b) = d.levels;
            let omega = d.amplitude * (I * d.phase).exp();
            if a == level {
                if let Some(other) = layout.atomic_index(b) {
                    asm.matrix.add(row, other, omega);
                }
            }
            if b == level {
                if let Some(other) = layout.atomic_index(a) {
                    asm.matrix.add(row, other, omega.conj());
                }
            }
        }
        row += 1;
    }
    debug_assert_eq!(row, n);
    (matrix, rhs)
}

fn labels(model: &ScatterModel, layout: &Layout) -> Vec<String> {
    let mut out = Vec::with_capacity(layout.n);
    for (c, ch) in layout.channels.iter().enumerate() {
        let name = &model.channels[c].waveguide;
        out.extend((1..=ch.m()).map(|s| format!("{name}:R{s}")));
        out.extend((0..ch.m()).map(|s| format!("{name}:L{s}")));
    }
    out.extend(layout.atomic.iter().map(|&l| format!("u[{}]", model.levels[l].name)));
    out
}

/// Linear system for a photon entering at `incidence` with detuning `delta`.
pub fn build_system(model: &ScatterModel, delta: f64, incidence: Port) -> Result<LinearSystem> {
    model.validate()?;
    incidence.check(model.n_ports())?;
    let layout = Layout::new(model, delta);
    let (matrix, rhs) = assemble(model, delta, &layout, incidence);
    Ok(LinearSystem { matrix, rhs, labels: labels(model, &layout) })
}

struct Factored {
    lu: Option<Lu>,
    matrix: Matrix,
}

impl Factored {
    fn new(matrix: Matrix, delta: f64) -> Result<Self> {
        if matrix.dim() == 0 {
            return Ok(Self { lu: None, matrix });
        }
        let lu = Lu::factor(&matrix);
        let condition = condition_1(&matrix, lu.as_ref());
        if condition.is_nan() || condition > CONDITION_LIMIT {
            return Err(Error::SingularSystem { delta, condition });
        }
        Ok(Self { lu, matrix })
    }

    fn solve(&self, rhs: &[Complex], delta: f64) -> Result<Vec<Complex>> {
        let Some(lu) = &self.lu else { return Ok(Vec::new()) };
        let x = lu.solve(rhs);
        let residual = relative_residual(&self.matrix, &x, rhs);
        if residual.is_nan() || residual > RESIDUAL_LIMIT {
            return Err(Error::Residual { delta, residual });
        }
        Ok(x)
    }
}

fn collect(model: &ScatterModel, layout: &Layout, delta: f64, incidence: Port, x: &[Complex]) -> ScatterSolution {
    let value = |v: Var| match v {
        Var::Unknown(k) => x[k],
        Var::Fixed(c) => c,
    };
    let mut outgoing = vec![ZERO; model.n_ports()];
    let mut segments = Vec::new();
    let mirrored = incidence.end() == End::Right;
    for (c, ch) in layout.channels.iter().enumerate() {
        let m = ch.m();
        let mut left = value(layout.left(c, 0, incidence));
        let mut right = value(layout.right(c, m, incidence));
        if mirrored {
            let e = ch.last_phase();
            left /= e;
            right *= e;
        }
        outgoing[Port::from_end(c, End::Left).index()] = left;
        outgoing[Port::from_end(c, End::Right).index()] = right;
        let name = &model.channels[c].waveguide;
        for s in 1..m {
            segments.push((format!("{name}:R{s}"), value(layout.right(c, s, incidence))));
            segments.push((format!("{name}:L{s}"), value(layout.left(c, s, incidence))));
        }
    }
    let atomic = layout.atomic.iter().map(|&l| (l, x[layout.atomic_index(l).unwrap()])).collect();
    ScatterSolution { incidence, delta, outgoing, segments, atomic }
}

/// Solves the scattering problem for one incidence port.
pub fn solve_scattering(model: &ScatterModel, delta: f64, incidence: Port) -> Result<ScatterSolution> {
    model.validate()?;
    incidence.check(model.n_ports())?;
    check_delta(delta)?;
    let layout = Layout::new(model, delta);
    let (matrix, rhs) = assemble(model, delta, &layout, incidence);
    let factored = Factored::new(matrix, delta)?;
    let x = factored.solve(&rhs, delta)?;
    Ok(collect(model, &layout, delta, incidence, &x))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("detuning must be finite, got {delta}")))
    }
}

/// All solutions at one detuning, one per port, sharing a single factorisation.
pub fn solve_all_ports(model: &ScatterModel, delta: f64) -> Result<Vec<ScatterSolution>> {
    model.validate()?;
    check_delta(delta)?;
    let layout = Layout::new(model, delta);
    let mut factored: Option<Factored> = None;
    let mut out = Vec::with_capacity(model.n_ports());
    for p in 1..=model.n_ports() {
        let port = Port(p);
        let (matrix, rhs) = assemble(model, delta, &layout, port);
        if factored.is_none() {
            factored = Some(Factored::new(matrix, delta)?);
        }
        let x = factored.as_ref().unwrap().solve(&rhs, delta)?;
        out.push(collect(model, &layout, delta, port, &x));
    }
    Ok(out)
}

pub fn s_matrix(model: &ScatterModel, delta: f64) -> Result<SMatrix> {
    let solutions = solve_all_ports(model, delta)?;
    let amplitudes: Vec<Vec<Complex>> = solutions.into_iter().map(|s| s.outgoing).collect();
    let probabilities = amplitudes.iter().map(|row| row.iter().map(|a| a.norm_sqr()).collect()).collect();
    Ok(SMatrix { n_ports: model.n_ports(), delta, amplitudes, probabilities })
}

/// Copy of `model` with all coupling points of each waveguide collapsed onto
/// its phase origin.
pub fn small_atom_limit(model: &ScatterModel) -> ScatterModel {
    let mut out = model.clone();
    for cp in &mut out.couplings {
        cp.phase_offset = 0.0;
        cp.delay = 0.0;
    }
    out
}
