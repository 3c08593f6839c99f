//! Time stepping for both model families.
//!
//! Each model is written per Fourier mode as `u̇ = A(k)u + N(u)` with
//! `u = (f̂, f̂_t)` or `u = (f̂, ζ̂)`. The linear block is propagated exactly by
//! `e^{tA(k)}` and the quadratic part `N` is treated with the
//! integrating-factor (Lawson) form of the classical RK4 scheme, so that a
//! step with `ε = 0` is pure linear propagation.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cs_models::{self, CSState, CsSystem, Ww2Form};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::spectral::{GridSpec, SpectralField};
use crate::wave_models::{self, Dissipation, ModelParams, WaveState};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    WaveS0,
    WaveS2,
    Ww2,
    CsS0,
    CsS2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::WaveS0,
        ModelKind::WaveS2,
        ModelKind::Ww2,
        ModelKind::CsS0,
        ModelKind::CsS2,
    ];

    /// Dissipation exponent the parameters must carry, if any.
    pub fn required_exponent(&self) -> Option<Dissipation> {
        match self {
            ModelKind::WaveS0 | ModelKind::CsS0 => Some(Dissipation::S0),
            ModelKind::WaveS2 | ModelKind::CsS2 => Some(Dissipation::S2),
            ModelKind::Ww2 => None,
        }
    }

    pub fn is_wave(&self) -> bool {
        matches!(self, ModelKind::WaveS0 | ModelKind::WaveS2)
    }

    /// Name of the second state variable in output files.
    pub fn second_name(&self) -> &'static str {
        if self.is_wave() {
            "ft"
        } else {
            "zeta"
        }
    }

    /// Parameters with the coefficients the model ignores zeroed.
    pub fn effective_params(&self, p: &ModelParams) -> ModelParams {
        match self {
            ModelKind::Ww2 => ModelParams::inviscid(p.epsilon, p.beta),
            _ => *p,
        }
    }

    /// Per-mode linear block.
    pub fn linear_matrix(&self, k: i64, p: &ModelParams) -> [[f64; 2]; 2] {
        match self {
            ModelKind::WaveS0 | ModelKind::WaveS2 => wave_models::companion(k, p),
            ModelKind::Ww2 => cs_models::linear_matrix(k, p, CsSystem::Ww2),
            ModelKind::CsS0 => cs_models::linear_matrix(k, p, CsSystem::Viscous(Dissipation::S0)),
            ModelKind::CsS2 => cs_models::linear_matrix(k, p, CsSystem::Viscous(Dissipation::S2)),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ModelKind::WaveS0 => "wave_s0",
            ModelKind::WaveS2 => "wave_s2",
            ModelKind::Ww2 => "ww2",
            ModelKind::CsS0 => "cs_s0",
            ModelKind::CsS2 => "cs_s2",
        };
        f.write_str(name)
    }
}

/// State of either model family. The second field is `f_t` for the wave
/// models and `ζ` for the Craig–Sulem systems.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelState {
    Wave(WaveState),
    Cs(CSState),
}

impl ModelState {
    pub fn from_fields(model: ModelKind, f: SpectralField, second: SpectralField) -> Result<Self> {
        Ok(if model.is_wave() {
            ModelState::Wave(WaveState::new(f, second)?)
        } else {
            ModelState::Cs(CSState::new(f, second)?)
        })
    }

    pub fn f(&self) -> &SpectralField {
        match self {
            ModelState::Wave(s) => &s.f,
            ModelState::Cs(s) => &s.f,
        }
    }

    pub fn second(&self) -> &SpectralField {
        match self {
            ModelState::Wave(s) => &s.ft,
            ModelState::Cs(s) => &s.zeta,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.f().grid()
    }

    pub fn is_finite(&self) -> bool {
        self.f().is_finite() && self.second().is_finite()
    }
}

/// One Fourier mode of an initial field: `cos·cos(kx) + sin·sin(kx)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Sparse mode lists for `f` and the second variable.
    Modes {
        f: Vec<ModeSpec>,
        #[serde(default)]
        second: Vec<ModeSpec>,
    },
    /// Physical samples at the collocation nodes.
    Samples { f: Vec<f64>, second: Vec<f64> },
    /// A sample file with columns `x, f[, second]`; `#` lines are comments.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub model: ModelKind,
    /// Quadratic term used by the `ww2` model.
    #[serde(default)]
    pub ww2_form: Ww2Form,
    #[serde(rename = "n_points")]
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    /// Skip the explicit-stage stability bound on `dt`.
    #[serde(default)]
    pub allow_unstable_dt: bool,
    /// Modes whose amplitudes are recorded with every snapshot.
    #[serde(default)]
    pub track_modes: Vec<i64>,
    pub params: ModelParams,
    pub initial: InitialCondition,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// Largest `dt` allowed by `dt ≤ 0.5/max_k |Re ω₊(k)|` over the retained modes.
pub fn stability_limit(model: ModelKind, p: &ModelParams, grid: GridSpec) -> f64 {
    let p = model.effective_params(p);
    let omega_max = (0..=grid.dealias_cutoff() as i64)
        .map(|k| wave_models::dispersion(k, &p).omega_plus.re.abs())
        .fold(0.0, f64::max);
    if omega_max == 0.0 {
        f64::INFINITY
    } else {
        0.5 / omega_max
    }
}

fn read_sample_file(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut f = Vec::new();
    let mut second = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols[0].parse::<f64>().is_err() {
            // column header
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| {
                Error::Io(format!("{}:{}: {e}", path.display(), lineno + 1))
            })
        };
        if cols.len() < 2 {
            return Err(Error::Io(format!(
                "{}:{}: expected columns x, f[, second]",
                path.display(),
                lineno + 1
            )));
        }
        f.push(parse(cols[1])?);
        second.push(if cols.len() > 2 { parse(cols[2])? } else { 0.0 });
    }
    Ok((f, second))
}

/// Initial state after dealiasing and mean removal, with the warnings those
/// projections produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedInitial {
    pub state: ModelState,
    pub warnings: Vec<String>,
}

impl SimConfig {
    /// Replaces a file reference by the samples it contains, so that the
    /// configuration is self-contained. Relative paths are taken from `base`.
    pub fn resolved(&self, base: &Path) -> Result<SimConfig> {
        let mut out = self.clone();
        if let InitialCondition::File { path } = &self.initial {
            let full = if path.is_absolute() {
                path.clone()
            } else {
                base.join(path)
            };
            let (f, second) = read_sample_file(&full)?;
            out.initial = InitialCondition::Samples { f, second };
        }
        Ok(out)
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.format_version != FORMAT_VERSION {
            errs.push(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            ));
        }
        if let Err(Error::Config(e)) = self.params.validate() {
            errs.extend(e);
        }
        if let Some(s) = self.model.required_exponent() {
            if self.params.s != s {
                errs.push(format!(
                    "model {} requires params.s = {s}, got {}",
                    self.model, self.params.s
                ));
            }
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            errs.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            errs.push(format!("t_end must be positive, got {}", self.t_end));
        } else if self.t_end < self.dt {
            errs.push(format!("t_end = {} is shorter than dt = {}", self.t_end, self.dt));
        }
        if self.snapshot_every == 0 {
            errs.push("snapshot_every must be at least 1".into());
        }
        if self.dt > 0.0 && !self.allow_unstable_dt {
            let limit = stability_limit(self.model, &self.params, self.grid);
            if self.dt > limit {
                errs.push(format!(
                    "dt = {} exceeds the stability bound {limit:.6e} (set allow_unstable_dt to override)",
                    self.dt
                ));
            }
        }
        let cutoff = self.grid.dealias_cutoff() as i64;
        for &k in &self.track_modes {
            if k < 1 || k > cutoff {
                errs.push(format!("tracked mode {k} is outside 1..={cutoff}"));
            }
        }
        match &self.initial {
            InitialCondition::Modes { f, second } => {
                for m in f.iter().chain(second) {
                    if m.k.unsigned_abs() as usize >= self.grid.n_modes() {
                        errs.push(format!(
                            "initial mode {} is not below the Nyquist mode {}",
                            m.k,
                            self.grid.n_modes()
                        ));
                    }
                    if !m.cos.is_finite() || !m.sin.is_finite() {
                        errs.push(format!("initial mode {} has a non-finite amplitude", m.k));
                    }
                }
            }
            InitialCondition::Samples { f, second } => {
                for (name, v) in [("f", f), ("second", second)] {
                    if v.len() != self.grid.n_points() {
                        errs.push(format!(
                            "initial {name} has {} samples, grid has {}",
                            v.len(),
                            self.grid.n_points()
                        ));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        errs.push(format!("initial {name} contains non-finite samples"));
                    }
                }
            }
            InitialCondition::File { .. } => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }

    pub fn realize_initial(&self) -> Result<RealizedInitial> {
        let grid = self.grid;
        let to_triples = |m: &[ModeSpec]| m.iter().map(|m| (m.k, m.cos, m.sin)).collect::<Vec<_>>();
        let (f, second) = match &self.initial {
            InitialCondition::Modes { f, second } => (
                SpectralField::from_modes(grid, &to_triples(f))?,
                SpectralField::from_modes(grid, &to_triples(second))?,
            ),
            InitialCondition::Samples { f, second } => (
                SpectralField::to_spectral(grid, f)?,
                SpectralField::to_spectral(grid, second)?,
            ),
            InitialCondition::File { path } => {
                return Err(Error::Misuse(format!(
                    "initial condition file {} must be resolved before the run",
                    path.display()
                )))
            }
        };
        let mut warnings = Vec::new();
        let mut project = |name: &str, field: SpectralField, drop_mean: bool| {
            let mut out = field.dealiased();
            if out != field {
                warnings.push(format!(
                    "initial {name}: modes above the dealiasing cutoff {} removed",
                    grid.dealias_cutoff()
                ));
            }
            if drop_mean && out.mean() != 0.0 {
                warnings.push(format!(
                    "initial {name}: mean {} projected out",
                    out.mean()
                ));
                out = out.without_mean();
            }
            out
        };
        let f = project("f", f, true);
        let second = project(self.model.second_name(), second, self.model.is_wave());
        Ok(RealizedInitial {
            state: ModelState::from_fields(self.model, f, second)?,
            warnings,
        })
    }
}

/// Integrating-factor RK4 stepper with precomputed per-mode propagators.
#[derive(Clone, Debug)]
pub struct Stepper {
    model: ModelKind,
    params: ModelParams,
    form: Ww2Form,
    grid: GridSpec,
    dt: f64,
    full: Vec<Mat2>,
    half: Vec<Mat2>,
}

type Pair = (Vec<Complex64>, Vec<Complex64>);

impl Stepper {
    pub fn new(model: ModelKind, params: &ModelParams, grid: GridSpec, dt: f64) -> Result<Self> {
        Self::with_form(model, params, Ww2Form::default(), grid, dt)
    }

    pub fn with_form(
        model: ModelKind,
        params: &ModelParams,
        form: Ww2Form,
        grid: GridSpec,
        dt: f64,
    ) -> Result<Self> {
        if let Some(s) = model.required_exponent() {
            if params.s != s {
                return Err(Error::Misuse(format!(
                    "model {model} called with parameters for s = {}",
                    params.s
                )));
            }
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!("dt must be positive, got {dt}")));
        }
        let params = model.effective_params(params);
        let nyquist = grid.n_modes();
        let build = |t: f64| -> Vec<Mat2> {
            (0..grid.n_points())
                .map(|j| {
                    if j == nyquist {
                        return [[Complex64::new(0.0, 0.0); 2]; 2];
                    }
                    let k = grid.wavenumber(j);
                    if model.is_wave() {
                        wave_models::linear_propagator(k, &params, t)
                    } else {
                        linalg::expm_real(model.linear_matrix(k, &params), t)
                    }
                })
                .collect()
        };
        Ok(Self {
            model,
            params,
            form,
            grid,
            dt,
            full: build(dt),
            half: build(0.5 * dt),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn propagate(e: &[Mat2], u: &Pair) -> Pair {
        let mut a = Vec::with_capacity(u.0.len());
        let mut b = Vec::with_capacity(u.0.len());
        for (m, (x, y)) in e.iter().zip(u.0.iter().zip(&u.1)) {
            let [p, q] = linalg::apply(m, [*x, *y]);
            a.push(p);
            b.push(q);
        }
        (a, b)
    }

    fn axpy(u: &Pair, h: f64, v: &Pair) -> Pair {
        let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(a, b)| a + b * h).collect()
        };
        (comb(&u.0, &v.0), comb(&u.1, &v.1))
    }

    fn fields(&self, u: &Pair) -> (SpectralField, SpectralField) {
        (
            SpectralField::from_coeffs(self.grid, u.0.clone()).expect("grid length"),
            SpectralField::from_coeffs(self.grid, u.1.clone()).expect("grid length"),
        )
    }

    /// Quadratic part of the right-hand side, including ε.
    fn nonlinear(&self, u: &Pair) -> Pair {
        let (f, second) = self.fields(u);
        let p = &self.params;
        match self.model {
            ModelKind::WaveS0 | ModelKind::WaveS2 => {
                let state = WaveState { f, ft: second };
                let n = wave_models::quadratic_part(&state, p).scale(p.epsilon);
                (vec![Complex64::new(0.0, 0.0); u.0.len()], n.coeffs().to_vec())
            }
            model => {
                let (system, form) = match model {
                    ModelKind::Ww2 => (CsSystem::Ww2, self.form),
                    ModelKind::CsS0 => (CsSystem::Viscous(Dissipation::S0), Ww2Form::Elevation),
                    _ => (CsSystem::Viscous(Dissipation::S2), Ww2Form::Elevation),
                };
                let state = CSState { f, zeta: second };
                let (a, b) = cs_models::quadratic_part(&state, p, system, form);
                (a.coeffs().to_vec(), b.coeffs().to_vec())
            }
        }
    }

    /// Advances `state` from time `t` by one step. `t` is only used to label
    /// a blow-up.
    pub fn step(&self, state: &ModelState, t: f64) -> Result<ModelState> {
        if state.grid() != self.grid {
            return Err(Error::Dimension {
                expected: self.grid.n_points(),
                got: state.grid().n_points(),
            });
        }
        let u: Pair = (state.f().coeffs().to_vec(), state.second().coeffs().to_vec());
        let h = self.dt;
        let next = if self.params.epsilon == 0.0 {
            Self::propagate(&self.full, &u)
        } else {
            let k1 = self.nonlinear(&u);
            let u2 = Self::propagate(&self.half, &Self::axpy(&u, 0.5 * h, &k1));
            let k2 = self.nonlinear(&u2);
            let eu_half = Self::propagate(&self.half, &u);
            let u3 = Self::axpy(&eu_half, 0.5 * h, &k2);
            let k3 = self.nonlinear(&u3);
            let eu = Self::propagate(&self.full, &u);
            let u4 = Self::axpy(&eu, h, &Self::propagate(&self.half, &k3));
            let k4 = self.nonlinear(&u4);
            let mid = Self::propagate(&self.half, &Self::axpy(&k2, 1.0, &k3));
            let mut acc = Self::propagate(&self.full, &k1);
            acc = Self::axpy(&acc, 2.0, &mid);
            acc = Self::axpy(&acc, 1.0, &k4);
            Self::axpy(&eu, h / 6.0, &acc)
        };
        let (f, second) = self.fields(&next);
        let out = ModelState::from_fields(self.model, f, second)?;
        if !out.is_finite() {
            return Err(Error::BlowUp { time: t + h });
        }
        Ok(out)
    }
}

/// One step of size `dt` with the default WW2 form.
pub fn step(state: &ModelState, model: ModelKind, p: &ModelParams, dt: f64) -> Result<ModelState> {
    Stepper::new(model, p, state.grid(), dt)?.step(state, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeAmplitude {
    pub k: i64,
    /// `|f̂(k)|`.
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotDiagnostics {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub modes: Vec<ModeAmplitude>,
}

impl SnapshotDiagnostics {
    fn of(state: &ModelState, track: &[i64]) -> Self {
        let f = state.f();
        Self {
            sup_norm: f.sup_norm(),
            l2_norm: f.l2_norm(),
            modes: track
                .iter()
                .map(|&k| ModeAmplitude {
                    k,
                    amplitude: f.coeff(k).norm(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub model: ModelKind,
    pub params: ModelParams,
    pub grid: GridSpec,
    pub dt: f64,
    pub snapshot_every: usize,
    pub times: Vec<f64>,
    pub states: Vec<ModelState>,
    pub diagnostics: Vec<SnapshotDiagnostics>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time between consecutive snapshots.
    pub fn snapshot_interval(&self) -> f64 {
        self.dt * self.snapshot_every as f64
    }
}

/// A failed run together with everything recorded before the failure.
#[derive(Clone, Debug, PartialEq)]
pub struct RunError {
    pub error: Error,
    pub partial: Option<Trajectory>,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(error: Error) -> Self {
        RunError { error, partial: None }
    }
}

/// Integrates a validated configuration from its initial condition to
/// `t_end`. File initial conditions must be [resolved](SimConfig::resolved)
/// first.
pub fn run(config: &SimConfig) -> std::result::Result<Trajectory, RunError> {
    config.validate()?;
    let RealizedInitial { state, warnings } = config.realize_initial()?;
    let stepper = Stepper::with_form(config.model, &config.params, config.ww2_form, config.grid, config.dt)?;
    let mut traj = Trajectory {
        model: config.model,
        params: config.params,
        grid: config.grid,
        dt: config.dt,
        snapshot_every: config.snapshot_every,
        times: vec![0.0],
        diagnostics: vec![SnapshotDiagnostics::of(&state, &config.track_modes)],
        states: vec![state.clone()],
        warnings,
    };
    let mut current = state;
    for n in 1..=config.n_steps() {
        let t_prev = (n - 1) as f64 * config.dt;
        current = match stepper.step(&current, t_prev) {
            Ok(s) => s,
            Err(error) => {
                return Err(RunError {
                    error,
                    partial: Some(traj),
                })
            }
        };
        if n % config.snapshot_every == 0 {
            traj.times.push(n as f64 * config.dt);
            traj.diagnostics
                .push(SnapshotDiagnostics::of(&current, &config.track_modes));
            traj.states.push(current.clone());
        }
    }
    Ok(traj)
}
