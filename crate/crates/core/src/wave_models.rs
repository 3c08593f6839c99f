//! Second-order nonlocal wave equations for the renormalized surface
//! elevation, and the dispersion relations of their linear parts.
//!
//! Both models have the form
//!
//! ```text
//! f_tt = L(f, f_t) + ε N(f, f_t)
//! ```
//!
//! where the linear part per Fourier mode is `f̂_tt = -Ω²(k) f̂ - Γ(k) f̂_t`
//! and `N` is a sum of commutators of `𝓗`, `Λ` and `∂₁²` with
//! multiplication by the surface.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::spectral::{commutator, LinearOp, SpectralField};

/// Exponent of the dissipative term: `s = 0` damps the potential itself,
/// `s = 2` damps its second vertical derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dissipation {
    S0,
    S2,
}

impl Dissipation {
    pub fn exponent(&self) -> u8 {
        match self {
            Dissipation::S0 => 0,
            Dissipation::S2 => 2,
        }
    }
}

impl TryFrom<u8> for Dissipation {
    type Error = Error;
    fn try_from(s: u8) -> Result<Self> {
        match s {
            0 => Ok(Dissipation::S0),
            2 => Ok(Dissipation::S2),
            other => Err(Error::domain(format!("dissipation exponent must be 0 or 2, got {other}"))),
        }
    }
}

impl From<Dissipation> for u8 {
    fn from(d: Dissipation) -> u8 {
        d.exponent()
    }
}

impl fmt::Display for Dissipation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exponent())
    }
}

/// Dimensionless model parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Steepness ε.
    pub epsilon: f64,
    /// Bond number β.
    pub beta: f64,
    /// Dissipation coefficient α₁ˢ (α₁⁰ or α₁² depending on `s`).
    pub alpha1: f64,
    /// Surface diffusion coefficient α₂.
    pub alpha2: f64,
    pub s: Dissipation,
}

impl ModelParams {
    pub fn inviscid(epsilon: f64, beta: f64) -> Self {
        Self {
            epsilon,
            beta,
            alpha1: 0.0,
            alpha2: 0.0,
            s: Dissipation::S0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("beta", self.beta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ] {
            if !v.is_finite() || v < 0.0 {
                errs.push(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Linear damping coefficient Γ(k) multiplying `f̂_t`.
    pub fn damping(&self, k: i64) -> f64 {
        let k2 = (k * k) as f64;
        match self.s {
            Dissipation::S0 => self.alpha1 + self.alpha2 * k2,
            Dissipation::S2 => (self.alpha1 + self.alpha2) * k2,
        }
    }

    /// Linear restoring coefficient Ω²(k) multiplying `f̂`.
    pub fn stiffness(&self, k: i64) -> f64 {
        let ka = k.abs() as f64;
        let k2 = ka * ka;
        let gravity_capillary = ka * (1.0 + self.beta * k2);
        match self.s {
            Dissipation::S0 => gravity_capillary + self.alpha1 * self.alpha2 * k2,
            Dissipation::S2 => gravity_capillary + self.alpha1 * self.alpha2 * k2 * k2,
        }
    }
}

/// Surface elevation and its time derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub f: SpectralField,
    pub ft: SpectralField,
}

impl WaveState {
    pub fn new(f: SpectralField, ft: SpectralField) -> Result<Self> {
        f.check_grid(&ft)?;
        Ok(Self { f, ft })
    }
}

/// Complex frequencies of the plane waves `e^{i(kx - ωt)}` for one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionBranch {
    pub k: i64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
}

impl DispersionBranch {
    /// Whether the two roots have nonzero, opposite real parts.
    pub fn is_underdamped(&self) -> bool {
        self.omega_plus.re > 0.0
    }

    /// Amplitude decay rate of the slower root, `-Im ω₊`.
    pub fn decay_rate(&self) -> f64 {
        -self.omega_plus.im
    }
}

/// Roots of `ω² + iΓ(k)ω - Ω²(k) = 0`.
pub fn dispersion(k: i64, p: &ModelParams) -> DispersionBranch {
    let gamma = p.damping(k);
    let omega2 = p.stiffness(k);
    let disc = Complex64::new(4.0 * omega2 - gamma * gamma, 0.0).sqrt();
    let shift = Complex64::new(0.0, -0.5 * gamma);
    DispersionBranch {
        k,
        omega_plus: shift + 0.5 * disc,
        omega_minus: shift - 0.5 * disc,
    }
}

/// Frequency `√(|k|(1 + β k²))` of the undamped model.
pub fn dispersion_inviscid(k: i64, beta: f64) -> f64 {
    let ka = k.abs() as f64;
    (ka * (1.0 + beta * ka * ka)).sqrt()
}

/// Per-mode companion matrix of the linear model acting on `(f̂, f̂_t)`.
pub fn companion(k: i64, p: &ModelParams) -> [[f64; 2]; 2] {
    [[0.0, 1.0], [-p.stiffness(k), -p.damping(k)]]
}

/// Exact evolution of `(f̂, f̂_t)` over `dt` under the linear model.
pub fn linear_propagator(k: i64, p: &ModelParams, dt: f64) -> Mat2 {
    let branch = dispersion(k, p);
    let i = Complex64::new(0.0, 1.0);
    let (mut slow, mut fast) = (-i * branch.omega_plus, -i * branch.omega_minus);
    if (branch.omega_plus - branch.omega_minus).norm() < 1e-9 {
        let mid = 0.5 * (slow + fast);
        slow = mid;
        fast = mid;
    }
    linalg::expm_with_eigenvalues(&linalg::real_mat(companion(k, p)), slow, fast, dt)
}

fn require(p: &ModelParams, s: Dissipation) -> Result<()> {
    if p.s != s {
        return Err(Error::Misuse(format!(
            "model for s = {s} called with parameters for s = {}",
            p.s
        )));
    }
    Ok(())
}

fn hilbert_comm(h: &SpectralField, g: &SpectralField) -> SpectralField {
    commutator(LinearOp::Hilbert, h, g).expect("fields share a grid")
}

fn dxx_comm(h: &SpectralField, g: &SpectralField) -> SpectralField {
    commutator(LinearOp::SecondDerivative, h, g).expect("fields share a grid")
}

/// Quadratic part `N(f, f_t)` (without the factor ε).
pub fn quadratic_part(state: &WaveState, p: &ModelParams) -> SpectralField {
    let WaveState { f, ft } = state;
    let h_ft = ft.hilbert();
    let f_xx = f.dxx();
    let h_fxx = f_xx.hilbert();

    // -Λ((𝓗f_t)²)
    let mut n = -h_ft.square().lambda();
    // ∂₁[𝓗, f](Λf + βΛ³f)
    let restoring = &f.lambda() + &f.lambda_pow(3.0).expect("positive power").scale(p.beta);
    n = &n + &hilbert_comm(f, &restoring).dx();
    if p.alpha2 != 0.0 {
        // α₂∂₁[𝓗, 𝓗f_t]𝓗∂₁²f + α₂Λ(𝓗f_t 𝓗∂₁²f) - α₂²∂₁[𝓗, ∂₁²f]∂₁²f
        let a = hilbert_comm(&h_ft, &h_fxx).dx();
        let b = h_ft.mul(&h_fxx).lambda();
        let c = hilbert_comm(&f_xx, &f_xx).dx();
        n = &n + &(&a + &b).scale(p.alpha2);
        n = &n - &c.scale(p.alpha2 * p.alpha2);
    }
    if p.s == Dissipation::S2 && p.alpha1 != 0.0 {
        // α₁²α₂∂₁[∂₁², f]Λ∂₁f - α₁²∂₁[∂₁², f]𝓗f_t
        let g = &f.dx().lambda().scale(p.alpha2) - &h_ft;
        n = &n + &dxx_comm(f, &g).dx().scale(p.alpha1);
    }
    n.without_mean()
}

/// Linear part of `f_tt`.
pub fn linear_part(state: &WaveState, p: &ModelParams) -> SpectralField {
    let WaveState { f, ft } = state;
    let restoring = &f.lambda() + &f.lambda_pow(3.0).expect("positive power").scale(p.beta);
    let out = match p.s {
        Dissipation::S0 => {
            let viscous = &(&f.dxx().scale(p.alpha1 * p.alpha2) + &ft.dxx().scale(p.alpha2))
                - &ft.scale(p.alpha1);
            &viscous - &restoring
        }
        Dissipation::S2 => {
            let viscous = &ft.dxx().scale(p.alpha1 + p.alpha2)
                - &f.derivative(4).scale(p.alpha1 * p.alpha2);
            &viscous - &restoring
        }
    };
    out.without_mean()
}

fn rhs(state: &WaveState, p: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    state.f.check_grid(&state.ft)?;
    let mut ftt = linear_part(state, p);
    if p.epsilon != 0.0 {
        ftt = &ftt + &quadratic_part(state, p).scale(p.epsilon);
    }
    Ok((state.ft.without_mean(), ftt))
}

/// Right-hand side `(f_t, f_tt)` of the `s = 0` model.
pub fn rhs_s0(state: &WaveState, p: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    require(p, Dissipation::S0)?;
    rhs(state, p)
}

/// Right-hand side `(f_t, f_tt)` of the `s = 2` model.
pub fn rhs_s2(state: &WaveState, p: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    require(p, Dissipation::S2)?;
    rhs(state, p)
}
