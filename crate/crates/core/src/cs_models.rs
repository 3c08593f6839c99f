//! First-order systems of Craig–Sulem type in the elevation `f` and the
//! trace of the velocity potential `ζ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral::{commutator, LinearOp, SpectralField};
use crate::wave_models::{Dissipation, ModelParams};

#[derive(Clone, Debug, PartialEq)]
pub struct CSState {
    pub f: SpectralField,
    pub zeta: SpectralField,
}

impl CSState {
    pub fn new(f: SpectralField, zeta: SpectralField) -> Result<Self> {
        f.check_grid(&zeta)?;
        Ok(Self { f, zeta })
    }
}

/// Which algebraic form of the inviscid quadratic term to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ww2Form {
    /// `(ε/2)[(Λζ)² - (∂₁ζ)²]`.
    #[default]
    Raw,
    /// `ε𝓗(∂₁ζ Λζ)`, equal to the raw form by the Tricomi identity.
    Tricomi,
    /// `ε𝓗(∂₁f Λf)`, the quadratic term shared with the viscous systems.
    Elevation,
}

/// The system selected by the dissipation exponent, or the inviscid one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsSystem {
    Ww2,
    Viscous(Dissipation),
}

/// `-ε∂₁f∂₁ζ - ε[Λ, f]Λζ`, the quadratic part of `f_t` common to all systems.
fn elevation_quadratic(f: &SpectralField, zeta: &SpectralField) -> SpectralField {
    let lz = zeta.lambda();
    let transport = f.dx().mul(&zeta.dx());
    let comm = commutator(LinearOp::Lambda, f, &lz).expect("fields share a grid");
    -(&transport + &comm)
}

fn ww2_quadratic(state: &CSState, form: Ww2Form) -> SpectralField {
    let CSState { f, zeta } = state;
    match form {
        Ww2Form::Raw => (&zeta.lambda().square() - &zeta.dx().square()).scale(0.5),
        Ww2Form::Tricomi => zeta.dx().mul(&zeta.lambda()).hilbert(),
        Ww2Form::Elevation => f.dx().mul(&f.lambda()).hilbert(),
    }
}

/// Per-mode linearization acting on `(f̂, ζ̂)`.
pub fn linear_matrix(k: i64, p: &ModelParams, system: CsSystem) -> [[f64; 2]; 2] {
    let ka = k.abs() as f64;
    let k2 = ka * ka;
    let (diffusion, damping) = match system {
        CsSystem::Ww2 => (0.0, 0.0),
        CsSystem::Viscous(Dissipation::S0) => (p.alpha2 * k2, p.alpha1),
        CsSystem::Viscous(Dissipation::S2) => (p.alpha2 * k2, p.alpha1 * k2),
    };
    [[-diffusion, ka], [-(1.0 + p.beta * k2), -damping]]
}

/// Linear part of `(f_t, ζ_t)`.
pub fn linear_part(state: &CSState, p: &ModelParams, system: CsSystem) -> (SpectralField, SpectralField) {
    let CSState { f, zeta } = state;
    let mut ft = zeta.lambda();
    let mut zt = &f.dxx().scale(p.beta) - f;
    match system {
        CsSystem::Ww2 => {}
        CsSystem::Viscous(s) => {
            ft = &ft + &f.dxx().scale(p.alpha2);
            let damped = match s {
                Dissipation::S0 => zeta.scale(p.alpha1),
                Dissipation::S2 => zeta.lambda_pow(2.0).expect("positive power").scale(p.alpha1),
            };
            zt = &zt - &damped;
        }
    }
    (ft.without_mean(), zt)
}

/// Quadratic part of `(f_t, ζ_t)` including the factor ε.
pub fn quadratic_part(
    state: &CSState,
    p: &ModelParams,
    system: CsSystem,
    form: Ww2Form,
) -> (SpectralField, SpectralField) {
    let eps = p.epsilon;
    let CSState { f, zeta } = state;
    let ft = elevation_quadratic(f, zeta).scale(eps);
    let zt = match system {
        CsSystem::Ww2 => ww2_quadratic(state, form),
        CsSystem::Viscous(s) => {
            let lz = zeta.lambda();
            let f_xx = f.dxx();
            let mut zt = &ww2_quadratic(state, Ww2Form::Elevation) + &lz.mul(&f_xx).scale(p.alpha2);
            if s == Dissipation::S2 {
                let curvature = &f_xx.mul(&lz) + &f.dx().mul(&zeta.dx().lambda()).scale(2.0);
                zt = &zt - &curvature.scale(p.alpha1);
            }
            zt
        }
    };
    (ft.without_mean(), zt.scale(eps))
}

fn rhs(state: &CSState, p: &ModelParams, system: CsSystem, form: Ww2Form) -> Result<(SpectralField, SpectralField)> {
    state.f.check_grid(&state.zeta)?;
    let (lf, lz) = linear_part(state, p, system);
    if p.epsilon == 0.0 {
        return Ok((lf, lz));
    }
    let (nf, nz) = quadratic_part(state, p, system, form);
    Ok((&lf + &nf, &lz + &nz))
}

/// Inviscid WW2 system in the chosen algebraic form. Dissipation
/// coefficients in `p` are ignored.
pub fn rhs_ww2(state: &CSState, p: &ModelParams, form: Ww2Form) -> Result<(SpectralField, SpectralField)> {
    rhs(state, p, CsSystem::Ww2, form)
}

/// Viscous system with `s = 0`.
pub fn rhs_cs_s0(state: &CSState, p: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    if p.s != Dissipation::S0 {
        return Err(Error::Misuse("rhs_cs_s0 requires s = 0".into()));
    }
    rhs(state, p, CsSystem::Viscous(Dissipation::S0), Ww2Form::Elevation)
}

/// Viscous system with `s = 2`.
pub fn rhs_cs_s2(state: &CSState, p: &ModelParams) -> Result<(SpectralField, SpectralField)> {
    if p.s != Dissipation::S2 {
        return Err(Error::Misuse("rhs_cs_s2 requires s = 2".into()));
    }
    rhs(state, p, CsSystem::Viscous(Dissipation::S2), Ww2Form::Elevation)
}

/// Eigenvalues of the per-mode linearization of the viscous system selected
/// by `p.s`. The first has the larger real part.
pub fn cs_linear_eigenvalues(k: i64, p: &ModelParams) -> (Complex64, Complex64) {
    linalg::eigenvalues(linear_matrix(k, p, CsSystem::Viscous(p.s)))
}
