//! Conversion of dimensional inputs (SI units) to the dimensionless model
//! parameters.
//!
//! With amplitude `H`, wavelength `L` and gravity `G`:
//!
//! ```text
//! ε = H/L,  β = γ/(ρ G L²),  α₁ˢ = (δ₁/ρ) / (√G L^{s-1/2}),  α₂ = δ₂ / (√G L^{3/2})
//! ```
//!
//! Time is measured in units of `√(L/G)` and the velocity potential in
//! units of `H√(GL)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave_models::{Dissipation, ModelParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Wave amplitude H [m].
    pub amplitude_h: f64,
    /// Wavelength L [m].
    pub wavelength_l: f64,
    /// Gravitational acceleration G [m/s²].
    pub gravity_g: f64,
    /// Surface tension γ [kg/s²].
    #[serde(default)]
    pub surface_tension_gamma: f64,
    /// Density ρ [kg/m³].
    pub density_rho: f64,
    /// δ₁ [kg/(m²·s) for s = 0, kg/s for s = 2]. Mutually exclusive with
    /// `decay_rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipation_delta1: Option<f64>,
    /// δ₁/ρ given directly [1/s for s = 0, m³/s for s = 2].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_rate: Option<f64>,
    /// δ₂ [m²/s].
    #[serde(default)]
    pub diffusion_delta2: f64,
    pub s: Dissipation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dimensionless {
    pub params: ModelParams,
    /// `√(L/G)` [s].
    pub time_scale: f64,
    /// `H√(GL)` [m²/s].
    pub potential_scale: f64,
}

impl PhysicalParams {
    /// δ₁/ρ from whichever entry path was used.
    pub fn kinematic_dissipation(&self) -> Result<f64> {
        match (self.dissipation_delta1, self.decay_rate) {
            (Some(_), Some(_)) => Err(Error::domain(
                "give either dissipation_delta1 or decay_rate, not both",
            )),
            (Some(d), None) => Ok(d / self.density_rho),
            (None, Some(r)) => Ok(r),
            (None, None) => Ok(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for (name, v) in [
            ("amplitude_h", self.amplitude_h),
            ("wavelength_l", self.wavelength_l),
            ("gravity_g", self.gravity_g),
            ("density_rho", self.density_rho),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                errs.push(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("surface_tension_gamma", Some(self.surface_tension_gamma)),
            ("dissipation_delta1", self.dissipation_delta1),
            ("decay_rate", self.decay_rate),
            ("diffusion_delta2", Some(self.diffusion_delta2)),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() {
                    errs.push(format!("{name} must be non-negative, got {v}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(errs.join("; ")))
        }
    }
}

pub fn to_dimensionless(phys: &PhysicalParams) -> Result<Dimensionless> {
    phys.validate()?;
    let h = phys.amplitude_h;
    let l = phys.wavelength_l;
    let g = phys.gravity_g;
    let sqrt_g = g.sqrt();
    let s = phys.s.exponent() as f64;
    let params = ModelParams {
        epsilon: h / l,
        beta: phys.surface_tension_gamma / (phys.density_rho * g * l * l),
        alpha1: phys.kinematic_dissipation()? / (sqrt_g * l.powf(s - 0.5)),
        alpha2: phys.diffusion_delta2 / (sqrt_g * l.powf(1.5)),
        s: phys.s,
    };
    Ok(Dimensionless {
        params,
        time_scale: (l / g).sqrt(),
        potential_scale: h * (g * l).sqrt(),
    })
}
