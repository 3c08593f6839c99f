//! Pseudo-spectral models of viscously damped deep-water waves on a
//! periodic domain.
//!
//! * [`spectral`]: Fourier collocation, `𝓗`, `Λ^s`, derivatives, dealiased
//!   products and commutators.
//! * [`wave_models`]: the two second-order nonlocal wave equations and their
//!   dispersion relations.
//! * [`cs_models`]: first-order Craig–Sulem-type systems.
//! * [`elliptic`]: half-plane Poisson solver used to check the first-order
//!   Dirichlet–Neumann expansion.
//! * [`integrate`]: integrating-factor RK4 time stepping.
//! * [`diagnostics`]: mode fitting against the dispersion relations.
//! * [`nondim`]: physical to dimensionless parameters.

pub mod cs_models;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod nondim;
pub mod spectral;
pub mod wave_models;

pub use error::{Error, Result};
pub use spectral::{GridSpec, SpectralField};
pub use wave_models::{Dissipation, ModelParams};
