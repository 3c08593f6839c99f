//! Fourier-collocation representation of real periodic fields on [-π, π) and
//! the nonlocal operators acting on them.
//!
//! A [`SpectralField`] stores the coefficients `c_k` of
//! `f(x) = Σ c_k e^{ikx}` in FFT order (index `j` holds `k = j` for
//! `j ≤ N/2` and `k = j - N` otherwise). Linear operators are Fourier
//! multipliers; products are evaluated in physical space with the 2/3 rule
//! applied to both factors and to the result.

pub mod dense;

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    // FftPlanner caches plans per length, so repeated transforms are cheap.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Uniform collocation grid on [-π, π).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GridSpec {
    n_points: usize,
}

impl GridSpec {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || n_points % 2 != 0 {
            return Err(Error::domain(format!(
                "grid needs an even number of points >= 8, got {n_points}"
            )));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Highest representable wavenumber (the Nyquist mode).
    pub fn n_modes(&self) -> usize {
        self.n_points / 2
    }

    /// Largest wavenumber kept by the 2/3 rule. Quadratic products of fields
    /// limited to this band alias only onto modes above it.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n_points - 1) / 3
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n_points as f64;
        (0..self.n_points)
            .map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / n)
            .collect()
    }

    /// Wavenumber stored at FFT index `j`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.n_points / 2 {
            j as i64
        } else {
            j as i64 - self.n_points as i64
        }
    }

    /// FFT index of wavenumber `k`, if it is representable.
    pub fn index(&self, k: i64) -> Option<usize> {
        let half = (self.n_points / 2) as i64;
        if k > half || k <= -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n_points as i64) as usize)
        }
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_points).map(move |j| self.wavenumber(j))
    }
}

impl TryFrom<usize> for GridSpec {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        GridSpec::new(n)
    }
}

impl From<GridSpec> for usize {
    fn from(g: GridSpec) -> usize {
        g.n_points
    }
}

/// Complex Fourier coefficients of a real periodic function.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Discrete Fourier coefficients of collocation samples, normalized so
    /// that `f(x_j) = Σ c_k e^{ik x_j}`.
    pub fn to_spectral(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        let n = grid.n_points();
        if samples.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: samples.len(),
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        fft_in_place(&mut buf, false);
        let scale = 1.0 / n as f64;
        // x_0 = -π contributes the phase (-1)^k = (-1)^j.
        for (j, c) in buf.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { scale } else { -scale };
            *c *= sign;
        }
        Ok(Self { grid, coeffs: buf })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        Self::to_spectral(grid, &samples).expect("sample count matches grid")
    }

    /// Trigonometric polynomial `Σ a_k cos(kx) + b_k sin(kx)` from
    /// `(k, a_k, b_k)` triples. Modes outside the grid are rejected.
    pub fn from_modes(grid: GridSpec, modes: &[(i64, f64, f64)]) -> Result<Self> {
        let mut field = Self::zeros(grid);
        for &(k, a, b) in modes {
            let k = k.abs();
            if k as usize >= grid.n_modes() {
                return Err(Error::domain(format!(
                    "mode {k} is not below the Nyquist mode {}",
                    grid.n_modes()
                )));
            }
            if k == 0 {
                field.coeffs[0] += Complex64::new(a, 0.0);
            } else {
                let c = field.coeff(k) + Complex64::new(a / 2.0, -b / 2.0);
                field.set_coeff(k, c);
            }
        }
        Ok(field)
    }

    /// Builds a field from raw FFT-ordered coefficients. The caller is
    /// responsible for Hermitian symmetry.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::Dimension {
                expected: grid.n_points(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of wavenumber `k` (zero if `k` is not representable).
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .index(k)
            .map(|j| self.coeffs[j])
            .unwrap_or_default()
    }

    /// Sets the coefficient of `k` and its conjugate partner `-k`.
    pub fn set_coeff(&mut self, k: i64, c: Complex64) {
        if k == 0 {
            self.coeffs[0] = Complex64::new(c.re, 0.0);
            return;
        }
        if let Some(j) = self.grid.index(k) {
            self.coeffs[j] = c;
        }
        if let Some(j) = self.grid.index(-k) {
            self.coeffs[j] = c.conj();
        }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.mean().abs() <= 1e-14 * self.max_abs_coeff()
    }

    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out
    }

    /// Highest wavenumber whose coefficient exceeds round-off relative to the
    /// largest coefficient (0 for constants).
    pub fn bandwidth(&self) -> usize {
        let floor = 1e-13 * self.max_abs_coeff();
        self.grid
            .wavenumbers()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.norm() > floor)
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Complex physical samples; the imaginary parts measure how far the
    /// coefficients are from Hermitian symmetry.
    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        for (j, c) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *c = -*c;
            }
        }
        fft_in_place(&mut buf, true);
        buf
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().into_iter().map(|c| c.re).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(∫ f² dx)^{1/2}` by the collocation rule.
    pub fn l2_norm(&self) -> f64 {
        let h = 2.0 * std::f64::consts::PI / self.grid.n_points() as f64;
        (h * self.to_physical().iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Applies the Fourier multiplier `symbol(k)` and zeroes the Nyquist mode.
    pub fn apply_symbol(&self, symbol: impl Fn(i64) -> Complex64) -> Self {
        self.map_modes(symbol)
    }

    fn map_modes(&self, symbol: impl Fn(i64) -> Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= symbol(self.grid.wavenumber(j));
        }
        let mut out = Self {
            grid: self.grid,
            coeffs,
        };
        out.zero_nyquist();
        out
    }

    fn zero_nyquist(&mut self) {
        let j = self.grid.n_modes();
        self.coeffs[j] = Complex64::new(0.0, 0.0);
    }

    /// Hilbert transform, symbol `-i sgn(k)`.
    pub fn hilbert(&self) -> Self {
        self.map_modes(|k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    /// `Λ^s`, symbol `|k|^s`. Negative powers require a zero-mean field.
    pub fn lambda_pow(&self, s: f64) -> Result<Self> {
        if s < 0.0 && !self.is_zero_mean() {
            return Err(Error::domain(format!(
                "Λ^{s} is undefined on a field with mean {}",
                self.mean()
            )));
        }
        Ok(self.map_modes(|k| {
            if k == 0 {
                if s == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                Complex64::new((k.abs() as f64).powf(s), 0.0)
            }
        }))
    }

    /// `Λ = |∂₁|`.
    pub fn lambda(&self) -> Self {
        self.map_modes(|k| Complex64::new(k.abs() as f64, 0.0))
    }

    /// `∂₁^order`, symbol `(ik)^order`.
    pub fn derivative(&self, order: u32) -> Self {
        self.map_modes(|k| Complex64::new(0.0, k as f64).powu(order))
    }

    pub fn dx(&self) -> Self {
        self.derivative(1)
    }

    pub fn dxx(&self) -> Self {
        self.derivative(2)
    }

    /// Zeroes every mode above the 2/3 cutoff.
    pub fn dealiased(&self) -> Self {
        let cutoff = self.grid.dealias_cutoff() as i64;
        let mut out = self.clone();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            if self.grid.wavenumber(j).abs() > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Largest coefficient magnitude above the 2/3 cutoff.
    pub fn max_coeff_above_cutoff(&self) -> f64 {
        let cutoff = self.grid.dealias_cutoff() as i64;
        self.grid
            .wavenumbers()
            .zip(&self.coeffs)
            .filter(|(k, _)| k.abs() > cutoff)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Dealiased pointwise product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let a = self.dealiased().to_physical();
        let b = other.dealiased().to_physical();
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(Self::to_spectral(self.grid, &prod)?.dealiased())
    }

    pub fn square(&self) -> Self {
        self.multiply(self).expect("same grid")
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        self.multiply(other).expect("fields share a grid")
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Dimension {
                expected: self.grid.n_points(),
                got: other.grid.n_points(),
            });
        }
        Ok(())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "adding fields on different grids");
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: SpectralField) -> SpectralField {
        &self + &rhs
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "subtracting fields on different grids");
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: SpectralField) -> SpectralField {
        &self - &rhs
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

impl Neg for SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.scale(self)
    }
}

impl Mul<SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: SpectralField) -> SpectralField {
        rhs.scale(self)
    }
}

/// Linear operators that may appear in a commutator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearOp {
    Lambda,
    Hilbert,
    SecondDerivative,
}

impl LinearOp {
    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        match self {
            LinearOp::Lambda => f.lambda(),
            LinearOp::Hilbert => f.hilbert(),
            LinearOp::SecondDerivative => f.dxx(),
        }
    }
}

impl FromStr for LinearOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" | "Λ" => Ok(LinearOp::Lambda),
            "hilbert" | "H" | "𝓗" => Ok(LinearOp::Hilbert),
            "dxx" | "∂₁²" => Ok(LinearOp::SecondDerivative),
            other => Err(Error::domain(format!("unsupported commutator operator `{other}`"))),
        }
    }
}

impl fmt::Display for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearOp::Lambda => "lambda",
            LinearOp::Hilbert => "hilbert",
            LinearOp::SecondDerivative => "dxx",
        })
    }
}

/// `[A, h] g = A(h g) - h A(g)` with dealiased products.
pub fn commutator(op: LinearOp, h: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    h.check_grid(g)?;
    let hg = h.multiply(g)?;
    let h_ag = h.multiply(&op.apply(g))?;
    Ok(&op.apply(&hg) - &h_ag)
}

/// Sup-norm residuals of the two Tricomi identities
/// `(𝓗f)² - f² = 2𝓗(f𝓗f)` and `𝓗f𝓗g - 𝓗(f𝓗g + g𝓗f) = fg`.
pub fn tricomi_residuals(f: &SpectralField, g: &SpectralField) -> Result<(f64, f64)> {
    f.check_grid(g)?;
    let hf = f.hilbert();
    let hg = g.hilbert();

    let lhs1 = &hf.square() - &f.square();
    let rhs1 = f.multiply(&hf)?.hilbert().scale(2.0);
    let r1 = (&lhs1 - &rhs1).sup_norm();

    let cross = &f.multiply(&hg)? + &g.multiply(&hf)?;
    let lhs2 = &hf.multiply(&hg)? - &cross.hilbert();
    let r2 = (&lhs2 - &f.multiply(g)?).sup_norm();
    Ok((r1, r2))
}
