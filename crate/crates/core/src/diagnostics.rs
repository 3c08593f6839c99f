//! Mode-by-mode analysis of trajectories against the dispersion relations.
//!
//! A linear mode evolves as `f̂(k, t) = a e^{λ₊t} + b e^{λ₋t}` with
//! `λ± = -iω±`. Sampled at a fixed interval `Δ` the series obeys the
//! two-term recurrence `z_{n+2} = c₁z_{n+1} + c₀z_n`, whose characteristic
//! roots are `e^{λ±Δ}`. The recurrence is fitted by least squares (linear
//! prediction), which recovers the complex rates to round-off on exact data
//! without any envelope or zero-crossing heuristics.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::spectral::SpectralField;
use crate::wave_models::{self, DispersionBranch};

pub const MIN_SNAPSHOTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeFit {
    pub k: i64,
    /// σ in `|f̂(k, t)| ~ e^{-σt}`; the slower rate for overdamped modes.
    pub fitted_decay: f64,
    /// Angular frequency; zero for overdamped modes.
    pub fitted_frequency: f64,
    /// Faster decay rate of an overdamped mode, when the two rates were
    /// resolved separately.
    pub secondary_decay: Option<f64>,
    /// Set for overdamped modes whose fitted rates were within 10% of each
    /// other and were merged into a single-rate fit.
    pub single_rate: bool,
    /// Number of exponentials in the fitted model (1 or 2).
    pub order: usize,
    /// RMS misfit of the fitted exponential model, relative to the largest
    /// sample of the series.
    pub residual: f64,
    pub predicted: DispersionBranch,
}

/// Least-squares solution of `cols · x ≈ rhs` for one or two complex
/// columns by modified Gram–Schmidt. Returns `None` when the columns are
/// numerically dependent.
fn least_squares(cols: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let norm = |a: &[Complex64]| dot(a, a).re.sqrt();
    match cols {
        [a] => {
            let n = norm(a);
            if n == 0.0 {
                return None;
            }
            Some(vec![dot(a, rhs) / (n * n)])
        }
        [a, b] => {
            let na = norm(a);
            if na == 0.0 {
                return None;
            }
            let q1: Vec<Complex64> = a.iter().map(|x| x / na).collect();
            let r12 = dot(&q1, b);
            let w: Vec<Complex64> = b.iter().zip(&q1).map(|(x, q)| x - q * r12).collect();
            let r22 = norm(&w);
            if r22 <= 1e-9 * norm(b) {
                return None;
            }
            let q2: Vec<Complex64> = w.iter().map(|x| x / r22).collect();
            let y1 = dot(&q1, rhs);
            let y2 = dot(&q2, rhs);
            let x2 = y2 / r22;
            let x1 = (y1 - r12 * x2) / na;
            Some(vec![x1, x2])
        }
        _ => None,
    }
}

/// Continuous-time rate `ln(μ)/Δ` on the branch closest to `guess`.
fn rate(mu: Complex64, dt: f64, guess: Complex64) -> Complex64 {
    let base = mu.ln() / dt;
    let period = 2.0 * PI / dt;
    let m = ((guess.im - base.im) / period).round();
    base + Complex64::new(0.0, m * period)
}

struct Fit {
    rates: Vec<Complex64>,
    amplitudes: Vec<Complex64>,
    residual: f64,
}

fn fit_exponentials(z: &[Complex64], dt: f64, order: usize, guesses: [Complex64; 2]) -> Option<Fit> {
    let n = z.len();
    let rates: Vec<Complex64> = if order == 2 {
        let cols = vec![z[1..n - 1].to_vec(), z[..n - 2].to_vec()];
        let c = least_squares(&cols, &z[2..])?;
        // μ² - c₁μ - c₀ = 0
        let disc = (c[0] * c[0] + 4.0 * c[1]).sqrt();
        let roots = [(c[0] + disc) / 2.0, (c[0] - disc) / 2.0];
        if roots.iter().any(|r| r.norm() == 0.0 || !r.is_finite()) {
            return None;
        }
        // Pair each root with the nearer predicted rate.
        let r0 = rate(roots[0], dt, guesses[0]);
        let r1 = rate(roots[1], dt, guesses[1]);
        let s0 = rate(roots[0], dt, guesses[1]);
        let s1 = rate(roots[1], dt, guesses[0]);
        if (r0 - guesses[0]).norm() + (r1 - guesses[1]).norm()
            <= (s0 - guesses[1]).norm() + (s1 - guesses[0]).norm()
        {
            vec![r0, r1]
        } else {
            vec![s1, s0]
        }
    } else {
        let c = least_squares(&[z[..n - 1].to_vec()], &z[1..])?;
        if c[0].norm() == 0.0 {
            return None;
        }
        let a = rate(c[0], dt, guesses[0]);
        let b = rate(c[0], dt, guesses[1]);
        vec![if (a - guesses[0]).norm() <= (b - guesses[1]).norm() { a } else { b }]
    };
    let cols: Vec<Vec<Complex64>> = rates
        .iter()
        .map(|r| (0..n).map(|i| (r * (i as f64 * dt)).exp()).collect())
        .collect();
    let amplitudes = least_squares(&cols, z)?;
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let sq: f64 = (0..n)
        .map(|i| {
            let model: Complex64 = cols.iter().zip(&amplitudes).map(|(c, a)| c[i] * a).sum();
            (z[i] - model).norm_sqr()
        })
        .sum();
    Some(Fit {
        rates,
        amplitudes,
        residual: (sq / n as f64).sqrt() / scale,
    })
}

/// Fits the complex series `f̂(k, t_n)` of a trajectory with uniformly
/// spaced snapshots and attaches the dispersion prediction.
pub fn fit_mode(traj: &Trajectory, k: i64) -> Result<ModeFit> {
    if traj.len() < MIN_SNAPSHOTS {
        return Err(Error::domain(format!(
            "mode fitting needs at least {MIN_SNAPSHOTS} snapshots, got {}",
            traj.len()
        )));
    }
    if k.unsigned_abs() as usize >= traj.grid.n_modes() {
        return Err(Error::domain(format!("mode {k} is not resolved by the grid")));
    }
    let z: Vec<Complex64> = traj.states.iter().map(|s| s.f().coeff(k)).collect();
    if z.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::NoSignal { k });
    }
    let dt = traj.snapshot_interval();
    let predicted = wave_models::dispersion(k, &traj.model.effective_params(&traj.params));
    let i = Complex64::new(0.0, 1.0);
    let guesses = [-i * predicted.omega_plus, -i * predicted.omega_minus];

    let two = fit_exponentials(&z, dt, 2, guesses);
    let one = || fit_exponentials(&z, dt, 1, guesses).ok_or(Error::NoSignal { k });

    if predicted.is_underdamped() {
        let fit = match two {
            Some(f) => f,
            None => one()?,
        };
        // Both roots share decay and |frequency|; report the dominant one.
        let dominant = fit
            .amplitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        let r = fit.rates[dominant];
        return Ok(ModeFit {
            k,
            fitted_decay: -r.re,
            fitted_frequency: r.im.abs(),
            secondary_decay: None,
            single_rate: false,
            order: fit.rates.len(),
            residual: fit.residual,
            predicted,
        });
    }

    let resolved = two.filter(|f| {
        let (a, b) = (-f.rates[0].re, -f.rates[1].re);
        (a - b).abs() > 0.1 * a.abs().max(b.abs())
    });
    match resolved {
        Some(fit) => {
            let (a, b) = (-fit.rates[0].re, -fit.rates[1].re);
            Ok(ModeFit {
                k,
                fitted_decay: a.min(b),
                fitted_frequency: 0.0,
                secondary_decay: Some(a.max(b)),
                single_rate: false,
                order: 2,
                residual: fit.residual,
                predicted,
            })
        }
        None => {
            let fit = one()?;
            Ok(ModeFit {
                k,
                fitted_decay: -fit.rates[0].re,
                fitted_frequency: 0.0,
                secondary_decay: None,
                single_rate: true,
                order: 1,
                residual: fit.residual,
                predicted,
            })
        }
    }
}

/// One-sided coefficient magnitudes `|f̂(k)|` for `k = 0..=n_modes`.
pub fn spectrum(f: &SpectralField) -> Vec<f64> {
    (0..=f.grid().n_modes() as i64).map(|k| f.coeff(k).norm()).collect()
}

/// `L²` norm implied by a one-sided spectrum through Parseval's identity.
pub fn spectrum_l2_norm(spec: &[f64]) -> f64 {
    let last = spec.len() - 1;
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(k, a)| if k == 0 || k == last { a * a } else { 2.0 * a * a })
        .sum();
    (2.0 * PI * sum).sqrt()
}
