#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use viscwave::{GridSpec, SpectralField};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random trigonometric polynomial with modes `1..=kmax` (plus an optional
/// mean) and coefficients uniform in [-1, 1].
pub fn random_field(rng: &mut StdRng, grid: GridSpec, kmax: i64, with_mean: bool) -> SpectralField {
    let mut modes = Vec::new();
    if with_mean {
        modes.push((0, rng.gen_range(-1.0..1.0), 0.0));
    }
    for k in 1..=kmax {
        modes.push((k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    SpectralField::from_modes(grid, &modes).unwrap()
}

pub fn random_samples(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn field_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_abs_coeff()
}
