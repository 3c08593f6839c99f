//! Dense collocation matrices built by direct trigonometric summation.
//!
//! These are brute-force oracles for the FFT-based operators: every entry is
//! `M[j][l] = (1/N) Σ_k σ(k) e^{ik(x_j - x_l)}` summed over `|k| < N/2`,
//! with no transform involved.

use num_complex::Complex64;

use super::GridSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    /// Row-major `n × n` entries.
    matrix: Vec<f64>,
}

impl DenseOperator {
    pub fn from_symbol(grid: GridSpec, symbol: impl Fn(i64) -> Complex64) -> Self {
        let n = grid.n_points();
        let x = grid.nodes();
        let kmax = (n / 2) as i64 - 1;
        let mut matrix = vec![0.0; n * n];
        for j in 0..n {
            for l in 0..n {
                let d = x[j] - x[l];
                let mut acc = Complex64::new(0.0, 0.0);
                for k in -kmax..=kmax {
                    acc += symbol(k) * Complex64::from_polar(1.0, k as f64 * d);
                }
                matrix[j * n + l] = acc.re / n as f64;
            }
        }
        Self { n, matrix }
    }

    pub fn hilbert(grid: GridSpec) -> Self {
        Self::from_symbol(grid, |k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    pub fn lambda_pow(grid: GridSpec, s: f64) -> Self {
        Self::from_symbol(grid, |k| {
            if k == 0 {
                Complex64::new(if s == 0.0 { 1.0 } else { 0.0 }, 0.0)
            } else {
                Complex64::new((k.abs() as f64).powf(s), 0.0)
            }
        })
    }

    pub fn derivative(grid: GridSpec, order: u32) -> Self {
        Self::from_symbol(grid, |k| Complex64::new(0.0, k as f64).powu(order))
    }

    /// Pointwise multiplication by the given samples.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut matrix = vec![0.0; n * n];
        for (j, v) in values.iter().enumerate() {
            matrix[j * n + j] = *v;
        }
        Self { n, matrix }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.n + col]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.matrix
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.matrix[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    matrix[i * n + j] += a * other.matrix[k * n + j];
                }
            }
        }
        Self { n, matrix }
    }

    pub fn minus(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            matrix: self.matrix.iter().zip(&other.matrix).map(|(a, b)| a - b).collect(),
        }
    }

    /// `A·diag(h) - diag(h)·A`, the dense form of `[A, h]`.
    pub fn commutator_with(&self, h: &[f64]) -> Self {
        let d = Self::diagonal(h);
        self.compose(&d).minus(&d.compose(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_derivative_of_sine() {
        let g = GridSpec::new(16).unwrap();
        let x = g.nodes();
        let s: Vec<f64> = x.iter().map(|v| (2.0 * v).sin()).collect();
        let d = DenseOperator::derivative(g, 1).apply(&s);
        for (j, v) in d.iter().enumerate() {
            assert!((v - 2.0 * (2.0 * x[j]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_commutes_with_constant() {
        let g = GridSpec::new(8).unwrap();
        let c = DenseOperator::lambda_pow(g, 1.0).commutator_with(&[3.0; 8]);
        assert!(c.matrix.iter().all(|v| v.abs() < 1e-13));
    }
}
