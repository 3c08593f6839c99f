//! 2×2 matrix exponentials for the per-mode linear blocks.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

pub fn identity() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

pub fn real_mat(a: [[f64; 2]; 2]) -> Mat2 {
    a.map(|row| row.map(|v| Complex64::new(v, 0.0)))
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn apply(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Eigenvalues of a real 2×2 matrix, ordered so the first has the larger
/// real part.
pub fn eigenvalues(a: [[f64; 2]; 2]) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a[0][0] + a[1][1]);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = Complex64::new(half_tr * half_tr - det, 0.0).sqrt();
    let l1 = Complex64::new(half_tr, 0.0) + disc;
    let l2 = Complex64::new(half_tr, 0.0) - disc;
    if l1.re >= l2.re {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// `(e^z - 1) / z`, accurate near `z = 0`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.25 {
        // Taylor series; 18 terms reach round-off for |z| < 1/4.
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..20 {
            term *= z / n as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `exp(t·A)` for a matrix with eigenvalues `slow`, `fast`
/// (`Re slow ≥ Re fast`), by the Cayley–Hamilton form `c₀ I + c₁ A`.
///
/// The divided difference is evaluated with [`phi1`], so the formula reduces
/// continuously to the Jordan form `e^{λt}((1 - λt) I + t A)` at a double
/// root.
pub fn expm_with_eigenvalues(a: &Mat2, slow: Complex64, fast: Complex64, t: f64) -> Mat2 {
    let delta = fast - slow;
    let e_slow = (slow * t).exp();
    let c1 = e_slow * t * phi1(delta * t);
    let c0 = e_slow - slow * c1;
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = c1 * a[i][j];
        }
        out[i][i] += c0;
    }
    out
}

pub fn expm_real(a: [[f64; 2]; 2], t: f64) -> Mat2 {
    let (slow, fast) = eigenvalues(a);
    expm_with_eigenvalues(&real_mat(a), slow, fast, t)
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}
