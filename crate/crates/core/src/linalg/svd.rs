//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Column pairs are rotated until mutually orthogonal; the singular values are
//! then the column norms. Small singular values keep high relative accuracy,
//! which forming `M†M` would square away.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::{LinalgError, Tolerances};

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    singular_values_with(m, &Tolerances::default())
}

/// All singular values in ascending order.
pub fn singular_values_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 });
    }
    let n = m.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|c| m.column(c)).collect();
    let eps = f64::EPSILON;
    let threshold = eps * n as f64;
    // Columns below this norm are rounding noise of the dominant ones and can
    // never be made orthogonal to them to relative precision.
    let negligible = (eps * m.frobenius_norm()).powi(2);

    let mut converged = n == 1;
    for _ in 0..tol.jacobi_max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = cols[p][i];
                    let y = cols[q][i] * phase;
                    cols[p][i] = x * c - y * s;
                    cols[q][i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NonConvergence {
            iterations: tol.jacobi_max_sweeps,
        });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}

pub fn min_singular_value(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(m)?[0])
}
