//! Eigensystems of the beam-splitter Hamiltonian.
//!
//! The analytic spectrum is an evenly spaced ladder
//! `λ_r = (ω₀ − iΓ/2)N + r·Δλ`, `r ∈ {−N/2, …, N/2}`, with gap
//! `Δλ = √(4νν′ − Γ²)`. Eigenvectors follow from two SU(2) boosts,
//! `e^{−iθĴ₋}·e^{−iφĴ₊}·e_r`, where θ is the root of `νθ² + Γθ + ν′ = 0` that
//! removes the Ĵ₋ term and `φ = ν/(2θν + Γ)` removes the remaining Ĵ₊ term.
//! At `Δλ = 0` all N+1 eigenpairs coalesce into an exceptional point of order
//! N+1 and φ diverges.
//!
//! The numeric path ([`numeric_spectrum`]) never uses these formulas: it runs
//! the shifted-QR eigensolver on the assembled matrix and re-solves in
//! multiprecision when the double-precision spectrum is clustered, since an
//! order-k cluster is only resolved to roughly `ε^{1/k}`.

mod fit;
mod numeric;

pub use fit::{default_eps_grid, ep_exponent_fit, random_perturbation, ExponentFit, FitMode};
pub use numeric::{
    eigenvalue_spread, locate_coalescence, numeric_spectrum, numeric_spectrum_with, spin_projections,
    Coalescence, SpectrumConfig, SpectrumResult, SpinRow, SweepAxis,
};

use num_complex::Complex64;

use crate::linalg::{fix_phase, ladder_exp, lexicographic_order, ComplexMatrix, LinalgError, Tolerances};
use crate::model::{couplings, j_minus, j_plus, Couplings, ModelError, ModelParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("gamma out of range: {gamma} exceeds 2*nu0 = {limit}")]
    GammaOutOfRange { gamma: f64, limit: f64 },
    #[error("at exceptional point: |delta_lambda| = {magnitude:e}")]
    AtExceptionalPoint { magnitude: f64 },
    #[error("parameters are not at an exceptional point: |delta_lambda| = {magnitude:e}")]
    NotAtExceptionalPoint { magnitude: f64 },
    #[error("fit unreliable: {reason}")]
    FitUnreliable { reason: String },
}

/// Critical values and order of the exceptional point for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpReport {
    /// Dissipation at which the spectrum coalesces for the given η.
    pub gamma_c: f64,
    /// Non-reciprocity at which the spectrum coalesces for the given Γ;
    /// `None` when Γ > 2ν₀.
    pub eta_c: Option<f64>,
    pub order: usize,
}

pub fn ep_report(params: &ModelParams) -> Result<EpReport, SpectrumError> {
    params.validate()?;
    let eta_c = match critical_eta(params.nu0, params.gamma) {
        Ok(e) => Some(e),
        Err(SpectrumError::GammaOutOfRange { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(EpReport {
        gamma_c: critical_gamma(params.nu0, params.eta),
        eta_c,
        order: params.n_photons + 1,
    })
}

/// `a·b` as an unevaluated sum `hi + lo` carrying the exact product.
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

/// `4νν′ − Γ²` with the products carried exactly, so the cancellation at the
/// exceptional point leaves only the rounding of the inputs themselves.
pub fn discriminant(params: &ModelParams) -> f64 {
    let Couplings { nu, nu_prime } = couplings(params);
    let (p, pe) = two_product(nu, nu_prime);
    let (g, ge) = two_product(params.gamma, params.gamma);
    (4.0 * p - g) + (4.0 * pe - ge)
}

/// Principal square root of a real number, as a complex value.
fn principal_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// Adjacent eigenvalue gap `√(4νν′ − Γ²)`: real below the critical
/// dissipation, imaginary above it.
pub fn delta_lambda(params: &ModelParams) -> Complex64 {
    principal_sqrt(discriminant(params))
}

/// Common centre `(ω₀ − iΓ/2)N` of the eigenvalue ladder.
pub fn spectral_center(params: &ModelParams) -> Complex64 {
    Complex64::new(params.omega0, -params.gamma / 2.0) * params.n_photons as f64
}

/// Closed-form eigenvalues, sorted lexicographically.
pub fn analytic_eigenvalues(params: &ModelParams) -> Vec<Complex64> {
    let n = params.n_photons;
    let c = spectral_center(params);
    let dl = delta_lambda(params);
    let values: Vec<Complex64> = (0..=n).map(|k| c + dl * (k as f64 - n as f64 / 2.0)).collect();
    let order = lexicographic_order(&values, Tolerances::default().ordering_tolerance);
    order.into_iter().map(|i| values[i]).collect()
}

/// Γ_c = 2ν₀√(1−η²).
pub fn critical_gamma(nu0: f64, eta: f64) -> f64 {
    2.0 * nu0 * (1.0 - eta * eta).sqrt()
}

/// η_c = √(4ν₀² − Γ²)/(2ν₀), defined for 0 ≤ Γ ≤ 2ν₀.
pub fn critical_eta(nu0: f64, gamma: f64) -> Result<f64, SpectrumError> {
    let limit = 2.0 * nu0;
    if !(gamma >= 0.0 && gamma <= limit) {
        return Err(SpectrumError::GammaOutOfRange { gamma, limit });
    }
    let (p, pe) = two_product(limit, limit);
    let (g, ge) = two_product(gamma, gamma);
    let d = ((p - g) + (pe - ge)).max(0.0);
    Ok(d.sqrt() / limit)
}

/// Eigenvector columns from the two-boost construction, ordered to match
/// [`analytic_eigenvalues`]. Each column has unit norm and the standard phase.
pub fn analytic_eigenvectors(params: &ModelParams) -> Result<ComplexMatrix, SpectrumError> {
    analytic_eigenvectors_with(params, &SpectrumConfig::default())
}

pub fn analytic_eigenvectors_with(params: &ModelParams, cfg: &SpectrumConfig) -> Result<ComplexMatrix, SpectrumError> {
    params.validate()?;
    let n = params.n_photons;
    let disc = discriminant(params);
    let magnitude = disc.abs().sqrt();
    if magnitude <= cfg.degeneracy_threshold {
        return Err(SpectrumError::AtExceptionalPoint { magnitude });
    }
    let Couplings { nu, .. } = couplings(params);
    // root = 2θν + Γ = √(Γ² − 4νν′)
    let root = principal_sqrt(-disc);
    let theta = (root - params.gamma) / (2.0 * nu);
    let phi = Complex64::new(nu, 0.0) / root;
    let minus_i = Complex64::new(0.0, -1.0);
    let transform = ladder_exp(&j_minus(n), minus_i * theta)?.matmul(&ladder_exp(&j_plus(n), minus_i * phi)?);

    // Column m carries eigenvalue c − i·root·(m − N/2).
    let c = spectral_center(params);
    let values: Vec<Complex64> = (0..=n).map(|m| c + minus_i * root * (m as f64 - n as f64 / 2.0)).collect();
    let order = lexicographic_order(&values, cfg.tolerances.ordering_tolerance);
    let mut out = ComplexMatrix::zeros(n + 1);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = transform.column(src);
        let big = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in col.iter_mut() {
            *z /= big;
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in col.iter_mut() {
            *z /= norm;
        }
        fix_phase(&mut col, cfg.tolerances.phase_threshold);
        out.set_column(dst, &col);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexVector;
    use crate::model::{hamiltonian, j_x};

    fn params(n: usize, eta: f64, gamma: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, eta, gamma, n).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn hermitian_ladder() {
        let got = analytic_eigenvalues(&params(4, 0.0, 0.0));
        for (k, v) in got.iter().enumerate() {
            assert!(close(*v, Complex64::new(2.0 * k as f64, 0.0), 1e-14), "{got:?}");
        }
    }

    #[test]
    fn fivefold_coalescence() {
        for v in analytic_eigenvalues(&params(4, 0.0, 2.0)) {
            assert_eq!(v, Complex64::new(4.0, -4.0));
        }
    }

    #[test]
    fn unidirectional_ladder_is_imaginary() {
        // ν′ = 0 makes H lower triangular with diagonal 2 − 0.5i·m.
        let got = analytic_eigenvalues(&params(2, 1.0, 0.5));
        let want = [Complex64::new(2.0, -1.0), Complex64::new(2.0, -0.5), Complex64::new(2.0, 0.0)];
        for (g, w) in got.iter().zip(want) {
            assert!(close(*g, w, 1e-15), "{got:?}");
        }
    }

    #[test]
    fn gap_examples() {
        assert_eq!(delta_lambda(&params(1, 0.0, 0.0)), Complex64::new(2.0, 0.0));
        assert_eq!(delta_lambda(&params(1, 0.0, 2.0)), Complex64::new(0.0, 0.0));
        assert_eq!(delta_lambda(&params(1, 1.0, 1.0)), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_gamma(1.0, 0.0), 2.0);
        assert_eq!(critical_gamma(1.0, 1.0), 0.0);
        assert!((critical_eta(1.0, 1.5).unwrap() - 0.66144).abs() < 1e-5);
        assert!((critical_eta(1.0, 1.7).unwrap() - 0.52678).abs() < 1e-5);
        assert_eq!(critical_eta(1.0, 2.0).unwrap(), 0.0);
        assert!(matches!(critical_eta(1.0, 2.5), Err(SpectrumError::GammaOutOfRange { .. })));
    }

    #[test]
    fn report_orders() {
        let r = ep_report(&params(4, 0.0, 0.0)).unwrap();
        assert_eq!(r.gamma_c, 2.0);
        assert_eq!(r.eta_c, Some(1.0));
        assert_eq!(r.order, 5);
        assert_eq!(ep_report(&params(4, 0.0, 3.0)).unwrap().eta_c, None);
    }

    #[test]
    fn branch_sign_leaves_set_invariant() {
        let p = params(3, 0.3, 0.7);
        let c = spectral_center(&p);
        let dl = delta_lambda(&p);
        let mut flipped: Vec<Complex64> = (0..=3).map(|k| c - dl * (k as f64 - 1.5)).collect();
        crate::linalg::sort_lexicographic(&mut flipped, 1e-9);
        let got = analytic_eigenvalues(&p);
        for (a, b) in got.iter().zip(&flipped) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        for &(n, eta, gamma) in &[(1, 0.0, 1.0), (4, 0.3, 0.5), (3, 0.9, 3.0), (6, 0.5, 1.0)] {
            let p = params(n, eta, gamma);
            let h = hamiltonian(&p);
            let v = analytic_eigenvectors(&p).unwrap();
            let lambdas = analytic_eigenvalues(&p);
            for (k, l) in lambdas.iter().enumerate() {
                let col = ComplexVector::new(v.column(k)).unwrap();
                let hv = h.mul_vec(&col);
                let res: f64 = (0..=n).map(|i| (hv[i] - l * col[i]).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-10, "N={n} eta={eta} gamma={gamma} col {k}: {res:e}");
            }
        }
    }

    #[test]
    fn hermitian_limit_eigenvectors_are_real_and_orthogonal() {
        let p = params(3, 0.0, 0.0);
        let v = analytic_eigenvectors(&p).unwrap();
        assert!(v.as_slice().iter().all(|z| z.im.abs() < 1e-14));
        let gram = v.adjoint().matmul(&v);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-13);
        let jx = j_x(3).scale(Complex64::new(2.0, 0.0));
        let d = v.adjoint().matmul(&jx).matmul(&v);
        for k in 0..4 {
            assert!((d[(k, k)].re - (2.0 * k as f64 - 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvectors_refuse_the_exceptional_point() {
        assert!(matches!(
            analytic_eigenvectors(&params(4, 0.0, 2.0)),
            Err(SpectrumError::AtExceptionalPoint { .. })
        ));
    }
}
