//! Splitting exponent of the exceptional point.
//!
//! A generic perturbation of size ε splits an order-k exceptional point as
//! ε^{1/k}. Detuning Γ alone is not generic for this model: the gap is
//! √((Γ_c−Γ)(Γ_c+Γ)), a square root for every N.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::numeric::{eig_mp, eigenvalue_spread, SpectrumConfig};
use super::{delta_lambda, SpectrumError};
use crate::linalg::{ComplexMatrix, Matrix, MpFloat, RealScalar};
use crate::model::{hamiltonian_in, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// Γ → Γ_c − ε.
    Gamma,
    /// H → H + ε·B with a seeded random B of unit max-entry.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation of the log-log points from the fitted line.
    pub residual: f64,
}

/// Eleven log-spaced values from 1e-10 to 1e-5.
pub fn default_eps_grid() -> Vec<f64> {
    (0..11).map(|k| 10f64.powf(-10.0 + 0.5 * k as f64)).collect()
}

/// Seeded complex perturbation with entries drawn uniformly from the unit
/// square, rescaled so the largest modulus is 1.
pub fn random_perturbation(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = ComplexMatrix::from_fn(dim, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let big = b.max_norm();
    b.scale(Complex::new(1.0 / big, 0.0))
}

/// Fits `log(spread)` against `log ε` for perturbations away from an
/// exceptional point.
pub fn ep_exponent_fit(
    params: &ModelParams,
    mode: FitMode,
    seed: u64,
    eps_grid: &[f64],
    cfg: &SpectrumConfig,
) -> Result<ExponentFit, SpectrumError> {
    params.validate()?;
    let magnitude = delta_lambda(params).norm();
    if magnitude > 1e-10 {
        return Err(SpectrumError::NotAtExceptionalPoint { magnitude });
    }
    if eps_grid.len() < 2 || eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(SpectrumError::FitUnreliable {
            reason: "perturbation grid needs at least two positive values".into(),
        });
    }
    let bits = cfg.mp_bits(params.dim());
    let b = random_perturbation(params.dim(), seed);

    let mut xs = Vec::with_capacity(eps_grid.len());
    let mut ys = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let d = match mode {
            FitMode::Gamma => {
                let g = params.gamma - eps;
                if g < 0.0 {
                    return Err(SpectrumError::FitUnreliable {
                        reason: format!("detuning {eps:e} drives gamma below zero"),
                    });
                }
                eig_mp(bits, &cfg.tolerances, || hamiltonian_in::<MpFloat>(&params.with_gamma(g)))
            }
            FitMode::Generic => eig_mp(bits, &cfg.tolerances, || {
                let h: Matrix<MpFloat> = hamiltonian_in(params);
                let e = MpFloat::from_f64(eps);
                h.add(&Matrix::<MpFloat>::from_f64(&b).scale(Complex::new(e, MpFloat::from_f64(0.0))))
            }),
        }
        .map_err(|err| SpectrumError::FitUnreliable {
            reason: format!("eigensolver failed at eps = {eps:e}: {err}"),
        })?;
        let spread = eigenvalue_spread(&d.eigenvalues);
        if !(spread > 0.0) {
            return Err(SpectrumError::FitUnreliable {
                reason: format!("no splitting at eps = {eps:e}"),
            });
        }
        xs.push(eps.ln());
        ys.push(spread.ln());
    }

    let fit = least_squares(&xs, &ys);
    if !(fit.residual <= cfg.fit_max_residual) {
        return Err(SpectrumError::FitUnreliable {
            reason: format!("residual {:.3e} exceeds {:.3e}", fit.residual, cfg.fit_max_residual),
        });
    }
    Ok(fit)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> ExponentFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    ExponentFit {
        slope,
        intercept,
        residual,
    }
}
