//! Fock-subspace representation of the two-waveguide beam splitter.
//!
//! Basis states are |N−m⟩_a |m⟩_b for m = 0..=N, ordered by ascending m
//! (photons in the lossy guide b). Within this subspace the total number
//! operator is N·I, so it is never built as a matrix.

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::linalg::{ComplexMatrix, ComplexVector, Matrix, RealScalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("photon number must be at least 1")]
    NoPhotons,
    #[error("basis index {m} out of range for N = {n}")]
    IndexOutOfRange { m: usize, n: usize },
}

/// One beam-splitter instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub nu0: f64,
    /// Non-reciprocity in [0, 1]; 1 is unidirectional.
    pub eta: f64,
    /// Dissipation rate of guide b.
    pub gamma: f64,
    pub n_photons: usize,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(omega0: f64, nu0: f64, eta: f64, gamma: f64, n_photons: usize) -> Result<Self, ModelError> {
        let p = ModelParams {
            omega0,
            nu0,
            eta,
            gamma,
            n_photons,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |name, value, reason| Err(ModelError::InvalidParameter { name, value, reason });
        if !self.omega0.is_finite() {
            return bad("omega0", self.omega0, "must be finite");
        }
        if !(self.nu0.is_finite() && self.nu0 > 0.0) {
            return bad("nu0", self.nu0, "must be positive");
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("eta", self.eta, "must lie in [0, 1]");
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad("gamma", self.gamma, "must be non-negative");
        }
        if self.n_photons == 0 {
            return Err(ModelError::NoPhotons);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n_photons + 1
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        ModelParams { gamma, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        ModelParams { eta, ..self }
    }
}

/// Directional couplings ν = ν₀(1+η) and ν′ = ν₀(1−η).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub nu: f64,
    pub nu_prime: f64,
}

pub fn couplings(params: &ModelParams) -> Couplings {
    Couplings {
        nu: params.nu0 * (1.0 + params.eta),
        nu_prime: params.nu0 * (1.0 - params.eta),
    }
}

fn raising_coefficient<T: RealScalar>(n: usize, m: usize) -> T {
    T::from_f64(((n - m) * (m + 1)) as f64).sqrt()
}

/// Raising generator in arithmetic `T`.
pub fn j_plus_in<T: RealScalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n + 1, |r, c| {
        if r == c + 1 {
            Complex::new(raising_coefficient(n, c), T::zero())
        } else {
            Complex::zero()
        }
    })
}

/// Ĵ₊ = b̂†â: maps m → m+1 with amplitude √((N−m)(m+1)). Strictly lower triangular.
pub fn j_plus(n: usize) -> ComplexMatrix {
    j_plus_in(n)
}

/// Ĵ₋ = â†b̂, the transpose of Ĵ₊.
pub fn j_minus(n: usize) -> ComplexMatrix {
    j_plus(n).transpose()
}

/// Ĵ_z = (b̂†b̂ − â†â)/2 = diag(m − N/2).
pub fn j_z(n: usize) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..=n).map(|m| Complex64::new(m as f64 - n as f64 / 2.0, 0.0)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Ĵ_x = (Ĵ₊ + Ĵ₋)/2.
pub fn j_x(n: usize) -> ComplexMatrix {
    j_plus(n).add(&j_minus(n)).scale(Complex64::new(0.5, 0.0))
}

/// Ĵ_y = (Ĵ₊ − Ĵ₋)/(2i).
pub fn j_y(n: usize) -> ComplexMatrix {
    j_plus(n).sub(&j_minus(n)).scale(Complex64::new(0.0, -0.5))
}

/// The effective Hamiltonian in arithmetic `T`.
pub fn hamiltonian_in<T: RealScalar>(params: &ModelParams) -> Matrix<T> {
    let n = params.n_photons;
    let Couplings { nu, nu_prime } = couplings(params);
    let nu = T::from_f64(nu);
    let nu_prime = T::from_f64(nu_prime);
    let onsite = T::from_f64(params.omega0) * T::from_f64(n as f64);
    let gamma = T::from_f64(params.gamma);
    Matrix::from_fn(n + 1, |r, c| {
        if r == c {
            Complex::new(onsite.clone(), -(gamma.clone() * T::from_f64(r as f64)))
        } else if r == c + 1 {
            Complex::new(nu.clone() * raising_coefficient::<T>(n, c), T::zero())
        } else if c == r + 1 {
            Complex::new(nu_prime.clone() * raising_coefficient::<T>(n, r), T::zero())
        } else {
            Complex::zero()
        }
    })
}

/// Tridiagonal Hamiltonian: diagonal ω₀N − iΓm, m → m+1 amplitude
/// ν√((N−m)(m+1)), m → m−1 amplitude ν′√(m(N−m+1)).
pub fn hamiltonian(params: &ModelParams) -> ComplexMatrix {
    hamiltonian_in(params)
}

/// The same operator assembled from generators:
/// (ω₀ − iΓ/2)N + νĴ₊ + ν′Ĵ₋ − iΓĴ_z.
pub fn hamiltonian_su2(params: &ModelParams) -> ComplexMatrix {
    let n = params.n_photons;
    let Couplings { nu, nu_prime } = couplings(params);
    let scalar = Complex64::new(params.omega0, -params.gamma / 2.0) * n as f64;
    ComplexMatrix::identity(n + 1)
        .scale(scalar)
        .add(&j_plus(n).scale(nu.into()))
        .add(&j_minus(n).scale(nu_prime.into()))
        .add(&j_z(n).scale(Complex64::new(0.0, -params.gamma)))
}

/// (|N,0⟩ + |0,N⟩)/√2.
pub fn noon_state(n: usize) -> Result<ComplexVector, ModelError> {
    if n == 0 {
        return Err(ModelError::NoPhotons);
    }
    let mut v = ComplexVector::zeros(n + 1);
    v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[n] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(v)
}

/// |N−m, m⟩.
pub fn fock_state(m: usize, n: usize) -> Result<ComplexVector, ModelError> {
    if n == 0 {
        return Err(ModelError::NoPhotons);
    }
    if m > n {
        return Err(ModelError::IndexOutOfRange { m, n });
    }
    Ok(ComplexVector::basis(n + 1, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coupling_examples() {
        let p = |eta| ModelParams::new(1.0, 1.0, eta, 0.0, 1).unwrap();
        assert_eq!(couplings(&p(0.0)), Couplings { nu: 1.0, nu_prime: 1.0 });
        assert_eq!(couplings(&p(1.0)), Couplings { nu: 2.0, nu_prime: 0.0 });
        let k = couplings(&p(0.8));
        assert!((k.nu - 1.8).abs() < 1e-15 && (k.nu_prime - 0.2).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(ModelParams::new(1.0, 1.0, 1.2, 0.0, 1).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0, 0.0, 1).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, -1.0, 1).is_err());
        assert_eq!(ModelParams::new(1.0, 1.0, 0.0, 0.0, 0), Err(ModelError::NoPhotons));
    }

    #[test]
    fn spin_half_and_spin_one() {
        let jp = j_plus(1);
        assert_eq!(jp[(1, 0)], c(1.0, 0.0));
        assert_eq!(j_z(1), ComplexMatrix::from_diagonal(&[c(-0.5, 0.0), c(0.5, 0.0)]));
        let jp2 = j_plus(2);
        assert!((jp2[(1, 0)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((jp2[(2, 1)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(j_z(2), ComplexMatrix::from_diagonal(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        assert!(jp2.is_strictly_lower());
    }

    #[test]
    fn single_photon_hamiltonians() {
        let h = hamiltonian(&ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).unwrap());
        assert_eq!(h.to_rows(), vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]);
        let h = hamiltonian(&ModelParams::new(1.0, 1.0, 0.0, 2.0, 1).unwrap());
        assert_eq!(h[(0, 0)], c(1.0, 0.0));
        assert_eq!(h[(1, 1)], c(1.0, -2.0));
        assert_eq!(h[(0, 1)], c(1.0, 0.0));
        assert_eq!(h[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn states() {
        let v = noon_state(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(v.as_slice(), &[c(s, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        assert_eq!(fock_state(1, 2).unwrap().as_slice(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(fock_state(3, 2), Err(ModelError::IndexOutOfRange { m: 3, n: 2 }));
        for n in 1..=20 {
            assert!((noon_state(n).unwrap().norm() - 1.0).abs() < 1e-15);
        }
    }
}
