//! Evolution operator `Ĝ(z) = e^{−iĤz}` in Wei-Norman form,
//!
//! `Ĝ(z) = e^{−i(ω₀−iΓ/2)Nz}·e^{−if₊Ĵ₊}·e^{−if_zĴ_z}·e^{−if₋Ĵ₋}`,
//!
//! with closed-form coefficients written through `u = zΔλ/2`,
//! `S = sin u/Δλ` and `D = cos u + Γ·S`:
//! `f₊ = 2νS/D`, `f₋ = 2ν′S/D`, `f_z = −2i·ln D`.
//! Both S and D are even in Δλ, hence real for real parameters, and the Ĵ_z
//! factor reduces to `diag(D^{N−2m})`, an integer power with no branch cut.
//! The factorization breaks down only at isolated zeros of D, where the
//! operator itself stays finite and the dense exponential takes over.

mod series;

pub use series::unidirectional_series;

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::linalg::{expm, ladder_exp, with_precision, ComplexMatrix, ComplexVector, LinalgError, Matrix, MpFloat, RealScalar};
use crate::model::{couplings, hamiltonian, j_plus_in, Couplings, ModelError, ModelParams};
use crate::spectrum::discriminant;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagatorError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("factorization singular at z = {z}: |D| = {d_modulus:e}")]
    FactorizationSingular { z: f64, d_modulus: f64 },
    #[error("state annihilated at z = {z}: survival {survival:e}")]
    StateAnnihilated { z: f64, survival: f64 },
    #[error("outside asymptotic regime: epsilon = {epsilon} exceeds 0.1")]
    OutsideAsymptoticRegime { epsilon: f64 },
    #[error("invalid propagation distance {z}")]
    InvalidDistance { z: f64 },
    #[error("invalid z grid: {0}")]
    InvalidGrid(String),
    #[error("initial state: {0}")]
    InvalidState(String),
    #[error("dissipation must be positive for the unidirectional expansion")]
    ZeroDissipation,
}

/// Thresholds of the factorized propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    /// Below this |Δλ·z| the exceptional-point expansions of S and D are used.
    pub ep_limit: f64,
    /// |D| at or below which the factorization is reported singular.
    pub singular_threshold: f64,
    /// |D| at or below which the auto backend switches to the dense exponential.
    pub auto_fallback: f64,
    /// Below this |D| the factor product is evaluated in multiprecision,
    /// since the nilpotent factors grow like 1/D and cancel in the product.
    pub multiprecision_below: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            ep_limit: 1e-6,
            singular_threshold: 1e-12,
            auto_fallback: 1e-6,
            multiprecision_below: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeiNormanFactors {
    pub f_plus: Complex64,
    pub f_z: Complex64,
    pub f_minus: Complex64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    WeiNorman,
    Expm,
    #[default]
    Auto,
}

/// `(S, D)` from the discriminant `Δλ² = 4νν′ − Γ²`.
fn sine_and_denominator<T: RealScalar>(disc: &T, gamma: &T, z: &T, ep_limit: f64) -> (T, T) {
    let two = T::from_f64(2.0);
    let zero = T::zero();
    let w = z.clone() * z.clone() * disc.clone() / T::from_f64(4.0);
    let (s, c) = if w.abs() * T::from_f64(4.0) <= T::from_f64(ep_limit * ep_limit) {
        // u² = w is tiny: leading terms of sin u/Δλ and cos u.
        let s = z.clone() / two.clone() * (T::one() - w.clone() / T::from_f64(6.0) + w.clone() * w.clone() / T::from_f64(120.0));
        let c = T::one() - w.clone() / two + w.clone() * w / T::from_f64(24.0);
        (s, c)
    } else if *disc > zero {
        let delta = disc.sqrt();
        let u = z.clone() * delta.clone() / two;
        (u.sin() / delta, u.cos())
    } else {
        let kappa = (-disc.clone()).sqrt();
        let u = z.clone() * kappa.clone() / two;
        (u.sinh() / kappa, u.cosh())
    };
    let d = c + gamma.clone() * s.clone();
    (s, d)
}

fn closed_form(nu: f64, nu_prime: f64, gamma: f64, disc: f64, z: f64, cfg: &PropagatorConfig) -> (WeiNormanFactors, f64) {
    let (s, d) = sine_and_denominator(&disc, &gamma, &z, cfg.ep_limit);
    let ln_d = Complex64::new(d.abs().ln(), if d < 0.0 { std::f64::consts::PI } else { 0.0 });
    let factors = WeiNormanFactors {
        f_plus: Complex64::new(2.0 * nu * s / d, 0.0),
        f_z: Complex64::new(0.0, -2.0) * ln_d,
        f_minus: Complex64::new(2.0 * nu_prime * s / d, 0.0),
        z,
    };
    (factors, d)
}

/// Closed-form factors for arbitrary real couplings, including values outside
/// the physical parameter range (used to differentiate in η across η = 1).
#[cfg(test)]
pub(crate) fn factors_from_couplings(nu: f64, nu_prime: f64, gamma: f64, z: f64) -> WeiNormanFactors {
    let (p, pe) = (nu * nu_prime, nu.mul_add(nu_prime, -(nu * nu_prime)));
    let (g, ge) = (gamma * gamma, gamma.mul_add(gamma, -(gamma * gamma)));
    let disc = (4.0 * p - g) + (4.0 * pe - ge);
    closed_form(nu, nu_prime, gamma, disc, z, &PropagatorConfig::default()).0
}

pub fn f_factors(params: &ModelParams, z: f64) -> Result<WeiNormanFactors, PropagatorError> {
    f_factors_with(params, z, &PropagatorConfig::default())
}

pub fn f_factors_with(params: &ModelParams, z: f64, cfg: &PropagatorConfig) -> Result<WeiNormanFactors, PropagatorError> {
    params.validate()?;
    if !z.is_finite() {
        return Err(PropagatorError::InvalidDistance { z });
    }
    let Couplings { nu, nu_prime } = couplings(params);
    let (factors, d) = closed_form(nu, nu_prime, params.gamma, discriminant(params), z, cfg);
    if d.abs() <= cfg.singular_threshold {
        return Err(PropagatorError::FactorizationSingular { z, d_modulus: d.abs() });
    }
    Ok(factors)
}

/// The value of D at distance z.
pub fn denominator(params: &ModelParams, z: f64) -> f64 {
    let cfg = PropagatorConfig::default();
    sine_and_denominator(&discriminant(params), &params.gamma, &z, cfg.ep_limit).1
}

/// Right-hand side of the coupled Riccati system,
/// returned as `(∂f₋, ∂f₊, ∂f_z)`.
pub fn f_ode_rhs(params: &ModelParams, factors: &WeiNormanFactors) -> (Complex64, Complex64, Complex64) {
    let Couplings { nu, nu_prime } = couplings(params);
    let i = Complex64::i();
    let df_minus = nu_prime * (-i * factors.f_z).exp();
    let df_plus = nu + nu_prime * factors.f_plus * factors.f_plus - params.gamma * factors.f_plus;
    let df_z = -i * params.gamma + 2.0 * i * nu_prime * factors.f_plus;
    (df_minus, df_plus, df_z)
}

/// Factor product in arithmetic `T`; `disc` must be `4νν′ − Γ²` in `T`.
fn wei_norman_in<T: RealScalar>(params: &ModelParams, z: f64, disc: T, cfg: &PropagatorConfig) -> Result<ComplexMatrix, PropagatorError> {
    let n = params.n_photons;
    let Couplings { nu, nu_prime } = couplings(params);
    let gamma = T::from_f64(params.gamma);
    let zt = T::from_f64(z);
    let (s, d) = sine_and_denominator(&disc, &gamma, &zt, cfg.ep_limit);
    let d_modulus = d.abs().to_f64();
    if d_modulus <= cfg.singular_threshold {
        return Err(PropagatorError::FactorizationSingular { z, d_modulus });
    }
    let two = T::from_f64(2.0);
    let f_plus = two.clone() * T::from_f64(nu) * s.clone() / d.clone();
    let f_minus = two * T::from_f64(nu_prime) * s / d.clone();
    let jp: Matrix<T> = j_plus_in(n);
    let lower = ladder_exp(&jp, Complex::new(T::zero(), -f_plus))?;
    let upper = ladder_exp(&jp.transpose(), Complex::new(T::zero(), -f_minus))?;

    // e^{−i(ω₀−iΓ/2)Nz}·D^{N−2m}, combined in log space.
    let nf = T::from_f64(n as f64);
    let ln_d = d.abs().ln();
    let decay = -(gamma * nf.clone() * zt.clone()) / T::from_f64(2.0);
    let angle = -(T::from_f64(params.omega0) * nf * zt);
    let (cos_a, sin_a) = (angle.cos(), angle.sin());
    let negative = d < T::zero();
    let diag: Vec<Complex<T>> = (0..=n)
        .map(|m| {
            let power = n as i64 - 2 * m as i64;
            let mag = (decay.clone() + T::from_f64(power as f64) * ln_d.clone()).exp();
            let mag = if negative && power % 2 != 0 { -mag } else { mag };
            Complex::new(cos_a.clone() * mag.clone(), sin_a.clone() * mag)
        })
        .collect();

    let mut g = Matrix::<T>::zeros(n + 1);
    for r in 0..=n {
        for c in 0..=n {
            let mut acc = Complex::<T>::zero();
            // lower is lower triangular, upper is upper triangular
            for k in 0..=r.min(c) {
                acc = acc + lower[(r, k)].clone() * diag[k].clone() * upper[(k, c)].clone();
            }
            g[(r, c)] = acc;
        }
    }
    Ok(g.to_f64())
}

/// Wei-Norman product in double precision, or in multiprecision with
/// enough guard bits to absorb the cancellation when |D| is small.
fn wei_norman(params: &ModelParams, z: f64, cfg: &PropagatorConfig) -> Result<ComplexMatrix, PropagatorError> {
    let d = denominator(params, z).abs();
    if d <= cfg.singular_threshold {
        return Err(PropagatorError::FactorizationSingular { z, d_modulus: d });
    }
    if d >= cfg.multiprecision_below {
        return wei_norman_in(params, z, discriminant(params), cfg);
    }
    let lost = (1.0 / d).log2().ceil() as u32;
    let bits = 128 + (params.n_photons as u32 + 2) * lost;
    with_precision(bits, || {
        let Couplings { nu, nu_prime } = couplings(params);
        let four = MpFloat::from_f64(4.0);
        let g = MpFloat::from_f64(params.gamma);
        let disc = four * MpFloat::from_f64(nu) * MpFloat::from_f64(nu_prime) - g.clone() * g;
        wei_norman_in(params, z, disc, cfg)
    })
}

pub fn propagator(params: &ModelParams, z: f64, backend: Backend) -> Result<ComplexMatrix, PropagatorError> {
    propagator_with(params, z, backend, &PropagatorConfig::default())
}

pub fn propagator_with(params: &ModelParams, z: f64, backend: Backend, cfg: &PropagatorConfig) -> Result<ComplexMatrix, PropagatorError> {
    params.validate()?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(PropagatorError::InvalidDistance { z });
    }
    match backend {
        Backend::WeiNorman => wei_norman(params, z, cfg),
        Backend::Expm => Ok(expm(&hamiltonian(params).scale(Complex64::new(0.0, -z)))?),
        Backend::Auto => {
            if denominator(params, z).abs() <= cfg.auto_fallback {
                propagator_with(params, z, Backend::Expm, cfg)
            } else {
                wei_norman(params, z, cfg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub z: f64,
    /// Unnormalized amplitudes Ĝ(z)·ψ₀.
    pub amplitudes: ComplexVector,
    /// Squared norm of the unnormalized state.
    pub survival: f64,
    /// Post-selected occupation P(m) = |ψ_m|²/survival.
    pub occupation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ModelParams,
    pub points: Vec<TrajectoryPoint>,
}

pub fn evolve(params: &ModelParams, initial: &ComplexVector, z_grid: &[f64]) -> Result<Trajectory, PropagatorError> {
    evolve_with(params, initial, z_grid, Backend::Auto)
}

/// Propagates `initial` to every z in `z_grid` and post-selects on survival.
pub fn evolve_with(
    params: &ModelParams,
    initial: &ComplexVector,
    z_grid: &[f64],
    backend: Backend,
) -> Result<Trajectory, PropagatorError> {
    params.validate()?;
    if initial.dim() != params.dim() {
        return Err(PropagatorError::InvalidState(format!(
            "dimension {} does not match N+1 = {}",
            initial.dim(),
            params.dim()
        )));
    }
    if !(initial.norm_sqr() > 0.0) {
        return Err(PropagatorError::InvalidState("zero norm".into()));
    }
    if z_grid.is_empty() || !(z_grid[0] >= 0.0) || z_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(PropagatorError::InvalidGrid(
            "z values must be non-negative and strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let g = propagator(params, z, backend)?;
        let amplitudes = g.mul_vec(initial);
        let survival = amplitudes.norm_sqr();
        if !(survival >= 1e-300 && survival.is_finite()) {
            return Err(PropagatorError::StateAnnihilated { z, survival });
        }
        let raw: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr() / survival).collect();
        let total: f64 = raw.iter().sum();
        let occupation = raw.into_iter().map(|p| p / total).collect();
        points.push(TrajectoryPoint {
            z,
            amplitudes,
            survival,
            occupation,
        });
    }
    Ok(Trajectory {
        params: *params,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fock_state, j_plus, noon_state};

    fn params(n: usize, eta: f64, gamma: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, eta, gamma, n).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lossless_reciprocal_quarter_period() {
        let f = f_factors(&params(2, 0.0, 0.0), std::f64::consts::FRAC_PI_4).unwrap();
        assert!(close(f.f_plus, Complex64::new(1.0, 0.0), 1e-14), "{f:?}");
        assert!(close(f.f_minus, Complex64::new(1.0, 0.0), 1e-14));
        assert!(close(f.f_z, Complex64::new(0.0, 2f64.ln()), 1e-14));
    }

    #[test]
    fn unidirectional_unit_loss() {
        let f = f_factors(&params(2, 1.0, 1.0), 1.0).unwrap();
        assert!(close(f.f_plus, Complex64::new(2.0 * (1.0 - (-1f64).exp()), 0.0), 1e-14), "{f:?}");
        assert!(close(f.f_z, Complex64::new(0.0, -1.0), 1e-14));
        assert_eq!(f.f_minus, Complex64::zero());
    }

    #[test]
    fn origin_is_zero() {
        for &(eta, gamma) in &[(0.0, 0.0), (0.5, 1.0), (1.0, 3.0), (0.0, 2.0)] {
            let f = f_factors(&params(3, eta, gamma), 0.0).unwrap();
            assert_eq!((f.f_plus, f.f_z, f.f_minus), (Complex64::zero(), Complex64::zero(), Complex64::zero()));
        }
    }

    #[test]
    fn ode_rhs_at_origin_and_unidirectional() {
        let p = params(2, 0.5, 0.7);
        let zero = WeiNormanFactors {
            f_plus: Complex64::zero(),
            f_z: Complex64::zero(),
            f_minus: Complex64::zero(),
            z: 0.0,
        };
        let (dm, dp, dz) = f_ode_rhs(&p, &zero);
        assert_eq!((dm, dp, dz), (Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0), Complex64::new(0.0, -0.7)));
        let p = params(2, 1.0, 0.7);
        let f = WeiNormanFactors {
            f_plus: Complex64::new(0.3, 0.0),
            f_z: Complex64::new(0.1, -0.2),
            f_minus: Complex64::zero(),
            z: 1.0,
        };
        let (dm, dp, dz) = f_ode_rhs(&p, &f);
        assert_eq!(dm, Complex64::zero());
        assert!(close(dp, Complex64::new(2.0 - 0.7 * 0.3, 0.0), 1e-15));
        assert_eq!(dz, Complex64::new(0.0, -0.7));
    }

    #[test]
    fn closed_form_matches_ode_by_finite_differences() {
        let h = 1e-5;
        for &(eta, gamma, z) in &[(0.0, 0.5, 0.7), (0.3, 2.5, 1.1), (1.0, 1.0, 2.0), (0.0, 2.0, 1.5), (0.6, 0.2, 3.0)] {
            let p = params(3, eta, gamma);
            let f = f_factors(&p, z).unwrap();
            let a = f_factors(&p, z + h).unwrap();
            let b = f_factors(&p, z - h).unwrap();
            let (dm, dp, dz) = f_ode_rhs(&p, &f);
            assert!(close((a.f_minus - b.f_minus) / (2.0 * h), dm, 1e-6));
            assert!(close((a.f_plus - b.f_plus) / (2.0 * h), dp, 1e-6));
            assert!(close((a.f_z - b.f_z) / (2.0 * h), dz, 1e-6));
        }
    }

    #[test]
    fn identity_at_origin() {
        let p = params(4, 0.3, 1.0);
        for backend in [Backend::WeiNorman, Backend::Expm, Backend::Auto] {
            let g = propagator(&p, 0.0, backend).unwrap();
            assert!(g.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-15, "{backend:?}");
        }
    }

    #[test]
    fn unitary_when_hermitian() {
        let g = propagator(&params(5, 0.0, 0.0), 2.3, Backend::WeiNorman).unwrap();
        assert!(g.adjoint().matmul(&g).max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
    }

    #[test]
    fn unidirectional_lossless_is_nilpotent_polynomial() {
        let p = params(3, 1.0, 0.0);
        let z = 0.8;
        let g = propagator(&p, z, Backend::WeiNorman).unwrap();
        let poly = ladder_exp(&j_plus(3), Complex64::new(0.0, -2.0 * z)).unwrap();
        let want = poly.scale(Complex64::new(0.0, -3.0 * z).exp());
        assert!(g.max_abs_diff(&want) < 1e-13);
        assert!((0..4).all(|r| (r + 1..4).all(|c| g[(r, c)] == Complex64::zero())));
        assert!(g.max_abs_diff(&propagator(&p, z, Backend::Expm).unwrap()) < 1e-12);
    }

    #[test]
    fn singular_factorization_is_reported_and_avoided() {
        // Γ = 0, η = 0: D = cos z vanishes at z = π/2.
        let p = params(2, 0.0, 0.0);
        let z = std::f64::consts::FRAC_PI_2;
        assert!(matches!(
            propagator(&p, z, Backend::WeiNorman),
            Err(PropagatorError::FactorizationSingular { .. })
        ));
        let auto = propagator(&p, z, Backend::Auto).unwrap();
        assert!(auto.max_abs_diff(&propagator(&p, z, Backend::Expm).unwrap()) < 1e-14);
    }

    #[test]
    fn near_pole_product_stays_accurate() {
        let p = params(6, 0.0, 0.0);
        for dz in [1e-2, 1e-3, 1e-5] {
            let z = std::f64::consts::FRAC_PI_2 - dz;
            let wn = propagator(&p, z, Backend::WeiNorman).unwrap();
            let ex = propagator(&p, z, Backend::Expm).unwrap();
            assert!(wn.max_abs_diff(&ex) < 1e-10, "dz {dz}: {:e}", wn.max_abs_diff(&ex));
        }
    }

    #[test]
    fn noon_start_and_unidirectional_half_point() {
        let p = params(2, 1.0, 0.0);
        let t = evolve(&p, &noon_state(2).unwrap(), &[0.0, 0.5]).unwrap();
        let p0 = &t.points[0].occupation;
        assert!((p0[0] - 0.5).abs() < 1e-15 && p0[1] == 0.0 && (p0[2] - 0.5).abs() < 1e-15);
        let p1 = &t.points[1].occupation;
        let want = [1.0 / 3.0, 2.0 / 3.0, 0.0];
        for (a, b) in p1.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{p1:?}");
        }
    }

    #[test]
    fn hong_ou_mandel_null() {
        let p = params(2, 0.0, 0.0);
        let t = evolve(&p, &fock_state(1, 2).unwrap(), &[std::f64::consts::FRAC_PI_4]).unwrap();
        assert!(t.points[0].occupation[1] <= 1e-10, "{:?}", t.points[0].occupation);
    }

    #[test]
    fn evolve_rejects_bad_input() {
        let p = params(2, 0.0, 1.0);
        let v = noon_state(2).unwrap();
        assert!(matches!(evolve(&p, &v, &[0.0, 0.0]), Err(PropagatorError::InvalidGrid(_))));
        assert!(matches!(evolve(&p, &noon_state(3).unwrap(), &[0.0]), Err(PropagatorError::InvalidState(_))));
        assert!(matches!(
            evolve(&params(4, 0.0, 2.0), &noon_state(4).unwrap(), &[0.0, 400.0]),
            Err(PropagatorError::StateAnnihilated { .. })
        ));
    }
}
