use num_complex::Complex64;

use super::{analytic_eigenvectors_with, delta_lambda, SpectrumError};
use crate::linalg::{eig_with, min_singular_value, with_precision, ComplexMatrix, ComplexVector, EigenDecomposition, Matrix, MpFloat, Tolerances};
use crate::model::{hamiltonian, hamiltonian_in, j_x, j_y, j_z, ModelParams};

/// Thresholds of the spectral layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub tolerances: Tolerances,
    /// |Δλ| at or below which analytic eigenvectors are refused.
    pub degeneracy_threshold: f64,
    /// Re-solve in multiprecision when the smallest pairwise eigenvalue gap
    /// falls below this fraction of the spectral scale.
    pub refine_gap: f64,
    pub mp_min_bits: u32,
    /// Multiprecision mantissa bits per matrix dimension.
    pub mp_bits_per_dim: u32,
    /// Coalescence metric: eigenvalue spread bound.
    pub coalescence_spread: f64,
    /// Coalescence metric: eigenvector-matrix smallest singular value bound.
    pub coalescence_min_sv: f64,
    /// Largest RMS log-log residual accepted by the exponent fit.
    pub fit_max_residual: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            tolerances: Tolerances::default(),
            degeneracy_threshold: 1e-8,
            refine_gap: 0.1,
            mp_min_bits: 256,
            mp_bits_per_dim: 96,
            coalescence_spread: 1e-6,
            coalescence_min_sv: 1e-3,
            fit_max_residual: 0.1,
        }
    }
}

impl SpectrumConfig {
    pub fn mp_bits(&self, dim: usize) -> u32 {
        self.mp_min_bits.max(self.mp_bits_per_dim * dim as u32)
    }
}

/// Numeric eigensystem at one parameter point with coalescence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub params: ModelParams,
    pub eigenvalues: Vec<Complex64>,
    pub right_eigenvectors: ComplexMatrix,
    /// Largest pairwise eigenvalue distance.
    pub eigenvalue_spread: f64,
    /// Smallest singular value of the unit-column eigenvector matrix.
    pub eigenvector_min_sv: f64,
    pub residual: f64,
    /// Mantissa bits of the arithmetic that produced the result.
    pub precision_bits: u32,
}

impl SpectrumResult {
    pub fn is_coalesced(&self, cfg: &SpectrumConfig) -> bool {
        self.eigenvalue_spread <= cfg.coalescence_spread && self.eigenvector_min_sv <= cfg.coalescence_min_sv
    }
}

pub fn eigenvalue_spread(values: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

fn min_gap(values: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Eigendecomposition of a matrix built in multiprecision by `build`.
/// QR converges only linearly on a Jordan block, so the iteration cap grows
/// with the number of digits the deflation test demands.
pub(crate) fn eig_mp(
    bits: u32,
    tol: &Tolerances,
    build: impl FnOnce() -> Matrix<MpFloat>,
) -> Result<EigenDecomposition, SpectrumError> {
    let tol = Tolerances {
        eig_iterations_per_dim: tol.eig_iterations_per_dim * (bits as usize).div_ceil(128),
        ..tol.clone()
    };
    Ok(with_precision(bits, || eig_with(&build(), &tol))?)
}

pub fn numeric_spectrum(params: &ModelParams) -> Result<SpectrumResult, SpectrumError> {
    numeric_spectrum_with(params, &SpectrumConfig::default())
}

/// Runs the eigensolver on the assembled Hamiltonian. Clustered spectra are
/// re-solved in multiprecision from a Hamiltonian assembled in that
/// precision.
pub fn numeric_spectrum_with(params: &ModelParams, cfg: &SpectrumConfig) -> Result<SpectrumResult, SpectrumError> {
    params.validate()?;
    let h = hamiltonian(params);
    let mut d = eig_with(&h, &cfg.tolerances)?;
    let mut bits = f64::MANTISSA_DIGITS;
    let scale = h.norm_one().max(f64::MIN_POSITIVE);
    if params.n_photons >= 1 && min_gap(&d.eigenvalues) < cfg.refine_gap * scale {
        bits = cfg.mp_bits(params.dim());
        d = eig_mp(bits, &cfg.tolerances, || hamiltonian_in::<MpFloat>(params))?;
    }
    Ok(SpectrumResult {
        params: *params,
        eigenvalue_spread: eigenvalue_spread(&d.eigenvalues),
        eigenvector_min_sv: min_singular_value(&d.right_eigenvectors)?,
        eigenvalues: d.eigenvalues,
        right_eigenvectors: d.right_eigenvectors,
        residual: d.residual,
        precision_bits: bits,
    })
}

/// Expectation values of the spin components in one unit right eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRow {
    /// Ladder index r ∈ {−N/2, …, N/2} in eigenvalue order.
    pub r: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

/// Spin portrait of the eigenmodes, in lexicographic eigenvalue order.
/// Uses the boost construction away from the exceptional point and the
/// numeric eigenvectors near it.
pub fn spin_projections(params: &ModelParams, cfg: &SpectrumConfig) -> Result<Vec<SpinRow>, SpectrumError> {
    params.validate()?;
    let n = params.n_photons;
    let vectors = if delta_lambda(params).norm() > cfg.degeneracy_threshold {
        analytic_eigenvectors_with(params, cfg)?
    } else {
        numeric_spectrum_with(params, cfg)?.right_eigenvectors
    };
    let (jx, jy, jz) = (j_x(n), j_y(n), j_z(n));
    Ok((0..=n)
        .map(|k| {
            let v = ComplexVector::new(vectors.column(k)).expect("finite eigenvector");
            SpinRow {
                r: k as f64 - n as f64 / 2.0,
                jx: v.expectation(&jx).re,
                jy: v.expectation(&jy).re,
                jz: v.expectation(&jz).re,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Gamma,
    Eta,
}

impl SweepAxis {
    pub fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        match self {
            SweepAxis::Gamma => base.with_gamma(value),
            SweepAxis::Eta => base.with_eta(value),
        }
    }
}

/// Where a scan first meets the coalescence metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coalescence {
    pub value: f64,
    /// False when the point was found by refining between grid points.
    pub on_grid: bool,
    pub spread: f64,
    pub min_sv: f64,
}

/// Scans `grid` along `axis` and returns the first point meeting the
/// coalescence metric. When no grid point qualifies, the eigenvalue spread is
/// minimized by golden-section search around the best grid point, since the
/// critical value generally lies between grid nodes.
pub fn locate_coalescence(
    base: &ModelParams,
    axis: SweepAxis,
    grid: &[f64],
    cfg: &SpectrumConfig,
) -> Result<Option<Coalescence>, SpectrumError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in grid.iter().enumerate() {
        let s = numeric_spectrum_with(&axis.apply(base, x), cfg)?;
        if s.is_coalesced(cfg) {
            return Ok(Some(Coalescence {
                value: x,
                on_grid: true,
                spread: s.eigenvalue_spread,
                min_sv: s.eigenvector_min_sv,
            }));
        }
        if best.map_or(true, |(_, b)| s.eigenvalue_spread < b) {
            best = Some((i, s.eigenvalue_spread));
        }
    }
    let Some((i, _)) = best else { return Ok(None) };
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let spread_at = |x: f64| -> Result<f64, SpectrumError> {
        Ok(numeric_spectrum_with(&axis.apply(base, x), cfg)?.eigenvalue_spread)
    };
    let x = golden_min(lo, hi, spread_at)?;
    let s = numeric_spectrum_with(&axis.apply(base, x), cfg)?;
    Ok(s.is_coalesced(cfg).then_some(Coalescence {
        value: x,
        on_grid: false,
        spread: s.eigenvalue_spread,
        min_sv: s.eigenvector_min_sv,
    }))
}

fn golden_min(
    mut a: f64,
    mut b: f64,
    mut f: impl FnMut(f64) -> Result<f64, SpectrumError>,
) -> Result<f64, SpectrumError> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { c } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::analytic_eigenvalues;

    fn params(n: usize, eta: f64, gamma: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, eta, gamma, n).unwrap()
    }

    #[test]
    fn hermitian_limit() {
        let s = numeric_spectrum(&params(4, 0.0, 0.0)).unwrap();
        for (k, v) in s.eigenvalues.iter().enumerate() {
            assert!((v - Complex64::new(2.0 * k as f64, 0.0)).norm() < 1e-10);
        }
        assert!((s.eigenvector_min_sv - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coalescence_at_critical_gamma() {
        let s = numeric_spectrum(&params(4, 0.0, 2.0)).unwrap();
        assert!(s.eigenvalue_spread <= 1e-6, "{}", s.eigenvalue_spread);
        assert!(s.eigenvector_min_sv <= 1e-3, "{}", s.eigenvector_min_sv);
    }

    #[test]
    fn real_parts_merge_above_critical_gamma() {
        for k in 0..=40 {
            let g = 0.1 * k as f64;
            let s = numeric_spectrum(&params(4, 0.8, g)).unwrap();
            let re: Vec<f64> = s.eigenvalues.iter().map(|z| z.re).collect();
            let width = re.iter().cloned().fold(f64::MIN, f64::max) - re.iter().cloned().fold(f64::MAX, f64::min);
            if g >= 1.2 + 1e-9 {
                assert!(width < 1e-8, "gamma {g}: {width:e}");
            } else if g < 1.15 {
                assert!(width > 1e-3, "gamma {g}: {width:e}");
            }
        }
    }

    #[test]
    fn numeric_matches_analytic_off_ep() {
        let p = params(5, 0.3, 0.9);
        let s = numeric_spectrum(&p).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(analytic_eigenvalues(&p)) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn spin_rows_hermitian_limit() {
        let rows = spin_projections(&params(2, 0.0, 0.0), &SpectrumConfig::default()).unwrap();
        for (row, r) in rows.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((row.jx - r).abs() < 1e-12 && row.jy.abs() < 1e-12 && row.jz.abs() < 1e-12, "{row:?}");
        }
    }

    #[test]
    fn coalescence_found_between_grid_nodes() {
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.0025).collect();
        let c = locate_coalescence(&params(4, 0.0, 1.7), SweepAxis::Eta, &grid, &SpectrumConfig::default())
            .unwrap()
            .unwrap();
        assert!(!c.on_grid);
        assert!((c.value - 0.52678).abs() < 1e-4, "{c:?}");
    }
}
