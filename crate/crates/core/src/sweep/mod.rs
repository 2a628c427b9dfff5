//! Parameter sweeps, figure presets and their CSV tables.
//!
//! Grid points are evaluated in parallel but always assembled in grid order,
//! so output does not depend on the worker count.

mod config;
mod csv;
mod presets;

pub use config::{parse_config, uniform_grid, Axis, ConfigValues, InitialState, Output, SweepSpec};
pub use csv::{format_number, CsvTable};
pub use presets::Preset;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{ModelError, ModelParams};
use crate::propagator::{evolve_with, Backend, PropagatorError};
use crate::spectrum::{numeric_spectrum_with, spin_projections, SpectrumConfig, SpectrumError, SpectrumResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at {axis} = {value}: {source}")]
    Spectrum {
        axis: &'static str,
        value: f64,
        #[source]
        source: SpectrumError,
    },
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::Gamma => "gamma",
        Axis::Eta => "eta",
        Axis::Z => "z",
    }
}

fn apply(axis: Axis, base: &ModelParams, value: f64) -> ModelParams {
    match axis {
        Axis::Gamma => base.with_gamma(value),
        Axis::Eta => base.with_eta(value),
        Axis::Z => *base,
    }
}

/// Runs `f` over `items` on the thread pool and returns results in input
/// order; the first failing item (in order) decides the error.
fn ordered_map<T, R, E>(items: &[T], f: impl Fn(&T) -> Result<R, E> + Sync + Send) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
{
    let results: Vec<Result<R, E>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}

/// Reorders each spectrum so that eigenvalue k continues branch k. Pairs are
/// assigned greedily by ascending distance to each branch's linear
/// extrapolation from the two previous grid points, ties broken by (branch
/// index, current index). Extrapolating rather than reusing the last value
/// keeps branches that fan out of a degeneracy from swapping.
pub fn match_branches(spectra: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(spectra.len());
    for current in spectra {
        let predicted: Vec<Complex64> = match out.as_slice() {
            [] => {
                out.push(current.clone());
                continue;
            }
            [only] => only.clone(),
            [.., before, last] => last.iter().zip(before).map(|(l, b)| 2.0 * l - b).collect(),
        };
        let n = current.len();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for (i, p) in predicted.iter().enumerate() {
            for (j, c) in current.iter().enumerate() {
                pairs.push(((p - c).norm(), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut next = vec![None; n];
        let mut used = vec![false; n];
        for (_, i, j) in pairs {
            if next[i].is_none() && !used[j] {
                next[i] = Some(current[j]);
                used[j] = true;
            }
        }
        out.push(next.into_iter().map(|v| v.expect("complete assignment")).collect());
    }
    out
}

fn spectrum_header(axis: &str, n: usize) -> Vec<String> {
    let mut h = vec![axis.to_string()];
    h.extend((0..=n).map(|k| format!("re_lambda_{k}")));
    h.extend((0..=n).map(|k| format!("im_lambda_{k}")));
    h.push("spread".into());
    h.push("eigvec_min_sv".into());
    h
}

fn spectrum_sweep(spec: &SweepSpec, axis: Axis) -> Result<CsvTable, SweepError> {
    spec.validate()?;
    let cfg = SpectrumConfig::default();
    let grid = spec.grid();
    let results: Vec<SpectrumResult> = ordered_map(&grid, |&x| {
        numeric_spectrum_with(&apply(axis, &spec.base, x), &cfg).map_err(|source| SweepError::Spectrum {
            axis: axis_name(axis),
            value: x,
            source,
        })
    })?;
    let values: Vec<Vec<Complex64>> = results.iter().map(|r| r.eigenvalues.clone()).collect();
    let branches = match_branches(&values);
    let with_eigs = spec.outputs.contains(&Output::Eigenvalues);
    let with_diag = spec.outputs.contains(&Output::Diagnostics);
    let full = spectrum_header(axis_name(axis), spec.base.n_photons);
    let header: Vec<String> = full
        .iter()
        .filter(|h| {
            if h.starts_with("re_") || h.starts_with("im_") {
                with_eigs
            } else if *h == "spread" || *h == "eigvec_min_sv" {
                with_diag
            } else {
                true
            }
        })
        .cloned()
        .collect();
    let mut table = CsvTable::new(header);
    for ((x, r), branch) in grid.iter().zip(&results).zip(&branches) {
        let mut row = vec![*x];
        if with_eigs {
            row.extend(branch.iter().map(|l| l.re));
            row.extend(branch.iter().map(|l| l.im));
        }
        if with_diag {
            row.push(r.eigenvalue_spread);
            row.push(r.eigenvector_min_sv);
        }
        table.push(row);
    }
    Ok(table)
}

/// Eigenvalue branches over a Γ grid.
pub fn run_gamma_sweep(spec: &SweepSpec) -> Result<CsvTable, SweepError> {
    spectrum_sweep(spec, Axis::Gamma)
}

/// Eigenvalue branches over an η grid.
pub fn run_eta_sweep(spec: &SweepSpec) -> Result<CsvTable, SweepError> {
    spectrum_sweep(spec, Axis::Eta)
}

/// Spin expectation values of every eigenmode on the product grid
/// `gammas × etas`, Γ varying slowest.
pub fn run_spin_grid(gammas: &[f64], etas: &[f64], base: &ModelParams) -> Result<CsvTable, SweepError> {
    let cfg = SpectrumConfig::default();
    let points: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| etas.iter().map(move |&e| (g, e))).collect();
    let per_point = ordered_map(&points, |&(gamma, eta)| {
        let p = base.with_gamma(gamma).with_eta(eta);
        p.validate()?;
        spin_projections(&p, &cfg).map_err(|source| SweepError::Spectrum {
            axis: "gamma",
            value: gamma,
            source,
        })
    })?;
    let header = ["gamma", "eta", "r", "jx", "jy", "jz"].map(String::from).to_vec();
    let mut table = CsvTable::new(header);
    for (&(gamma, eta), rows) in points.iter().zip(per_point) {
        for s in rows {
            table.push(vec![gamma, eta, s.r, s.jx, s.jy, s.jz]);
        }
    }
    Ok(table)
}

fn dynamics_header(n: usize) -> Vec<String> {
    let mut h = vec!["z".to_string(), "survival".to_string()];
    h.extend((0..=n).map(|m| format!("p_{m}")));
    h
}

/// Post-selected occupations over a z grid.
pub fn run_dynamics(spec: &SweepSpec) -> Result<CsvTable, SweepError> {
    spec.validate()?;
    if spec.axis != Axis::Z {
        return Err(SweepError::Config("dynamics runs sweep the z axis".into()));
    }
    dynamics_rows(&spec.base, &spec.initial, &spec.grid(), spec.backend, &spec.outputs)
}

fn dynamics_rows(
    params: &ModelParams,
    initial: &InitialState,
    grid: &[f64],
    backend: Backend,
    outputs: &[Output],
) -> Result<CsvTable, SweepError> {
    let psi0 = initial.vector(params.n_photons)?;
    // Chunks keep each worker's z values contiguous; evolve checks ordering.
    let chunk = grid.len().div_ceil(rayon::current_num_threads().max(1)).max(1);
    let chunks: Vec<&[f64]> = grid.chunks(chunk).collect();
    let parts = ordered_map(&chunks, |zs| evolve_with(params, &psi0, zs, backend))?;
    let with_survival = outputs.contains(&Output::Survival);
    let with_occupation = outputs.contains(&Output::Occupation);
    let header: Vec<String> = dynamics_header(params.n_photons)
        .into_iter()
        .filter(|h| match h.as_str() {
            "z" => true,
            "survival" => with_survival,
            _ => with_occupation,
        })
        .collect();
    let mut table = CsvTable::new(header);
    for p in parts.iter().flat_map(|t| &t.points) {
        let mut row = vec![p.z];
        if with_survival {
            row.push(p.survival);
        }
        if with_occupation {
            row.extend(&p.occupation);
        }
        table.push(row);
    }
    Ok(table)
}
