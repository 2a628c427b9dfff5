//! Canned scenarios reproducing the reference figures.
//!
//! Dynamics captions quote Γ in units of the critical dissipation of the
//! balanced coupler, Γc = 2ν₀; the `gamma_over_gamma_c` column carries that
//! ratio.

use std::str::FromStr;

use super::config::{uniform_grid, Axis, InitialState, Output, SweepSpec};
use super::{dynamics_rows, ordered_map, run_eta_sweep, run_gamma_sweep, run_spin_grid, CsvTable, SweepError};
use crate::model::ModelParams;
use crate::propagator::Backend;
use crate::spectrum::{critical_eta, critical_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Γ sweeps of the N = 4 spectrum for η ∈ {0, 0.8, 1}.
    Fig2,
    /// η sweeps of the N = 4 spectrum for Γ ∈ {0, 1.7, 2}.
    Fig3,
    /// Spin portraits of N = 4 eigenmodes on a (Γ, η) grid.
    Fig4,
    /// N = 4 NOON dynamics on a 3 × 3 (Γ/Γc, η) grid.
    Fig5,
    /// N = 2 NOON dynamics on the same grid.
    Fig6,
    /// Lossless unidirectional N = 2 dynamics.
    Fig7,
}

impl FromStr for Preset {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, SweepError> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            "fig7" => Ok(Preset::Fig7),
            _ => Err(SweepError::Config(format!("unknown preset '{s}'"))),
        }
    }
}

const NU0: f64 = 1.0;
const OMEGA0: f64 = 1.0;
const DYNAMICS_RATIOS: [f64; 3] = [0.25, 1.0, 2.0];
const DYNAMICS_ETAS: [f64; 3] = [0.0, 0.5, 1.0];

fn spectrum_spec(n: usize, eta: f64, gamma: f64, axis: Axis, max: f64) -> SweepSpec {
    SweepSpec {
        base: ModelParams::new(OMEGA0, NU0, eta, gamma, n).expect("preset parameters are valid"),
        axis,
        min: 0.0,
        max,
        steps: 401,
        outputs: vec![Output::Eigenvalues, Output::Diagnostics],
        initial: InitialState::Noon,
        backend: Backend::Auto,
        seed: 0,
        out: None,
    }
}

/// Concatenates panel tables, prefixing each row with the panel's values.
fn stack(prefix: &[&str], panels: Vec<(Vec<f64>, CsvTable)>) -> CsvTable {
    let mut header: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    header.extend(panels[0].1.header().iter().cloned());
    let mut out = CsvTable::new(header);
    for (values, table) in panels {
        for row in table.rows() {
            let mut r = values.clone();
            r.extend(row);
            out.push(r);
        }
    }
    out
}

impl Preset {
    /// Subcommand that renders this preset.
    pub fn command(self) -> &'static str {
        match self {
            Preset::Fig2 => "spectrum",
            Preset::Fig3 => "eta-flow",
            Preset::Fig4 => "spin",
            Preset::Fig5 | Preset::Fig6 | Preset::Fig7 => "dynamics",
        }
    }

    /// Spin panels: Γ ∈ {0.75, 1, 1.5}·Γc against η ∈ {0, ηc(0.75 Γc), 1}.
    pub fn spin_axes() -> (Vec<f64>, Vec<f64>) {
        let gc = critical_gamma(NU0, 0.0);
        let eta_ep = critical_eta(NU0, 0.75 * gc).expect("0.75 Γc is below Γc");
        (vec![0.75 * gc, gc, 1.5 * gc], vec![0.0, eta_ep, 1.0])
    }

    /// Renders the preset. `initial` and `backend` only affect dynamics.
    pub fn run(self, initial: &InitialState, backend: Backend) -> Result<CsvTable, SweepError> {
        match self {
            Preset::Fig2 => {
                let etas = [0.0, 0.8, 1.0];
                let panels = etas
                    .iter()
                    .map(|&e| Ok((vec![e], run_gamma_sweep(&spectrum_spec(4, e, 0.0, Axis::Gamma, 4.0))?)))
                    .collect::<Result<Vec<_>, SweepError>>()?;
                Ok(stack(&["eta"], panels))
            }
            Preset::Fig3 => {
                let gammas = [0.0, 1.7, 2.0];
                let panels = gammas
                    .iter()
                    .map(|&g| Ok((vec![g], run_eta_sweep(&spectrum_spec(4, 0.0, g, Axis::Eta, 1.0))?)))
                    .collect::<Result<Vec<_>, SweepError>>()?;
                Ok(stack(&["gamma"], panels))
            }
            Preset::Fig4 => {
                let base = ModelParams::new(OMEGA0, NU0, 0.0, 0.0, 4)?;
                let (gammas, etas) = Self::spin_axes();
                run_spin_grid(&gammas, &etas, &base)
            }
            Preset::Fig5 | Preset::Fig6 => {
                let n = if self == Preset::Fig5 { 4 } else { 2 };
                let gc = critical_gamma(NU0, 0.0);
                let grid = uniform_grid(0.0, 10.0, 201);
                let panels: Vec<(f64, f64)> = DYNAMICS_RATIOS
                    .iter()
                    .flat_map(|&r| DYNAMICS_ETAS.iter().map(move |&e| (r, e)))
                    .collect();
                let outputs = [Output::Survival, Output::Occupation];
                let tables = ordered_map(&panels, |&(r, e)| {
                    let p = ModelParams::new(OMEGA0, NU0, e, r * gc, n)?;
                    dynamics_rows(&p, initial, &grid, backend, &outputs)
                })?;
                let panels = panels.iter().zip(tables).map(|(&(r, e), t)| (vec![r, e], t)).collect();
                Ok(stack(&["gamma_over_gamma_c", "eta"], panels))
            }
            Preset::Fig7 => {
                let p = ModelParams::new(OMEGA0, NU0, 1.0, 0.0, 2)?;
                dynamics_rows(&p, initial, &uniform_grid(0.0, 2.0, 201), backend, &[Output::Survival, Output::Occupation])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for (name, cmd) in [("fig2", "spectrum"), ("fig3", "eta-flow"), ("fig4", "spin"), ("fig7", "dynamics")] {
            assert_eq!(name.parse::<Preset>().unwrap().command(), cmd);
        }
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn spin_axes_contain_both_exceptional_panels() {
        let (gammas, etas) = Preset::spin_axes();
        assert_eq!(gammas, [1.5, 2.0, 3.0]);
        assert_eq!(etas[0], 0.0);
        assert!((etas[1] - (1.0f64 - 0.5625).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fig7_conserves_photon_number_distribution() {
        let t = Preset::Fig7.run(&InitialState::Noon, Backend::Auto).unwrap();
        assert_eq!(t.rows().len(), 201);
        for row in t.rows() {
            let total: f64 = row[2..].iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fig6_has_nine_panels() {
        let t = Preset::Fig6.run(&InitialState::Noon, Backend::Auto).unwrap();
        assert_eq!(t.rows().len(), 9 * 201);
        assert_eq!(t.header()[..3], ["gamma_over_gamma_c", "eta", "z"]);
    }
}
