//! The `epbeam` command line.
//!
//! Exit codes: 0 success, 2 invalid arguments or configuration, 3 numerical
//! failure, 4 I/O failure. Tables go to stdout (or `--out`), diagnostics to
//! stderr.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::linalg::ComplexVector;
use crate::model::{hamiltonian, hamiltonian_su2, noon_state, ModelParams};
use crate::propagator::{evolve, propagator, Backend};
use crate::spectrum::{
    analytic_eigenvalues, critical_gamma, default_eps_grid, ep_exponent_fit, ep_report, numeric_spectrum,
    FitMode, SpectrumConfig,
};
use crate::sweep::{
    run_dynamics, run_eta_sweep, run_gamma_sweep, run_spin_grid, Axis, ConfigValues, CsvTable, Preset, SweepError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGS: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "epbeam",
    version,
    about = "Spectra, exceptional points and post-selected dynamics of a lossy non-reciprocal beam splitter",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue branches over a Γ (or η) grid.
    Spectrum(Common),
    /// Eigenvalue branches over an η grid.
    EtaFlow(Common),
    /// Spin expectation values of the eigenmodes.
    Spin(Common),
    /// Post-selected photon-number dynamics along z.
    Dynamics(Common),
    /// Critical Γ and η and the order of the exceptional point.
    EpLocate(Common),
    /// Fitted splitting exponent around the exceptional point.
    Sensitivity(Common),
    /// Runs a quick invariant suite.
    Selftest(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Photon number N.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    nu0: Option<f64>,
    /// Non-reciprocity η ∈ [0, 1].
    #[arg(long)]
    eta: Option<f64>,
    /// Dissipation Γ ≥ 0.
    #[arg(long)]
    gamma: Option<f64>,
    /// gamma, eta or z.
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// noon, fock:m or amplitudes:a0;a1;...
    #[arg(long)]
    initial: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// wei-norman, expm or auto.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<String>,
    /// fig2 … fig7.
    #[arg(long)]
    preset: Option<String>,
    /// Perturbation for sensitivity: gamma or generic.
    #[arg(long)]
    mode: Option<String>,
}

enum Failure {
    Args(String),
    Numeric(String),
    Io(String),
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(_) | SweepError::Model(_) => Failure::Args(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl Common {
    fn values(&self) -> Result<ConfigValues, Failure> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
                ConfigValues::parse(&text)?
            }
            None => ConfigValues::default(),
        };
        let mut flags = ConfigValues {
            n: self.n,
            omega0: self.omega0,
            nu0: self.nu0,
            eta: self.eta,
            gamma: self.gamma,
            min: self.min,
            max: self.max,
            steps: self.steps,
            out: self.out.clone(),
            seed: self.seed,
            ..Default::default()
        };
        for (key, value) in [("axis", &self.axis), ("initial", &self.initial), ("backend", &self.backend)] {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        Ok(file.merge(flags))
    }

    fn preset(&self, command: &str) -> Result<Option<Preset>, Failure> {
        let Some(name) = &self.preset else { return Ok(None) };
        let preset: Preset = name.parse()?;
        if preset.command() != command {
            return Err(Failure::Args(format!("preset {name} belongs to the {} command", preset.command())));
        }
        Ok(Some(preset))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Args(m) => (EXIT_ARGS, m),
                Failure::Numeric(m) => (EXIT_NUMERIC, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn emit(text: &str, out: Option<&str>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}"))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn emit_table(table: &CsvTable, out: Option<&str>, stdout: &mut dyn Write) -> Result<(), Failure> {
    emit(&table.to_csv(), out, stdout)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Spectrum(c) => {
            let v = c.values()?;
            let table = match c.preset("spectrum")? {
                Some(p) => p.run(&Default::default(), Backend::Auto)?,
                None => {
                    let spec = v.clone().into_spec(Axis::Gamma)?;
                    match spec.axis {
                        Axis::Gamma => run_gamma_sweep(&spec)?,
                        Axis::Eta => run_eta_sweep(&spec)?,
                        Axis::Z => return Err(Failure::Args("spectrum sweeps gamma or eta".into())),
                    }
                }
            };
            emit_table(&table, v.out.as_deref(), stdout)
        }
        Command::EtaFlow(c) => {
            let v = c.values()?;
            let table = match c.preset("eta-flow")? {
                Some(p) => p.run(&Default::default(), Backend::Auto)?,
                None => {
                    let spec = v.clone().into_spec(Axis::Eta)?;
                    if spec.axis != Axis::Eta {
                        return Err(Failure::Args("eta-flow sweeps eta".into()));
                    }
                    run_eta_sweep(&spec)?
                }
            };
            emit_table(&table, v.out.as_deref(), stdout)
        }
        Command::Spin(c) => {
            let v = c.values()?;
            let table = match c.preset("spin")? {
                Some(p) => p.run(&Default::default(), Backend::Auto)?,
                None => {
                    let p = v.params()?;
                    run_spin_grid(&[p.gamma], &[p.eta], &p)?
                }
            };
            emit_table(&table, v.out.as_deref(), stdout)
        }
        Command::Dynamics(c) => {
            let v = c.values()?;
            let table = match c.preset("dynamics")? {
                Some(p) => p.run(v.initial.as_ref().unwrap_or(&Default::default()), v.backend.unwrap_or_default())?,
                None => {
                    let spec = v.clone().into_spec(Axis::Z)?;
                    run_dynamics(&spec)?
                }
            };
            emit_table(&table, v.out.as_deref(), stdout)
        }
        Command::EpLocate(c) => {
            let v = c.values()?;
            let report = ep_report(&v.params()?).map_err(|e| Failure::Numeric(e.to_string()))?;
            let eta_c = report.eta_c.map_or_else(|| "none".to_string(), |e| e.to_string());
            let text = format!("gamma_c={}\neta_c={eta_c}\norder={}\n", report.gamma_c, report.order);
            emit(&text, v.out.as_deref(), stdout)
        }
        Command::Sensitivity(c) => {
            let mut v = c.values()?;
            let mode = match c.mode.as_deref().unwrap_or("gamma") {
                "gamma" => FitMode::Gamma,
                "generic" => FitMode::Generic,
                other => return Err(Failure::Args(format!("unknown mode '{other}' (expected gamma or generic)"))),
            };
            // Sit on the exceptional point unless Γ was given explicitly.
            if v.gamma.is_none() {
                v.gamma = Some(critical_gamma(v.nu0.unwrap_or(1.0), v.eta.unwrap_or(0.0)));
            }
            let params = v.params()?;
            let fit = ep_exponent_fit(&params, mode, v.seed.unwrap_or(0), &default_eps_grid(), &SpectrumConfig::default())
                .map_err(|e| Failure::Numeric(e.to_string()))?;
            let text = format!("slope={}\nintercept={}\nresidual={}\n", fit.slope, fit.intercept, fit.residual);
            emit(&text, v.out.as_deref(), stdout)
        }
        Command::Selftest(c) => {
            let v = c.values()?;
            let results = selftest();
            let failed = results.iter().filter(|(_, ok)| !ok).count();
            let mut text = String::new();
            for (name, ok) in &results {
                text.push_str(&format!("{} {name}\n", if *ok { "pass" } else { "fail" }));
            }
            text.push_str(&format!("passed={} failed={failed}\n", results.len() - failed));
            emit(&text, v.out.as_deref(), stdout)?;
            if failed > 0 {
                return Err(Failure::Numeric(format!("{failed} self-test checks failed")));
            }
            Ok(())
        }
    }
}

fn selftest() -> Vec<(&'static str, bool)> {
    let p = |eta: f64, gamma: f64, n: usize| ModelParams::new(1.0, 1.0, eta, gamma, n).expect("valid parameters");
    let mut checks: Vec<(&'static str, bool)> = Vec::new();

    let q = p(0.3, 1.1, 3);
    let spectrum_ok = numeric_spectrum(&q).is_ok_and(|s| {
        let mut a = analytic_eigenvalues(&q);
        let mut b = s.eigenvalues;
        let key = |x: &Complex64, y: &Complex64| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        a.sort_by(key);
        b.sort_by(key);
        a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-10)
    });
    checks.push(("analytic-spectrum", spectrum_ok));

    let ep = p(0.0, 2.0, 2);
    checks.push((
        "exceptional-point",
        numeric_spectrum(&ep).is_ok_and(|s| s.is_coalesced(&SpectrumConfig::default())),
    ));

    checks.push((
        "su2-form",
        hamiltonian(&q).max_abs_diff(&hamiltonian_su2(&q)) < 1e-12,
    ));

    let w = p(0.4, 0.7, 3);
    let factorized = propagator(&w, 1.3, Backend::WeiNorman);
    let dense = propagator(&w, 1.3, Backend::Expm);
    checks.push((
        "factorized-propagator",
        matches!((factorized, dense), (Ok(a), Ok(b)) if a.max_abs_diff(&b) < 1e-10),
    ));

    let lossless = p(0.0, 0.0, 2);
    checks.push((
        "lossless-norm",
        evolve(&lossless, &noon_state(2).expect("N = 2"), &[0.0, 0.5, 2.0])
            .is_ok_and(|t| t.points.iter().all(|pt| (pt.survival - 1.0).abs() < 1e-12)),
    ));

    let pair = ComplexVector::basis(3, 1);
    checks.push((
        "hong-ou-mandel",
        evolve(&lossless, &pair, &[std::f64::consts::FRAC_PI_4]).is_ok_and(|t| t.points[0].occupation[1] < 1e-12),
    ));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("epbeam").chain(args.iter().copied()).map(OsString::from).collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn empty_invocation_is_a_usage_error() {
        let (code, _, err) = call(&[]);
        assert_eq!(code, EXIT_ARGS);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn ep_locate_reports() {
        let (code, out, _) = call(&["ep-locate", "--n", "4", "--eta", "0", "--nu0", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "gamma_c=2\neta_c=1\norder=5\n");
    }

    #[test]
    fn bad_values_exit_two() {
        assert_eq!(call(&["spectrum", "--eta", "1.5"]).0, EXIT_ARGS);
        assert_eq!(call(&["spectrum", "--axis", "time"]).0, EXIT_ARGS);
        assert_eq!(call(&["spin", "--preset", "fig2"]).0, EXIT_ARGS);
        assert_eq!(call(&["sensitivity", "--mode", "sideways"]).0, EXIT_ARGS);
    }

    #[test]
    fn missing_config_is_io() {
        assert_eq!(call(&["spectrum", "--config", "/nonexistent/scenario.cfg"]).0, EXIT_IO);
    }

    #[test]
    fn away_from_ep_sensitivity_is_numeric() {
        assert_eq!(call(&["sensitivity", "--gamma", "1"]).0, EXIT_NUMERIC);
    }

    #[test]
    fn selftest_passes() {
        let (code, out, _) = call(&["selftest"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.ends_with("failed=0\n"));
    }
}
