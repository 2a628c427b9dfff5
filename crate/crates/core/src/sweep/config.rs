//! Flat `key = value` scenario files and their merge with command-line flags.

use std::str::FromStr;

use num_complex::Complex64;

use super::SweepError;
use crate::linalg::ComplexVector;
use crate::model::{fock_state, noon_state, ModelParams};
use crate::propagator::Backend;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Gamma,
    Eta,
    Z,
}

impl FromStr for Axis {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, SweepError> {
        match s {
            "gamma" => Ok(Axis::Gamma),
            "eta" => Ok(Axis::Eta),
            "z" => Ok(Axis::Z),
            _ => Err(SweepError::Config(format!("unknown axis '{s}' (expected gamma, eta or z)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Eigenvalues,
    Diagnostics,
    Spin,
    Occupation,
    Survival,
}

/// Initial state of a dynamics run.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    #[default]
    Noon,
    Fock(usize),
    Amplitudes(Vec<Complex64>),
}

impl InitialState {
    pub fn vector(&self, n: usize) -> Result<ComplexVector, SweepError> {
        let v = match self {
            InitialState::Noon => noon_state(n)?,
            InitialState::Fock(m) => fock_state(*m, n)?,
            InitialState::Amplitudes(a) => {
                if a.len() != n + 1 {
                    return Err(SweepError::Config(format!(
                        "{} amplitudes given for N = {n} (need {})",
                        a.len(),
                        n + 1
                    )));
                }
                ComplexVector::new(a.clone()).map_err(|e| SweepError::Config(e.to_string()))?
            }
        };
        Ok(v)
    }
}

impl FromStr for InitialState {
    type Err = SweepError;
    /// `noon`, `fock:m`, or `amplitudes:a0;a1;…` where each amplitude is a
    /// real number or a complex number such as `0.5+0.5i`.
    fn from_str(s: &str) -> Result<Self, SweepError> {
        let bad = || SweepError::Config(format!("invalid initial state '{s}'"));
        if s == "noon" {
            return Ok(InitialState::Noon);
        }
        if let Some(m) = s.strip_prefix("fock:") {
            return m.trim().parse().map(InitialState::Fock).map_err(|_| bad());
        }
        if let Some(list) = s.strip_prefix("amplitudes:") {
            let amps = list
                .split(';')
                .map(|a| parse_complex(a.trim()).ok_or_else(bad))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(InitialState::Amplitudes(amps));
        }
        Err(bad())
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    // num_complex expects "a+bi" with explicit parts; accept bare reals too.
    if let Ok(x) = s.parse::<f64>() {
        return Some(Complex64::new(x, 0.0));
    }
    s.parse::<Complex64>().ok().filter(|z| z.is_finite())
}

fn parse_backend(s: &str) -> Result<Backend, SweepError> {
    match s {
        "wei_norman" | "wei-norman" => Ok(Backend::WeiNorman),
        "expm" => Ok(Backend::Expm),
        "auto" => Ok(Backend::Auto),
        _ => Err(SweepError::Config(format!("unknown backend '{s}'"))),
    }
}

/// Every setting a scenario may carry; unset keys fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigValues {
    pub n: Option<usize>,
    pub omega0: Option<f64>,
    pub nu0: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub axis: Option<Axis>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
    pub initial: Option<InitialState>,
    pub out: Option<String>,
    pub backend: Option<Backend>,
    pub seed: Option<u64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, SweepError> {
    value
        .parse()
        .map_err(|_| SweepError::Config(format!("invalid value '{value}' for key '{key}'")))
}

impl ConfigValues {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SweepError> {
        let mut c = ConfigValues::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SweepError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            c.set(key.trim(), value.trim())?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SweepError> {
        match key {
            "n" => self.n = Some(parse_value(key, value)?),
            "omega0" => self.omega0 = Some(parse_value(key, value)?),
            "nu0" => self.nu0 = Some(parse_value(key, value)?),
            "eta" => self.eta = Some(parse_value(key, value)?),
            "gamma" => self.gamma = Some(parse_value(key, value)?),
            "axis" => self.axis = Some(value.parse()?),
            "min" => self.min = Some(parse_value(key, value)?),
            "max" => self.max = Some(parse_value(key, value)?),
            "steps" => self.steps = Some(parse_value(key, value)?),
            "initial" => self.initial = Some(value.parse()?),
            "out" => self.out = Some(value.to_string()),
            "backend" => self.backend = Some(parse_backend(value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            _ => return Err(SweepError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Values set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigValues) -> ConfigValues {
        ConfigValues {
            n: over.n.or(self.n),
            omega0: over.omega0.or(self.omega0),
            nu0: over.nu0.or(self.nu0),
            eta: over.eta.or(self.eta),
            gamma: over.gamma.or(self.gamma),
            axis: over.axis.or(self.axis),
            min: over.min.or(self.min),
            max: over.max.or(self.max),
            steps: over.steps.or(self.steps),
            initial: over.initial.or(self.initial),
            out: over.out.or(self.out),
            backend: over.backend.or(self.backend),
            seed: over.seed.or(self.seed),
        }
    }

    pub fn params(&self) -> Result<ModelParams, SweepError> {
        Ok(ModelParams::new(
            self.omega0.unwrap_or(1.0),
            self.nu0.unwrap_or(1.0),
            self.eta.unwrap_or(0.0),
            self.gamma.unwrap_or(0.0),
            self.n.unwrap_or(4),
        )?)
    }

    /// Fills defaults; the axis falls back to `default_axis`.
    pub fn into_spec(self, default_axis: Axis) -> Result<SweepSpec, SweepError> {
        let base = self.params()?;
        let axis = self.axis.unwrap_or(default_axis);
        let (min, max) = match axis {
            Axis::Gamma => (0.0, 4.0),
            Axis::Eta => (0.0, 1.0),
            Axis::Z => (0.0, 10.0),
        };
        let outputs = match axis {
            Axis::Gamma | Axis::Eta => vec![Output::Eigenvalues, Output::Diagnostics],
            Axis::Z => vec![Output::Survival, Output::Occupation],
        };
        let spec = SweepSpec {
            base,
            axis,
            min: self.min.unwrap_or(min),
            max: self.max.unwrap_or(max),
            steps: self.steps.unwrap_or(401),
            outputs,
            initial: self.initial.unwrap_or(InitialState::Noon),
            backend: self.backend.unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            out: self.out,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One sweep: a base parameter set, the swept axis and its uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ModelParams,
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub outputs: Vec<Output>,
    pub initial: InitialState,
    pub backend: Backend,
    pub seed: u64,
    pub out: Option<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.base.validate()?;
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(SweepError::Config(format!("need min < max (got {} and {})", self.min, self.max)));
        }
        if self.steps < 2 {
            return Err(SweepError::Config(format!("steps must be at least 2 (got {})", self.steps)));
        }
        let ok = match self.axis {
            Axis::Eta => self.min >= 0.0 && self.max <= 1.0,
            Axis::Gamma | Axis::Z => self.min >= 0.0,
        };
        if !ok {
            return Err(SweepError::Config(format!(
                "range [{}, {}] is outside the domain of the {:?} axis",
                self.min, self.max, self.axis
            )));
        }
        Ok(())
    }

    /// `steps` evenly spaced values from `min` to `max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.min, self.max, self.steps)
    }
}

pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| if i + 1 == steps { max } else { min + (max - min) * (i as f64 / last) })
        .collect()
}

/// Parses a scenario file into a validated spec (gamma axis unless set).
pub fn parse_config(text: &str) -> Result<SweepSpec, SweepError> {
    ConfigValues::parse(text)?.into_spec(Axis::Gamma)
}
