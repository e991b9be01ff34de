use std::f64::consts::TAU;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::network::{CandidatePolicy, NetworkParams};

/// Default number of points in the `Ψ_max` evaluation grid.
pub const DEFAULT_PHI_GRID_POINTS: usize = 128;
pub const DEFAULT_N_SCENARIOS: u64 = 100_000;
pub const DEFAULT_L_MIN: usize = 4;

/// Worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

impl Threads {
    /// `0` lets rayon choose.
    pub(crate) fn rayon_count(self) -> usize {
        match self {
            Threads::Auto => 0,
            Threads::Fixed(n) => n.get(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    F,
    BetaOverGammaDb,
    Lambda,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::F => "f",
            SweepParameter::BetaOverGammaDb => "beta_over_gamma_db",
            SweepParameter::Lambda => "lambda",
        }
    }

    fn parse(name: &str) -> Result<Self> {
        match name {
            "f" => Ok(SweepParameter::F),
            "beta_over_gamma_db" => Ok(SweepParameter::BetaOverGammaDb),
            "lambda" => Ok(SweepParameter::Lambda),
            other => Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

/// One network parameter varied over a list of values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl Sweep {
    /// `base` with the swept parameter set to `value`.
    pub fn apply(&self, base: &NetworkParams, value: f64) -> NetworkParams {
        let mut p = base.clone();
        match self.parameter {
            SweepParameter::F => p.f = value,
            SweepParameter::BetaOverGammaDb => p.beta_over_gamma_db = value,
            SweepParameter::Lambda => p.lambda = value,
        }
        p
    }
}

/// Everything a run needs. Built from a flat TOML file or in code.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkParams,
    pub n_scenarios: u64,
    /// Scenarios with fewer hearable stations produce no geometry row.
    pub l_min: usize,
    /// Strictly increasing, within `(0, 2π]`.
    pub phi_grid: Vec<f64>,
    pub sweep: Option<Sweep>,
    /// Edges of the `Ψ_max` bins used for conditional GDOP curves.
    pub psi_bin_edges: Vec<f64>,
    pub output_dir: PathBuf,
    pub threads: Threads,
}

/// `n` evenly spaced points `2πk/n`, `k = 1..=n`.
pub fn default_phi_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Quartiles of `[0, 2π]`.
pub fn default_psi_bin_edges() -> Vec<f64> {
    (0..=4).map(|k| TAU * k as f64 / 4.0).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            network: NetworkParams::default(),
            n_scenarios: DEFAULT_N_SCENARIOS,
            l_min: DEFAULT_L_MIN,
            phi_grid: default_phi_grid(DEFAULT_PHI_GRID_POINTS),
            sweep: None,
            psi_bin_edges: default_psi_bin_edges(),
            output_dir: PathBuf::from("out"),
            threads: Threads::Auto,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lambda: Option<f64>,
    f: Option<f64>,
    alpha: Option<f64>,
    beta_over_gamma_db: Option<f64>,
    sigma_s_db: Option<f64>,
    sigma2: Option<f64>,
    tx_power: Option<f64>,
    window_radius: Option<f64>,
    seed: Option<u64>,
    candidates: Option<String>,
    n_scenarios: Option<u64>,
    l_min: Option<usize>,
    phi_grid: Option<Vec<f64>>,
    phi_grid_points: Option<usize>,
    sweep_parameter: Option<String>,
    sweep_values: Option<Vec<f64>>,
    psi_bin_edges: Option<Vec<f64>>,
    output_dir: Option<PathBuf>,
    threads: Option<toml::Value>,
}

impl ExperimentConfig {
    /// Parses a flat TOML document. Missing keys take their defaults; unknown
    /// keys are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::default();
        let net = &mut cfg.network;
        macro_rules! take {
            ($($field:ident),*) => {$( if let Some(v) = raw.$field { net.$field = v; } )*};
        }
        take!(lambda, f, alpha, beta_over_gamma_db, sigma_s_db, sigma2, tx_power, window_radius, seed);
        if let Some(c) = raw.candidates {
            net.candidates = match c.as_str() {
                "all" => CandidatePolicy::AllStations,
                "active" => CandidatePolicy::ActiveOnly,
                other => {
                    return Err(Error::Config(format!(
                        "candidates must be \"all\" or \"active\", got `{other}`"
                    )))
                }
            };
        }
        if let Some(n) = raw.n_scenarios {
            cfg.n_scenarios = n;
        }
        if let Some(l) = raw.l_min {
            cfg.l_min = l;
        }
        cfg.phi_grid = match (raw.phi_grid, raw.phi_grid_points) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give phi_grid or phi_grid_points, not both".into()))
            }
            (Some(grid), None) => grid,
            (None, Some(n)) => default_phi_grid(n),
            (None, None) => cfg.phi_grid,
        };
        cfg.sweep = match (raw.sweep_parameter, raw.sweep_values) {
            (None, None) => None,
            (Some(name), Some(values)) => Some(Sweep {
                parameter: SweepParameter::parse(&name)?,
                values,
            }),
            _ => {
                return Err(Error::Config(
                    "sweep_parameter and sweep_values go together".into(),
                ))
            }
        };
        if let Some(edges) = raw.psi_bin_edges {
            cfg.psi_bin_edges = edges;
        }
        if let Some(dir) = raw.output_dir {
            cfg.output_dir = dir;
        }
        if let Some(t) = raw.threads {
            cfg.threads = parse_threads(&t)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.n_scenarios == 0 {
            return Err(Error::Config("n_scenarios must be at least 1".into()));
        }
        if self.l_min < 3 {
            return Err(Error::Config("l_min must be at least 3".into()));
        }
        if self.phi_grid.is_empty() {
            return Err(Error::Config("phi_grid is empty".into()));
        }
        if self.phi_grid.iter().any(|&p| !(p > 0.0 && p <= TAU)) {
            return Err(Error::Config("phi_grid must lie in (0, 2π]".into()));
        }
        if self.phi_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("phi_grid must be strictly increasing".into()));
        }
        if self.psi_bin_edges.len() < 2
            || self.psi_bin_edges.windows(2).any(|w| w[0] >= w[1])
            || self.psi_bin_edges.iter().any(|e| !e.is_finite())
        {
            return Err(Error::Config(
                "psi_bin_edges needs at least two strictly increasing finite edges".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep_values is empty".into()));
            }
            for &v in &sweep.values {
                sweep.apply(&self.network, v).validate().map_err(|e| {
                    Error::Config(format!("sweep value {v} for {}: {e}", sweep.parameter.name()))
                })?;
            }
        }
        Ok(())
    }
}

fn parse_threads(value: &toml::Value) -> Result<Threads> {
    match value {
        toml::Value::String(s) if s == "auto" => Ok(Threads::Auto),
        toml::Value::Integer(n) => usize::try_from(*n)
            .ok()
            .and_then(NonZeroUsize::new)
            .map(Threads::Fixed)
            .ok_or_else(|| Error::Config("threads must be a positive integer or \"auto\"".into())),
        _ => Err(Error::Config("threads must be a positive integer or \"auto\"".into())),
    }
}
