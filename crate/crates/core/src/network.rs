//! Poisson base-station deployments, per-link SINR and hearability.
//!
//! Stations are dropped as a homogeneous PPP on a disk around the device at
//! the origin. Each link carries an independent log-normal shadowing gain and
//! each station is loaded (active, hence interfering) with probability `f`.
//! Small-scale fading is not modelled.
//!
//! Every scenario draws from its own ChaCha8 stream, selected by
//! `scenario_id`, so a scenario is a pure function of `(seed, scenario_id)`
//! and can be generated on any thread in any order.

use std::f64::consts::{LN_10, PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which stations may be detected at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidatePolicy {
    /// Every station transmits a detectable signal; load only decides who
    /// interferes.
    AllStations,
    /// Only loaded stations can be detected.
    ActiveOnly,
}

/// Scalar parameters of the deployment and link model.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    /// Station density, m⁻².
    pub lambda: f64,
    /// Load: probability that a station is active.
    pub f: f64,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// Detection threshold on the pre-processing SINR, `β/γ`, in dB.
    pub beta_over_gamma_db: f64,
    /// Log-normal shadowing standard deviation, dB.
    pub sigma_s_db: f64,
    /// Noise power σ², W.
    pub sigma2: f64,
    /// Transmit power P, W.
    pub tx_power: f64,
    /// Radius of the simulated disk, m.
    pub window_radius: f64,
    pub seed: u64,
    pub candidates: CandidatePolicy,
}

/// Density of an infinite hexagonal grid with inter-site distance `isd` metres.
pub fn hex_grid_density(isd: f64) -> f64 {
    2.0 / (3f64.sqrt() * isd * isd)
}

impl Default for NetworkParams {
    /// Hexagonal-equivalent 500 m density, full load, α = 4, −10 dB threshold,
    /// 8 dB shadowing, interference limited, 7.5 km window.
    fn default() -> Self {
        Self {
            lambda: hex_grid_density(500.0),
            f: 1.0,
            alpha: 4.0,
            beta_over_gamma_db: -10.0,
            sigma_s_db: 8.0,
            sigma2: 0.0,
            tx_power: 1.0,
            window_radius: 7500.0,
            seed: 1,
            candidates: CandidatePolicy::AllStations,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(0.0..=1.0).contains(&self.f) {
            return bad("f must lie in [0, 1]");
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return bad("alpha must exceed 2");
        }
        if self.beta_over_gamma_db.is_nan() || self.beta_over_gamma_db == f64::INFINITY {
            return bad("beta_over_gamma_db must be finite or -inf");
        }
        if !(self.sigma_s_db >= 0.0 && self.sigma_s_db.is_finite()) {
            return bad("sigma_s_db must be non-negative");
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2 must be non-negative");
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return bad("tx_power must be positive");
        }
        if !(self.window_radius > 0.0 && self.window_radius.is_finite()) {
            return bad("window_radius must be positive");
        }
        Ok(())
    }

    /// Linear SINR threshold `β/γ`; `0` when the dB threshold is `-∞`.
    pub fn detection_threshold(&self) -> f64 {
        10f64.powf(self.beta_over_gamma_db / 10.0)
    }

    /// Expected number of stations in the window, `λπR²`.
    pub fn mean_station_count(&self) -> f64 {
        self.lambda * PI * self.window_radius * self.window_radius
    }

    fn received_power(&self, [x, y]: [f64; 2], shadowing: f64) -> f64 {
        self.tx_power * shadowing * (x * x + y * y).powf(-self.alpha / 2.0)
    }
}

/// One realized deployment as seen from the device at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub positions: Vec<[f64; 2]>,
    /// Linear shadowing gains, one per station.
    pub shadowing: Vec<f64>,
    /// Realized load indicators.
    pub active: Vec<bool>,
    /// Hearable stations, strongest SINR first.
    pub hearable: Vec<usize>,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The hearability count `N`.
    pub fn hearable_count(&self) -> usize {
        self.hearable.len()
    }

    /// Positions of the hearable stations, strongest first.
    pub fn hearable_positions(&self) -> Vec<[f64; 2]> {
        self.hearable.iter().map(|&i| self.positions[i]).collect()
    }
}

/// The random stream of scenario `scenario_id` under root `seed`.
pub fn scenario_rng(seed: u64, scenario_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scenario_id);
    rng
}

/// Draws scenario `scenario_id` and determines its hearable set.
///
/// `params` must be valid (see [`NetworkParams::validate`]).
pub fn sample_scenario(params: &NetworkParams, scenario_id: u64) -> Scenario {
    let mut rng = scenario_rng(params.seed, scenario_id);
    let count = Poisson::new(params.mean_station_count())
        .expect("validated density and window")
        .sample(&mut rng) as usize;
    let shadow_scale = params.sigma_s_db * LN_10 / 10.0;

    let mut positions = Vec::with_capacity(count);
    let mut shadowing = Vec::with_capacity(count);
    let mut active = Vec::with_capacity(count);
    for _ in 0..count {
        // 1 − u lies in (0, 1], so no station lands exactly on the device.
        let r = params.window_radius * (1.0 - rng.random::<f64>()).sqrt();
        let (s, c) = (TAU * rng.random::<f64>()).sin_cos();
        let z: f64 = rng.sample(StandardNormal);
        positions.push([r * c, r * s]);
        shadowing.push((shadow_scale * z).exp());
        active.push(rng.random::<f64>() < params.f);
    }
    let hearable = hearable_indices(&positions, &shadowing, &active, params);
    Scenario {
        positions,
        shadowing,
        active,
        hearable,
    }
}

fn hearable_indices(
    positions: &[[f64; 2]],
    shadowing: &[f64],
    active: &[bool],
    params: &NetworkParams,
) -> Vec<usize> {
    let power: Vec<f64> = positions
        .iter()
        .zip(shadowing)
        .map(|(&p, &s)| params.received_power(p, s))
        .collect();
    let interfering: Vec<f64> = power
        .iter()
        .zip(active)
        .map(|(&p, &a)| if a { p } else { 0.0 })
        .collect();
    // Interference seen by station i is everything before plus everything after
    // it; prefix/suffix sums avoid subtracting a dominant term from the total.
    let mut suffix = vec![0.0; power.len() + 1];
    for i in (0..power.len()).rev() {
        suffix[i] = suffix[i + 1] + interfering[i];
    }
    let threshold = params.detection_threshold();
    let mut prefix = 0.0;
    let mut heard: Vec<(usize, f64)> = Vec::new();
    for i in 0..power.len() {
        let interference = prefix + suffix[i + 1] + params.sigma2;
        prefix += interfering[i];
        let candidate = match params.candidates {
            CandidatePolicy::AllStations => true,
            CandidatePolicy::ActiveOnly => active[i],
        };
        let sinr = power[i] / interference;
        if candidate && sinr >= threshold {
            heard.push((i, sinr));
        }
    }
    heard.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    heard.into_iter().map(|(i, _)| i).collect()
}

/// SINR of station `bs_index`: its received power over the power of every
/// other active station plus noise. The target's own load does not gate its
/// signal.
pub fn sinr(scenario: &Scenario, params: &NetworkParams, bs_index: usize) -> Result<f64> {
    let n = scenario.len();
    if bs_index >= n {
        return Err(Error::IndexOutOfRange {
            index: bs_index,
            len: n,
        });
    }
    let [x, y] = scenario.positions[bs_index];
    if x == 0.0 && y == 0.0 {
        return Err(Error::DegenerateInput("base station located at the device"));
    }
    let signal = params.received_power(scenario.positions[bs_index], scenario.shadowing[bs_index]);
    let mut interference = params.sigma2;
    for j in (0..n).filter(|&j| j != bs_index && scenario.active[j]) {
        interference += params.received_power(scenario.positions[j], scenario.shadowing[j]);
    }
    Ok(signal / interference)
}

/// Stations whose SINR meets `β/γ`, strongest first. Its length is `N`.
pub fn hearable_set(scenario: &Scenario, params: &NetworkParams) -> Vec<usize> {
    hearable_indices(
        &scenario.positions,
        &scenario.shadowing,
        &scenario.active,
        params,
    )
}

/// Counts of the hearability `N` over a batch of scenarios.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HearabilityTable {
    counts: Vec<u64>,
    scenarios: u64,
}

impl HearabilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, n: usize) {
        if self.counts.len() <= n {
            self.counts.resize(n + 1, 0);
        }
        self.counts[n] += 1;
        self.scenarios += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.scenarios += other.scenarios;
    }

    pub fn scenarios(&self) -> u64 {
        self.scenarios
    }

    /// Largest `N` observed (0 for an empty table).
    pub fn max_observed(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn count(&self, l: usize) -> u64 {
        self.counts.get(l).copied().unwrap_or(0)
    }

    /// `P̂(N = l)`.
    pub fn probability(&self, l: usize) -> f64 {
        if self.scenarios == 0 {
            return 0.0;
        }
        self.count(l) as f64 / self.scenarios as f64
    }

    /// Standard error of [`probability`](Self::probability).
    pub fn std_error(&self, l: usize) -> f64 {
        binomial_std_error(self.probability(l), self.scenarios)
    }

    /// `P̂(N ≥ l)`.
    pub fn at_least(&self, l: usize) -> f64 {
        if self.scenarios == 0 {
            return 0.0;
        }
        let c: u64 = self.counts.iter().skip(l).sum();
        c as f64 / self.scenarios as f64
    }

    pub fn at_least_std_error(&self, l: usize) -> f64 {
        binomial_std_error(self.at_least(l), self.scenarios)
    }

    /// `P̂(N = L)` indexed by `L`, for `L = 0..=max_observed`.
    pub fn pmf(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|l| self.probability(l)).collect()
    }
}

pub(crate) fn binomial_std_error(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Hearability pmf estimated from scenarios `0..n_scenarios`.
///
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn empirical_hearability(params: &NetworkParams, n_scenarios: u64) -> Result<HearabilityTable> {
    params.validate()?;
    if n_scenarios == 0 {
        return Err(Error::InvalidParameter("n_scenarios must be at least 1".into()));
    }
    Ok((0..n_scenarios)
        .into_par_iter()
        .fold(HearabilityTable::new, |mut table, id| {
            table.record(sample_scenario(params, id).hearable_count());
            table
        })
        .reduce(HearabilityTable::new, |mut a, b| {
            a.merge(&b);
            a
        }))
}

/// Shadowing-transformed density `λ·E[S^{2/α}]` for log-normal shadowing.
pub fn shadowing_transformed_density(params: &NetworkParams) -> f64 {
    let sigma_ln = params.sigma_s_db * LN_10 / 10.0;
    let k = 2.0 / params.alpha;
    params.lambda * (0.5 * k * k * sigma_ln * sigma_ln).exp()
}
