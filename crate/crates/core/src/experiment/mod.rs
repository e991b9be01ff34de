//! Monte Carlo runs and the files they produce.
//!
//! Scenarios are evaluated in parallel in chunks of consecutive ids and
//! handed to a single consumer in id order, so every output is a function of
//! the configuration alone. Memory is bounded by one chunk of scenarios plus
//! the per-row accumulators.

pub mod config;
pub mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::Path;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::analytic::{expected_bs_for_target, stevens_table, weighted_cdf, ExpectedCount, ExpectedCountMethod};
use crate::distribution::DistributionTable;
use crate::error::{Error, Result};
use crate::geometry::GeometryRecord;
use crate::network::{binomial_std_error, empirical_hearability, sample_scenario, HearabilityTable, NetworkParams};
use crate::stats::{ecdf, pearson_r, quantile, spearman_rho, Ecdf, PearsonEstimate};

pub use config::{ExperimentConfig, Sweep, SweepParameter, Threads};
pub use output::{CurvePoint, ResultRow, SummaryRow};

use output::{
    write_csv, CsvSink, CORRELATION_SCHEMA, CURVES_SCHEMA, EXPECTED_BS_SCHEMA, HULL_SPLIT_SCHEMA,
    RESULTS_SCHEMA, SUMMARY_SCHEMA,
};

/// Scenarios per block; a chunk is four blocks per worker.
pub const BLOCK_SIZE: u64 = 1024;
/// Correlation bins with fewer rows are reported unavailable.
pub const MIN_CORRELATION_ROWS: usize = 100;
/// Hearability counts whose Stevens curves are tabulated.
pub const STEVENS_CURVE_LS: RangeInclusive<usize> = 3..=8;

fn thread_pool(threads: Threads) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.rayon_count())
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Hearability count of one scenario and its geometry row, if any.
fn evaluate_scenario(params: &NetworkParams, l_min: usize, id: u64) -> Result<(usize, Option<ResultRow>)> {
    let scenario = sample_scenario(params, id);
    let n = scenario.hearable_count();
    if n < l_min {
        return Ok((n, None));
    }
    let rec = GeometryRecord::from_positions(&scenario.hearable_positions())?;
    let degenerate = rec.hull.is_degenerate() || !rec.gdop_toa.is_finite() || !rec.gdop_tdoa.is_finite();
    Ok((
        n,
        Some(ResultRow {
            scenario_id: id,
            l: rec.l,
            psi_max: rec.psi_max,
            gdop_toa: rec.gdop_toa,
            gdop_tdoa: rec.gdop_tdoa,
            inside_hull: rec.inside_hull(),
            degenerate_flag: degenerate,
        }),
    ))
}

fn stream_scenarios<F>(pool: &ThreadPool, params: &NetworkParams, l_min: usize, n: u64, mut sink: F) -> Result<()>
where
    F: FnMut(usize, Option<ResultRow>) -> Result<()>,
{
    let chunk = BLOCK_SIZE * 4 * pool.current_num_threads().max(1) as u64;
    let mut start = 0;
    while start < n {
        let end = n.min(start + chunk);
        let outcomes: Vec<_> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|id| evaluate_scenario(params, l_min, id))
                .collect()
        });
        for outcome in outcomes {
            let (count, row) = outcome?;
            sink(count, row)?;
        }
        start = end;
    }
    Ok(())
}

/// Aggregates of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub l_min: usize,
    pub hearability: HearabilityTable,
    /// Scenarios with `N ≥ l_min`, i.e. result rows.
    pub rows: u64,
    pub inside_hull: u64,
    pub degenerate_rows: u64,
    /// `(φ, P̂(Ψ_max ≤ φ | N ≥ l_min))` on the configured grid; empty when
    /// there are no rows.
    pub conditional_psi_cdf: Vec<(f64, f64)>,
    /// Sorted `Ψ_max` samples per hearability count.
    pub psi_by_l: BTreeMap<usize, Vec<f64>>,
}

impl SimulationSummary {
    /// `P̂(inside hull | N ≥ l_min)`, if any row exists.
    pub fn inside_hull_fraction(&self) -> Option<f64> {
        (self.rows > 0).then(|| self.inside_hull as f64 / self.rows as f64)
    }

    /// `P̂(Ψ_max ≤ φ | N ≥ l_min)` at any `φ`, if any row exists.
    pub fn conditional_psi_at(&self, phi: f64) -> Option<f64> {
        if self.rows == 0 {
            return None;
        }
        let below: usize = self
            .psi_by_l
            .values()
            .map(|v| v.partition_point(|&p| p <= phi))
            .sum();
        Some(below as f64 / self.rows as f64)
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        let h = &self.hearability;
        let n = h.scenarios();
        let mut out = vec![
            SummaryRow::new("scenarios", None, n as f64, None),
            SummaryRow::new("l_min", None, self.l_min as f64, None),
            SummaryRow::new("rows", None, self.rows as f64, None),
            SummaryRow::new("degenerate_rows", None, self.degenerate_rows as f64, None),
        ];
        for l in 0..=h.max_observed() {
            out.push(SummaryRow::new("p_n_eq", Some(l as f64), h.probability(l), Some(h.std_error(l))));
        }
        out.push(SummaryRow::new(
            "p_n_ge",
            Some(self.l_min as f64),
            h.at_least(self.l_min),
            Some(h.at_least_std_error(self.l_min)),
        ));
        for &(phi, p) in &self.conditional_psi_cdf {
            out.push(SummaryRow::new(
                "p_psi_max_le_given_n_ge",
                Some(phi),
                p,
                Some(binomial_std_error(p, self.rows)),
            ));
        }
        if let Some(p) = self.inside_hull_fraction() {
            out.push(SummaryRow::new(
                "p_inside_hull_given_n_ge",
                None,
                p,
                Some(binomial_std_error(p, self.rows)),
            ));
        }
        out
    }

    /// Per-`L` empirical `Ψ_max` CDFs and the conditional CDF on the grid.
    pub fn curve_points(&self) -> Result<Vec<CurvePoint>> {
        let mut out = Vec::new();
        for (l, psi) in &self.psi_by_l {
            push_curve(&mut out, &format!("empirical_psi_L{l}"), ecdf(psi)?.table());
        }
        for &(phi, p) in &self.conditional_psi_cdf {
            out.push(CurvePoint {
                curve_id: format!("empirical_psi_Lge{}", self.l_min),
                x: phi,
                f: p,
            });
        }
        Ok(out)
    }
}

fn push_curve(out: &mut Vec<CurvePoint>, id: &str, table: &DistributionTable) {
    out.extend(table.points().map(|(x, f)| CurvePoint {
        curve_id: id.to_string(),
        x,
        f,
    }));
}

struct Accumulator {
    l_min: usize,
    hearability: HearabilityTable,
    rows: u64,
    inside_hull: u64,
    degenerate_rows: u64,
    psi_by_l: BTreeMap<usize, Vec<f64>>,
}

impl Accumulator {
    fn new(l_min: usize) -> Self {
        Self {
            l_min,
            hearability: HearabilityTable::new(),
            rows: 0,
            inside_hull: 0,
            degenerate_rows: 0,
            psi_by_l: BTreeMap::new(),
        }
    }

    fn record(&mut self, n: usize, row: Option<&ResultRow>) {
        self.hearability.record(n);
        if let Some(r) = row {
            self.rows += 1;
            self.inside_hull += r.inside_hull as u64;
            self.degenerate_rows += r.degenerate_flag as u64;
            self.psi_by_l.entry(r.l).or_default().push(r.psi_max);
        }
    }

    fn finish(mut self, phi_grid: &[f64]) -> SimulationSummary {
        for v in self.psi_by_l.values_mut() {
            v.sort_by(f64::total_cmp);
        }
        let mut summary = SimulationSummary {
            l_min: self.l_min,
            hearability: self.hearability,
            rows: self.rows,
            inside_hull: self.inside_hull,
            degenerate_rows: self.degenerate_rows,
            conditional_psi_cdf: Vec::new(),
            psi_by_l: self.psi_by_l,
        };
        summary.conditional_psi_cdf = phi_grid
            .iter()
            .filter_map(|&phi| summary.conditional_psi_at(phi).map(|p| (phi, p)))
            .collect();
        summary
    }
}

fn simulate_into<F>(config: &ExperimentConfig, params: &NetworkParams, mut sink: F) -> Result<SimulationSummary>
where
    F: FnMut(&ResultRow) -> Result<()>,
{
    config.validate()?;
    params.validate()?;
    let pool = thread_pool(config.threads)?;
    let mut acc = Accumulator::new(config.l_min);
    stream_scenarios(&pool, params, config.l_min, config.n_scenarios, |n, row| {
        acc.record(n, row.as_ref());
        match row {
            Some(r) => sink(&r),
            None => Ok(()),
        }
    })?;
    Ok(acc.finish(&config.phi_grid))
}

/// Runs the configured scenarios in memory.
pub fn simulate(config: &ExperimentConfig) -> Result<(Vec<ResultRow>, SimulationSummary)> {
    simulate_network(config, &config.network)
}

/// As [`simulate`] with the network parameters replaced.
pub fn simulate_network(config: &ExperimentConfig, params: &NetworkParams) -> Result<(Vec<ResultRow>, SimulationSummary)> {
    let mut rows = Vec::new();
    let summary = simulate_into(config, params, |r| {
        rows.push(*r);
        Ok(())
    })?;
    Ok((rows, summary))
}

/// Streams `results.csv` and writes `summary.csv` and `curves.csv` into the
/// output directory.
pub fn run_simulation(config: &ExperimentConfig) -> Result<SimulationSummary> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut results = CsvSink::create(&dir.join("results.csv"), RESULTS_SCHEMA)?;
    let summary = simulate_into(config, &config.network, |r| results.write(r))?;
    results.finish()?;
    write_csv(&dir.join("summary.csv"), SUMMARY_SCHEMA, &summary.summary_rows())?;
    write_csv(&dir.join("curves.csv"), CURVES_SCHEMA, &summary.curve_points()?)?;
    Ok(summary)
}

/// A group of result rows selected by hearability count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LBin {
    Exactly(usize),
    AtLeast(usize),
}

impl LBin {
    pub fn contains(self, l: usize) -> bool {
        match self {
            LBin::Exactly(k) => l == k,
            LBin::AtLeast(k) => l >= k,
        }
    }
}

impl fmt::Display for LBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LBin::Exactly(k) => write!(f, "L{k}"),
            LBin::AtLeast(k) => write!(f, "Lge{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub spearman: f64,
    pub pearson_gdop: PearsonEstimate,
    pub pearson_log_gdop: PearsonEstimate,
}

/// Correlation of `Ψ_max` with TDOA GDOP within one bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationBin {
    pub bin: LBin,
    pub rows: usize,
    /// `Err` carries why the bin is unavailable.
    pub estimate: std::result::Result<CorrelationEstimate, String>,
}

/// TDOA GDOP distribution among rows whose `Ψ_max` falls in `[lower, upper)`
/// (the last bin is closed).
#[derive(Debug, Clone, PartialEq)]
pub struct PsiBinCurve {
    pub lower: f64,
    pub upper: f64,
    pub ecdf: Option<Ecdf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub bins: Vec<CorrelationBin>,
    pub gdop_by_psi: Vec<PsiBinCurve>,
}

fn correlation_bin(rows: &[ResultRow], bin: LBin) -> CorrelationBin {
    let (psi, gdop): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| bin.contains(r.l))
        .map(|r| (r.psi_max, r.gdop_tdoa))
        .unzip();
    let estimate = if psi.len() < MIN_CORRELATION_ROWS {
        Err(format!("fewer than {MIN_CORRELATION_ROWS} rows"))
    } else {
        (|| {
            Ok(CorrelationEstimate {
                spearman: spearman_rho(&psi, &gdop)?,
                pearson_gdop: pearson_r(&psi, &gdop, false)?,
                pearson_log_gdop: pearson_r(&psi, &gdop, true)?,
            })
        })()
        .map_err(|e: Error| e.to_string())
    };
    CorrelationBin {
        bin,
        rows: psi.len(),
        estimate,
    }
}

/// Correlation table for `L = l_min, l_min+1, l_min+2` and `L ≥ l_min`, and
/// TDOA GDOP CDFs by `Ψ_max` bin over `L ≥ l_min`.
pub fn correlation_report(rows: &[ResultRow], l_min: usize, psi_bin_edges: &[f64]) -> Result<CorrelationReport> {
    let bins = [
        LBin::Exactly(l_min),
        LBin::Exactly(l_min + 1),
        LBin::Exactly(l_min + 2),
        LBin::AtLeast(l_min),
    ]
    .into_iter()
    .map(|b| correlation_bin(rows, b))
    .collect();
    let last = psi_bin_edges.len().saturating_sub(2);
    let mut gdop_by_psi = Vec::new();
    for (i, w) in psi_bin_edges.windows(2).enumerate() {
        let (lower, upper) = (w[0], w[1]);
        let gdop: Vec<f64> = rows
            .iter()
            .filter(|r| r.l >= l_min)
            .filter(|r| r.psi_max >= lower && (r.psi_max < upper || (i == last && r.psi_max <= upper)))
            .map(|r| r.gdop_tdoa)
            .collect();
        let ecdf = match ecdf(&gdop) {
            Ok(e) => Some(e),
            Err(Error::EmptySample) => None,
            Err(e) => return Err(e),
        };
        gdop_by_psi.push(PsiBinCurve { lower, upper, ecdf });
    }
    Ok(CorrelationReport { bins, gdop_by_psi })
}

fn load_or_simulate(config: &ExperimentConfig, results: Option<&Path>) -> Result<Vec<ResultRow>> {
    match results {
        Some(path) => output::read_results(path),
        None => Ok(simulate(config)?.0),
    }
}

#[derive(serde::Serialize)]
struct CorrelationCsvRow {
    bin: String,
    rows: usize,
    available: bool,
    spearman: Option<f64>,
    pearson_gdop: Option<f64>,
    pearson_log_gdop: Option<f64>,
    pearson_used: Option<usize>,
    pearson_excluded: Option<usize>,
}

/// Writes `correlation.csv` and `gdop_by_psi_curves.csv`. Rows come from
/// `results` when given, otherwise from a fresh simulation.
pub fn run_correlation(config: &ExperimentConfig, results: Option<&Path>) -> Result<CorrelationReport> {
    config.validate()?;
    let rows = load_or_simulate(config, results)?;
    let report = correlation_report(&rows, config.l_min, &config.psi_bin_edges)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let table: Vec<_> = report
        .bins
        .iter()
        .map(|b| {
            let e = b.estimate.as_ref().ok();
            CorrelationCsvRow {
                bin: b.bin.to_string(),
                rows: b.rows,
                available: e.is_some(),
                spearman: e.map(|e| e.spearman),
                pearson_gdop: e.map(|e| e.pearson_gdop.r),
                pearson_log_gdop: e.map(|e| e.pearson_log_gdop.r),
                pearson_used: e.map(|e| e.pearson_gdop.used),
                pearson_excluded: e.map(|e| e.pearson_gdop.excluded),
            }
        })
        .collect();
    write_csv(&dir.join("correlation.csv"), CORRELATION_SCHEMA, &table)?;
    let mut curves = Vec::new();
    for c in &report.gdop_by_psi {
        if let Some(e) = &c.ecdf {
            push_curve(&mut curves, &format!("gdop_tdoa_psi_{}_{}", c.lower, c.upper), e.table());
        }
    }
    write_csv(&dir.join("gdop_by_psi_curves.csv"), CURVES_SCHEMA, &curves)?;
    Ok(report)
}

/// TDOA GDOP inside versus outside the hull for one bin. Degenerate rows are
/// left out of both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct HullSplitBin {
    pub bin: LBin,
    pub inside: Option<Ecdf>,
    pub outside: Option<Ecdf>,
    pub degenerate_rows: usize,
    pub inside_p95: Option<f64>,
    pub inside_median: Option<f64>,
    pub outside_median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullSplitReport {
    pub bins: Vec<HullSplitBin>,
}

fn split_side(values: &[f64], q: &[f64]) -> Result<(Option<Ecdf>, Vec<Option<f64>>)> {
    if values.is_empty() {
        return Ok((None, vec![None; q.len()]));
    }
    let qs = q.iter().map(|&q| quantile(values, q).map(Some)).collect::<Result<_>>()?;
    // All-infinite samples have no finite CDF table.
    let e = match ecdf(values) {
        Ok(e) => Some(e),
        Err(Error::EmptySample) => None,
        Err(e) => return Err(e),
    };
    Ok((e, qs))
}

/// Hull split for `L = l_min` and `L ≥ l_min`.
pub fn hull_split(rows: &[ResultRow], l_min: usize) -> Result<HullSplitReport> {
    let mut bins = Vec::new();
    for bin in [LBin::Exactly(l_min), LBin::AtLeast(l_min)] {
        let selected: Vec<&ResultRow> = rows.iter().filter(|r| bin.contains(r.l)).collect();
        let degenerate_rows = selected.iter().filter(|r| r.degenerate_flag).count();
        let side = |inside: bool| -> Vec<f64> {
            selected
                .iter()
                .filter(|r| !r.degenerate_flag && r.inside_hull == inside)
                .map(|r| r.gdop_tdoa)
                .collect()
        };
        let (inside, iq) = split_side(&side(true), &[0.95, 0.5])?;
        let (outside, oq) = split_side(&side(false), &[0.5])?;
        bins.push(HullSplitBin {
            bin,
            inside,
            outside,
            degenerate_rows,
            inside_p95: iq[0],
            inside_median: iq[1],
            outside_median: oq[0],
        });
    }
    Ok(HullSplitReport { bins })
}

#[derive(serde::Serialize)]
struct HullSplitCsvRow {
    bin: String,
    condition: &'static str,
    rows: usize,
    median: Option<f64>,
    p95: Option<f64>,
}

/// Writes `hull_split.csv` and `hull_split_curves.csv`.
pub fn run_hull_split(config: &ExperimentConfig, results: Option<&Path>) -> Result<HullSplitReport> {
    config.validate()?;
    let rows = load_or_simulate(config, results)?;
    let report = hull_split(&rows, config.l_min)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut table = Vec::new();
    let mut curves = Vec::new();
    for b in &report.bins {
        let count = |e: &Option<Ecdf>| e.as_ref().map_or(0, Ecdf::total);
        table.push(HullSplitCsvRow {
            bin: b.bin.to_string(),
            condition: "inside",
            rows: count(&b.inside),
            median: b.inside_median,
            p95: b.inside_p95,
        });
        table.push(HullSplitCsvRow {
            bin: b.bin.to_string(),
            condition: "outside",
            rows: count(&b.outside),
            median: b.outside_median,
            p95: None,
        });
        for (side, e) in [("inside", &b.inside), ("outside", &b.outside)] {
            if let Some(e) = e {
                push_curve(&mut curves, &format!("gdop_tdoa_{side}_{}", b.bin), e.table());
            }
        }
    }
    write_csv(&dir.join("hull_split.csv"), HULL_SPLIT_SCHEMA, &table)?;
    write_csv(&dir.join("hull_split_curves.csv"), CURVES_SCHEMA, &curves)?;
    Ok(report)
}

/// Mixture CDF of `Ψ_max` given `N ≥ l_min` under an empirical pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCurve {
    pub label: String,
    pub hearability: HearabilityTable,
    pub table: DistributionTable,
    /// Largest truncation bound over the grid.
    pub truncation_bound: f64,
}

fn weighted_curve(label: String, hearability: HearabilityTable, grid: &[f64], l_min: usize) -> Result<WeightedCurve> {
    let pmf = hearability.pmf();
    let mut bound: f64 = 0.0;
    let table = DistributionTable::tabulate(grid, |phi| {
        let w = weighted_cdf(phi, &pmf, l_min)?;
        bound = bound.max(w.truncation_bound);
        Ok(w.value)
    })?;
    Ok(WeightedCurve {
        label,
        hearability,
        table,
        truncation_bound: bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    /// Stevens CDF on the grid for each `L` in [`STEVENS_CURVE_LS`].
    pub stevens: Vec<(usize, DistributionTable)>,
    /// Weighted CDF for the configured network.
    pub weighted: WeightedCurve,
    /// One weighted CDF per sweep value, in sweep order.
    pub sweep: Vec<(f64, WeightedCurve)>,
    /// Expected station count on the grid points below `2π`.
    pub expected: Vec<(f64, ExpectedCount)>,
}

/// Analytic curves driven by empirical hearability pmfs.
pub fn analytic_report(config: &ExperimentConfig) -> Result<AnalyticReport> {
    config.validate()?;
    let pool = thread_pool(config.threads)?;
    let grid = &config.phi_grid;
    let stevens = STEVENS_CURVE_LS
        .map(|l| Ok((l, stevens_table(l, grid)?)))
        .collect::<Result<_>>()?;
    let hearability = |p: &NetworkParams| pool.install(|| empirical_hearability(p, config.n_scenarios));
    let weighted = weighted_curve("weighted".into(), hearability(&config.network)?, grid, config.l_min)?;
    let mut sweep = Vec::new();
    if let Some(s) = &config.sweep {
        for &v in &s.values {
            let table = hearability(&s.apply(&config.network, v))?;
            let label = format!("weighted_{}={v}", s.parameter.name());
            sweep.push((v, weighted_curve(label, table, grid, config.l_min)?));
        }
    }
    Ok(AnalyticReport {
        stevens,
        weighted,
        sweep,
        expected: expected_counts(&open_grid(grid))?,
    })
}

fn expected_counts(phis: &[f64]) -> Result<Vec<(f64, ExpectedCount)>> {
    phis.iter().map(|&phi| Ok((phi, expected_bs_for_target(phi)?))).collect()
}

/// Grid points strictly below `2π`, where the count is defined.
fn open_grid(grid: &[f64]) -> Vec<f64> {
    grid.iter().copied().filter(|&phi| phi < std::f64::consts::TAU).collect()
}

#[derive(serde::Serialize)]
struct ExpectedCsvRow {
    phi: f64,
    expected: f64,
    method: &'static str,
    error_bound: f64,
    std_error: Option<f64>,
}

fn write_expected(path: &Path, expected: &[(f64, ExpectedCount)]) -> Result<()> {
    let rows: Vec<_> = expected
        .iter()
        .map(|(phi, e)| {
            let (method, std_error) = match e.method {
                ExpectedCountMethod::ClosedForm => ("closed_form", None),
                ExpectedCountMethod::MonteCarlo { std_error, .. } => ("monte_carlo", Some(std_error)),
            };
            ExpectedCsvRow {
                phi: *phi,
                expected: e.value,
                method,
                error_bound: e.error_bound,
                std_error,
            }
        })
        .collect();
    write_csv(path, EXPECTED_BS_SCHEMA, &rows)
}

/// Writes `analytic_curves.csv` and `expected_bs.csv`.
pub fn run_analytic(config: &ExperimentConfig) -> Result<AnalyticReport> {
    let report = analytic_report(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let mut curves = Vec::new();
    for (l, t) in &report.stevens {
        push_curve(&mut curves, &format!("stevens_L{l}"), t);
    }
    for w in std::iter::once(&report.weighted).chain(report.sweep.iter().map(|(_, w)| w)) {
        push_curve(&mut curves, &w.label, &w.table);
    }
    write_csv(&dir.join("analytic_curves.csv"), CURVES_SCHEMA, &curves)?;
    write_expected(&dir.join("expected_bs.csv"), &report.expected)?;
    Ok(report)
}

/// Writes `expected_bs.csv` for `phis` (default: the grid below `2π`).
/// Explicit targets must lie in `(0, 2π)`.
pub fn run_expected_bs(config: &ExperimentConfig, phis: Option<&[f64]>) -> Result<Vec<(f64, ExpectedCount)>> {
    config.validate()?;
    let expected = match phis {
        Some(p) => expected_counts(p)?,
        None => expected_counts(&open_grid(&config.phi_grid))?,
    };
    std::fs::create_dir_all(&config.output_dir)?;
    write_expected(&config.output_dir.join("expected_bs.csv"), &expected)?;
    Ok(expected)
}
