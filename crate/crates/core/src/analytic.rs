//! Closed-form distributions of the maximum angular gap.
//!
//! With `L` stations at independent uniform bearings the gaps are uniform
//! spacings of the circle, and the probability that none exceeds `φ` is an
//! alternating binomial sum (the circle-covering result of Stevens):
//!
//! ```text
//! P(Ψ_max ≤ φ | N = L) = Σ_{n=0}^{χ} (-1)^n C(L, n) (1 - nφ/2π)^(L-1),
//! χ = min{L, ⌊2π/φ⌋}
//! ```
//!
//! Terms alternate and nearly cancel when `φ` is small relative to `L`, so the
//! sums here run in double-double arithmetic. Past [`EXACT_BINOMIAL_MAX_L`],
//! or deep in the lower tail, the cancellation outgrows even that, and the
//! same quantity is computed as
//! `(L-1)!·a^(L-1)·M_L(1/a)`, `a = φ/2π`, with `M_L` the Irwin–Hall density
//! (a cardinal B-spline) evaluated by a recursion whose terms are all
//! nonnegative.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

use crate::distribution::DistributionTable;
use crate::error::{Error, Result};

/// Largest `L` evaluated by the alternating sum.
pub const EXACT_BINOMIAL_MAX_L: usize = 60;

/// The alternating sum is used only where its estimated rounding error is
/// below this fraction of the result.
const SUM_REL_TOL: f64 = 1e-13;

/// The hearability-weighted sum stops once the remaining pmf tail is below
/// this fraction of `P(N >= l_min)`.
pub const WEIGHTED_TAIL_CUTOFF: f64 = 1e-6;

/// Closed-form expected counts whose estimated rounding error exceeds this
/// relative size are replaced by a Monte Carlo estimate.
pub const CLOSED_FORM_REL_TOL: f64 = 1e-9;

/// Runs used by the Monte Carlo fallback of [`expected_bs_for_target`].
pub const FALLBACK_RUNS: u64 = 4_000;
const FALLBACK_SEED: u64 = 0x5eed_0f57_0991;

/// Unit roundoff of double-double arithmetic.
const DD_EPS: f64 = 1.3e-32;

fn fraction_of_circle(phi: f64) -> TwoFloat {
    TwoFloat::from(phi) / twofloat::consts::TAU
}

fn binomial(l: usize, n: usize) -> TwoFloat {
    let n = n.min(l - n);
    let mut c: u128 = 1;
    for k in 0..n {
        c = c * (l - k) as u128 / (k + 1) as u128;
    }
    TwoFloat::from(c)
}

/// `G_k(t) = (k-1)!·a^(k-1)·M_k(t)` obeys
/// `G_k(t) = a·t·G_{k-1}(t) + a·(k-t)·G_{k-1}(t-1)` with `G_1` the indicator of
/// `[0, 1)`; the CDF is `G_L(1/a)`.
fn stevens_by_spline(l: usize, a: f64) -> f64 {
    let x = 1.0 / a;
    // g[j] holds G_k(x - j) for the current k.
    let mut g: Vec<f64> = (0..l)
        .map(|j| if (0.0..1.0).contains(&(x - j as f64)) { 1.0 } else { 0.0 })
        .collect();
    for k in 2..=l {
        let kf = k as f64;
        for j in 0..=(l - k) {
            let t = x - j as f64;
            g[j] = if t <= 0.0 || t >= kf {
                0.0
            } else {
                a * t * g[j] + a * (kf - t) * g[j + 1]
            };
        }
    }
    g[0]
}

/// `P(Ψ_max ≤ φ)` for `l` stations at independent uniform bearings.
pub fn stevens_cdf(l: usize, phi: f64) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain {
            name: "L",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if !(phi > 0.0 && phi <= TAU) {
        return Err(Error::Domain {
            name: "phi",
            value: phi,
            expected: "(0, 2π]",
        });
    }
    if phi == TAU {
        return Ok(1.0);
    }
    if l == 1 {
        return Ok(0.0);
    }
    let frac = fraction_of_circle(phi);
    // The largest of L gaps is at least the mean gap 2π/L.
    if frac * TwoFloat::from(l as u64) <= 1.0 {
        return Ok(0.0);
    }
    if l > EXACT_BINOMIAL_MAX_L {
        return Ok(stevens_by_spline(l, frac.hi()).clamp(0.0, 1.0));
    }
    let exponent = (l - 1) as i32;
    let mut sum = TwoFloat::from(0.0);
    let mut magnitude = 0.0;
    for n in 0..=l {
        let base = TwoFloat::from(1.0) - frac * TwoFloat::from(n as u64);
        if base <= 0.0 {
            break;
        }
        let term = binomial(l, n) * base.powi(exponent);
        magnitude += term.hi();
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // Deep in the lower tail the result drops under the rounding left by the
    // cancelling terms.
    let rounding = magnitude * (4 * l + 8) as f64 * DD_EPS;
    if rounding > SUM_REL_TOL * sum.hi().abs() {
        return Ok(stevens_by_spline(l, frac.hi()).clamp(0.0, 1.0));
    }
    Ok(sum.hi().clamp(0.0, 1.0))
}

/// Stevens' CDF for `l` stations tabulated on `grid`.
pub fn stevens_table(l: usize, grid: &[f64]) -> Result<DistributionTable> {
    DistributionTable::tabulate(grid, |phi| stevens_cdf(l, phi))
}

/// `P(Ψ_max ≤ φ | N ≥ l_min)` together with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCdf {
    pub value: f64,
    /// Upper bound on `|exact − value|` from pmf mass that was skipped
    /// (tail cutoff) or never listed (pmf summing to less than one).
    pub truncation_bound: f64,
}

/// Mixes Stevens' CDF over the hearability pmf, conditioned on `N ≥ l_min`.
///
/// `pmf[L]` is `P(N = L)`. The sum stops once the remaining tail mass is below
/// [`WEIGHTED_TAIL_CUTOFF`] of `P(N ≥ l_min)`.
pub fn weighted_cdf(phi: f64, pmf: &[f64], l_min: usize) -> Result<WeightedCdf> {
    if l_min == 0 {
        return Err(Error::Domain {
            name: "l_min",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if pmf.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidParameter("pmf entries must lie in [0, 1]".into()));
    }
    let listed: f64 = pmf.iter().sum();
    if listed > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!("pmf sums to {listed} > 1")));
    }
    let tail = pmf.get(l_min..).unwrap_or(&[]);
    let mut suffix: Vec<f64> = vec![0.0; tail.len() + 1];
    for i in (0..tail.len()).rev() {
        suffix[i] = suffix[i + 1] + tail[i];
    }
    let conditioning = suffix[0];
    if conditioning <= 0.0 {
        return Err(Error::UndefinedConditional { l_min });
    }
    // Every component is exactly 1 on the full circle, truncated or not.
    if phi == TAU {
        return Ok(WeightedCdf {
            value: 1.0,
            truncation_bound: 0.0,
        });
    }
    let cutoff = WEIGHTED_TAIL_CUTOFF * conditioning;
    let mut acc = 0.0;
    let mut skipped = 0.0;
    for (i, &p) in tail.iter().enumerate() {
        if suffix[i] < cutoff {
            skipped = suffix[i];
            break;
        }
        if p > 0.0 {
            acc += stevens_cdf(l_min + i, phi)? * p;
        }
    }
    let unlisted = (1.0 - listed).max(0.0);
    Ok(WeightedCdf {
        value: (acc / conditioning).clamp(0.0, 1.0),
        truncation_bound: (skipped + unlisted) / conditioning,
    })
}

/// How an [`ExpectedCount`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedCountMethod {
    ClosedForm,
    /// The alternating closed form lost too many digits; the value is a
    /// stopping-time Monte Carlo estimate and should be treated as a warning.
    MonteCarlo { runs: u64, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCount {
    pub value: f64,
    pub method: ExpectedCountMethod,
    /// Estimated absolute rounding error of the closed-form sum.
    pub error_bound: f64,
}

impl ExpectedCount {
    pub fn is_fallback(&self) -> bool {
        matches!(self.method, ExpectedCountMethod::MonteCarlo { .. })
    }
}

/// Closed-form expected number of uniform bearings needed before the largest
/// gap drops to `phi` or below, with an estimate of its rounding error.
///
/// With `a = φ/2π` and `m` the number of `k >= 1` with `1 − ka > 0`:
///
/// ```text
/// E[L] = 1 + Σ_{k=1}^{m} (-1)^(k+1) (1 - ka)^(k-1) / (ka)^(k+1)
/// ```
pub fn expected_bs_closed_form(phi: f64) -> Result<(f64, f64)> {
    check_open_circle(phi)?;
    let a = fraction_of_circle(phi);
    let one = TwoFloat::from(1.0);
    let mut sum = one;
    let mut magnitude = 1.0;
    let mut k: u64 = 1;
    loop {
        let ka = a * TwoFloat::from(k);
        let base = one - ka;
        if base <= 0.0 {
            break;
        }
        let term = base.powi((k - 1) as i32) / ka.powi((k + 1) as i32);
        if !term.hi().is_finite() {
            return Ok((f64::NAN, f64::INFINITY));
        }
        magnitude += term.hi().abs() * (4 * k + 8) as f64;
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    Ok((sum.hi(), magnitude * DD_EPS))
}

/// Expected number of stations (at uniform bearings) required for
/// `Ψ_max ≤ phi`, for `0 < phi < 2π`.
///
/// Uses the closed form when it is numerically trustworthy, otherwise falls
/// back to [`stopping_time_estimate`] and says so in the returned method.
pub fn expected_bs_for_target(phi: f64) -> Result<ExpectedCount> {
    let (value, error_bound) = expected_bs_closed_form(phi)?;
    // At least 2π/φ points are needed, so that floor is a safe scale for the
    // relative error; the closed form itself may be garbage when it fails.
    let floor = (TAU / phi).max(2.0);
    if value.is_finite() && error_bound <= CLOSED_FORM_REL_TOL * floor {
        return Ok(ExpectedCount {
            value,
            method: ExpectedCountMethod::ClosedForm,
            error_bound,
        });
    }
    let (mean, std_error) = stopping_time_estimate(phi, FALLBACK_RUNS, FALLBACK_SEED)?;
    Ok(ExpectedCount {
        value: mean,
        method: ExpectedCountMethod::MonteCarlo {
            runs: FALLBACK_RUNS,
            std_error,
        },
        error_bound,
    })
}

fn check_open_circle(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < TAU {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "phi",
            value: phi,
            expected: "(0, 2π)",
        })
    }
}

/// Monte Carlo mean (and standard error) of the number of uniform bearings
/// drawn until the largest gap is at most `phi`.
pub fn stopping_time_estimate(phi: f64, runs: u64, seed: u64) -> Result<(f64, f64)> {
    check_open_circle(phi)?;
    if runs < 2 {
        return Err(Error::InvalidParameter("need at least two runs".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..runs {
        let n = GapTracker::stopping_count(phi, &mut rng) as f64;
        sum += n;
        sum_sq += n * n;
    }
    let r = runs as f64;
    let mean = sum / r;
    let var = (sum_sq - r * mean * mean) / (r - 1.0);
    Ok((mean, (var.max(0.0) / r).sqrt()))
}

/// Sorted bearings plus a multiset of the current gaps.
///
/// Bearings and gaps are non-negative, so their IEEE bit patterns order the
/// same way as the values.
#[derive(Default)]
struct GapTracker {
    points: BTreeSet<u64>,
    gaps: BTreeMap<u64, u32>,
}

impl GapTracker {
    fn stopping_count(phi: f64, rng: &mut impl Rng) -> usize {
        let mut tracker = Self::default();
        loop {
            let theta = rng.random::<f64>() * TAU;
            tracker.insert(theta);
            if tracker.max_gap() <= phi {
                return tracker.points.len();
            }
        }
    }

    fn gap(from: f64, to: f64) -> f64 {
        if to > from {
            to - from
        } else {
            to - from + TAU
        }
    }

    fn add_gap(&mut self, g: f64) {
        *self.gaps.entry(g.to_bits()).or_insert(0) += 1;
    }

    fn remove_gap(&mut self, g: f64) {
        let key = g.to_bits();
        let count = self.gaps.get_mut(&key).expect("gap present");
        *count -= 1;
        if *count == 0 {
            self.gaps.remove(&key);
        }
    }

    fn insert(&mut self, theta: f64) {
        let key = theta.to_bits();
        if !self.points.insert(key) {
            // Same bearing twice: a zero gap.
            self.add_gap(0.0);
            return;
        }
        if self.points.len() == 1 {
            self.add_gap(TAU);
            return;
        }
        let first = *self.points.iter().next().expect("nonempty");
        let last = *self.points.iter().next_back().expect("nonempty");
        let prev = self.points.range(..key).next_back().copied().unwrap_or(last);
        let next = self.points.range(key + 1..).next().copied().unwrap_or(first);
        let (prev, next) = (f64::from_bits(prev), f64::from_bits(next));
        self.remove_gap(Self::gap(prev, next));
        self.add_gap(Self::gap(prev, theta));
        self.add_gap(Self::gap(theta, next));
    }

    fn max_gap(&self) -> f64 {
        f64::from_bits(*self.gaps.keys().next_back().expect("nonempty"))
    }
}
