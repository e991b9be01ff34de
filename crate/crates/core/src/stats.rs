//! Estimators behind the correlation tables and CDF comparisons.
//!
//! GDOP samples can be `+∞` (collinear hearable sets). Empirical CDFs keep
//! that mass separately, Spearman ranks it above every finite value, and
//! Pearson drops the pair and reports how many were dropped.

use std::cmp::Ordering;

use crate::distribution::DistributionTable;
use crate::error::{Error, Result};

/// Empirical CDF with the mass at `+∞` tracked separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    table: DistributionTable,
    total: usize,
    infinite: usize,
}

impl Ecdf {
    /// Step function over the finite values; its last value is the finite mass.
    pub fn table(&self) -> &DistributionTable {
        &self.table
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            1.0
        } else {
            self.table.eval(x)
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn infinite_count(&self) -> usize {
        self.infinite
    }

    pub fn infinite_mass(&self) -> f64 {
        self.infinite as f64 / self.total as f64
    }
}

fn sorted_finite(values: &[f64]) -> Result<(Vec<f64>, usize)> {
    let mut finite = Vec::with_capacity(values.len());
    let mut infinite = 0;
    for &v in values {
        if v.is_nan() {
            return Err(Error::NotANumber);
        } else if v == f64::INFINITY {
            infinite += 1;
        } else if v == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter("-inf in sample".into()));
        } else {
            finite.push(v);
        }
    }
    finite.sort_by(f64::total_cmp);
    Ok((finite, infinite))
}

/// Right-continuous empirical CDF of `values`.
pub fn ecdf(values: &[f64]) -> Result<Ecdf> {
    let (finite, infinite) = sorted_finite(values)?;
    if finite.is_empty() {
        return Err(Error::EmptySample);
    }
    let total = values.len();
    let mut x = Vec::new();
    let mut f = Vec::new();
    for (i, &v) in finite.iter().enumerate() {
        if x.last() == Some(&v) {
            *f.last_mut().expect("paired with x") = (i + 1) as f64 / total as f64;
        } else {
            x.push(v);
            f.push((i + 1) as f64 / total as f64);
        }
    }
    Ok(Ecdf {
        table: DistributionTable::new(x, f)?,
        total,
        infinite,
    })
}

/// Sup-norm distance between two step-function CDFs, over their merged abscissae.
pub fn ks_distance(a: &DistributionTable, b: &DistributionTable) -> f64 {
    a.x()
        .iter()
        .chain(b.x())
        .map(|&t| (a.eval(t) - b.eval(t)).abs())
        .fold(0.0, f64::max)
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against a continuous `cdf`.
///
/// Checks both sides of every jump of the empirical CDF, so it is exact for
/// continuous `cdf`. Infinite samples count as mass above every finite point.
pub fn ks_statistic<F>(samples: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (finite, _) = sorted_finite(samples)?;
    if finite.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in finite.iter().enumerate() {
        let fx = cdf(x);
        d = d.max((i + 1) as f64 / n - fx).max(fx - i as f64 / n);
    }
    Ok(d)
}

/// Average ranks (1-based) with ties sharing their mean rank.
fn mid_ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && values[order[end]].partial_cmp(&values[order[start]]) == Some(Ordering::Equal)
        {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    Ok(ranks)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two pairs"));
    }
    Ok(())
}

/// Product-moment correlation of finite, paired data (two-pass).
fn product_moment(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation with mid-ranks for ties; `+∞` ranks highest.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    product_moment(&mid_ranks(x)?, &mid_ranks(y)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonEstimate {
    pub r: f64,
    /// Pairs that entered the estimate.
    pub used: usize,
    /// Pairs dropped because a value was infinite.
    pub excluded: usize,
}

/// Pearson correlation of `x` with `y` (or with `ln y`).
///
/// Pairs with an infinite member are excluded and counted. With
/// `log_transform_y` every remaining `y` must be positive.
pub fn pearson_r(x: &[f64], y: &[f64], log_transform_y: bool) -> Result<PearsonEstimate> {
    check_pair(x, y)?;
    let mut xs = Vec::with_capacity(x.len());
    let mut ys = Vec::with_capacity(y.len());
    for (&a, &b) in x.iter().zip(y) {
        if a.is_nan() || b.is_nan() {
            return Err(Error::NotANumber);
        }
        if a.is_infinite() || b.is_infinite() {
            continue;
        }
        if log_transform_y {
            if b <= 0.0 {
                return Err(Error::Domain {
                    name: "y",
                    value: b,
                    expected: "> 0 for log transform",
                });
            }
            ys.push(b.ln());
        } else {
            ys.push(b);
        }
        xs.push(a);
    }
    let used = xs.len();
    if used < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two finite pairs"));
    }
    Ok(PearsonEstimate {
        r: product_moment(&xs, &ys)?,
        used,
        excluded: x.len() - used,
    })
}

/// Nearest-rank quantile; `+∞` values sort last.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain {
            name: "q",
            value: q,
            expected: "[0, 1]",
        });
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NotANumber);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}
