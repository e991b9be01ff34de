use crate::error::{Error, Result};

/// Slack allowed on the `[0, 1]` range and on monotonicity of `F`.
pub const TABLE_TOL: f64 = 1e-12;

/// A cumulative distribution sampled at strictly increasing abscissae.
///
/// Read as a right-continuous step function: `F(t)` is the value at the
/// largest abscissa `<= t`, and `0` to the left of the first abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    x: Vec<f64>,
    f: Vec<f64>,
}

impl DistributionTable {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.len() != f.len() {
            return Err(Error::LengthMismatch(x.len(), f.len()));
        }
        if x.is_empty() {
            return Err(Error::InvalidTable("no points"));
        }
        if x.iter().any(|v| v.is_nan()) || f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTable("non-finite entries"));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTable("abscissae not strictly increasing"));
        }
        if f.iter().any(|&v| !(-TABLE_TOL..=1.0 + TABLE_TOL).contains(&v)) {
            return Err(Error::InvalidTable("probability outside [0, 1]"));
        }
        if f.windows(2).any(|w| w[1] < w[0] - TABLE_TOL) {
            return Err(Error::InvalidTable("F decreases"));
        }
        Ok(Self { x, f })
    }

    /// Tabulates `cdf` on `grid`.
    pub fn tabulate<F>(grid: &[f64], mut cdf: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let f = grid.iter().map(|&x| cdf(x)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), f)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.f.iter().copied())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.x.partition_point(|&x| x <= t) {
            0 => 0.0,
            i => self.f[i - 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_evaluation() {
        let t = DistributionTable::new(vec![1.0, 2.0, 3.0], vec![0.25, 0.5, 1.0]).unwrap();
        assert_eq!(t.eval(0.5), 0.0);
        assert_eq!(t.eval(1.0), 0.25);
        assert_eq!(t.eval(2.5), 0.5);
        assert_eq!(t.eval(9.0), 1.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(DistributionTable::new(vec![], vec![]).is_err());
        assert!(DistributionTable::new(vec![1.0, 1.0], vec![0.1, 0.2]).is_err());
        assert!(DistributionTable::new(vec![1.0, 2.0], vec![0.3, 0.2]).is_err());
        assert!(DistributionTable::new(vec![1.0, 2.0], vec![0.3, 1.5]).is_err());
        assert!(DistributionTable::new(vec![1.0], vec![0.3, 0.4]).is_err());
    }
}
