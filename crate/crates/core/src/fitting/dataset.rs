use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sweep rows `(x, y, weight)`: at least four, `x` strictly increasing,
/// weights positive, everything finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub weight: Vec<f64>,
}

impl SweepDataset {
    pub const MIN_ROWS: usize = 4;

    pub fn new(x: Vec<f64>, y: Vec<f64>, weight: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() != weight.len() {
            return Err(Error::InvalidDataset("columns have different lengths"));
        }
        if x.len() < Self::MIN_ROWS {
            return Err(Error::InvalidDataset("at least four rows are required"));
        }
        if x.iter().chain(&y).chain(&weight).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite value"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidDataset("independent variable must be strictly increasing"));
        }
        if weight.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidDataset("weights must be positive"));
        }
        Ok(Self { x, y, weight })
    }

    /// Unit weights.
    pub fn unweighted(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let w = alloc::vec![1.0; x.len()];
        Self::new(x, y, w)
    }

    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect(), rows.iter().map(|r| r.2).collect())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn with_weights_scaled(&self, factor: f64) -> Self {
        Self { weight: self.weight.iter().map(|w| w * factor).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation() {
        assert!(SweepDataset::unweighted(vec![1.0, 2.0, 3.0], vec![0.0; 3]).is_err());
        assert!(SweepDataset::unweighted(vec![1.0, 2.0, 2.0, 3.0], vec![0.0; 4]).is_err());
        assert!(SweepDataset::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 4], vec![1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(SweepDataset::unweighted(vec![1.0, 2.0, 3.0, f64::NAN], vec![0.0; 4]).is_err());
        assert!(SweepDataset::unweighted(vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 4]).is_ok());
    }
}
