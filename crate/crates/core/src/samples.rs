use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::MomentEstimate;

/// `N >= 1` finite samples of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    rows: Vec<DVector<f64>>,
}

impl SampleSet {
    pub fn new(rows: Vec<DVector<f64>>) -> Result<Self> {
        let first = rows.first().ok_or(Error::TooFewSamples { needed: 1, found: 0 })?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        for (row, v) in rows.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if let Some(col) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    index: row * dim + col,
                });
            }
        }
        Ok(SampleSet { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[DVector<f64>] {
        &self.rows
    }
}

/// Normalisation of the empirical covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceDivisor {
    /// Divide by `N`, the population form `E[(V - mu)(V - mu)^T]`.
    #[default]
    Population,
    /// Divide by `N - 1`.
    Unbiased,
}

/// Sample mean and covariance.
pub fn empirical_moments(samples: &SampleSet, divisor: CovarianceDivisor) -> Result<MomentEstimate> {
    let n = samples.dim();
    let count = samples.len();
    let denom = match divisor {
        CovarianceDivisor::Population => count as f64,
        CovarianceDivisor::Unbiased if count >= 2 => (count - 1) as f64,
        CovarianceDivisor::Unbiased => {
            return Err(Error::TooFewSamples { needed: 2, found: count })
        }
    };
    let mut mean = DVector::zeros(n);
    for v in samples.rows() {
        mean += v;
    }
    mean /= count as f64;

    let mut cov = DMatrix::zeros(n, n);
    for v in samples.rows() {
        let d = v - &mean;
        cov.ger(1.0, &d, &d, 1.0);
    }
    cov /= denom;
    MomentEstimate::new(mean, crate::linalg::symmetrize(&cov))
}
