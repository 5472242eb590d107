//! First two moments of the random vector and the spectral data derived
//! from its covariance.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{sorted_symmetric_eigen, symmetrize};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Mean `mu` and covariance `Sigma*` of a random vector in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl MomentEstimate {
    /// Validates dimensions, finiteness, symmetry (relative `1e-12`) and
    /// positive semidefiniteness (relative `-1e-10` on eigenvalues). The
    /// stored covariance is exactly symmetric.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if !covariance.is_square() {
            return Err(Error::NotSquare {
                rows: covariance.nrows(),
                cols: covariance.ncols(),
            });
        }
        let n = covariance.nrows();
        if n == 0 {
            return Err(Error::Empty);
        }
        if mean.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mean.len(),
            });
        }
        if let Some(index) = mean.iter().chain(covariance.iter()).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let scale = covariance.amax().max(1.0);
        let asymmetry = (&covariance - covariance.transpose()).amax();
        if asymmetry > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let covariance = symmetrize(&covariance);
        let (values, _) = sorted_symmetric_eigen(&covariance);
        let lowest = values[n - 1];
        if lowest < -PSD_TOL * values[0].max(1.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: lowest,
            });
        }
        Ok(MomentEstimate { mean, covariance })
    }

    /// Zero-mean moments.
    pub fn centered(covariance: DMatrix<f64>) -> Result<Self> {
        let n = covariance.nrows();
        MomentEstimate::new(DVector::zeros(n), covariance)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// Retained covariance eigenpairs `sigma_1 >= ... >= sigma_m > drop * sigma_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// `n x m`, orthonormal columns.
    pub eigenvectors: DMatrix<f64>,
    pub drop_tol: f64,
}

impl SpectralData {
    /// Effective rank `m`.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    pub fn sqrt_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|s| libm::sqrt(*s)).collect()
    }
}

/// Symmetric eigendecomposition of the covariance, discarding eigenvalues
/// at or below `drop_tol * sigma_1`.
pub fn spectral_decompose(moments: &MomentEstimate, drop_tol: f64) -> Result<SpectralData> {
    if !(drop_tol >= 0.0 && drop_tol.is_finite()) {
        return Err(Error::InvariantViolated {
            invariant: "drop tolerance is finite and non-negative",
            detail: format!("{drop_tol}"),
        });
    }
    let (values, vectors) = sorted_symmetric_eigen(moments.covariance());
    let top = values[0];
    if top <= 0.0 {
        return Err(Error::ZeroCovariance);
    }
    let m = values.iter().take_while(|&&v| v > drop_tol * top).count();
    Ok(SpectralData {
        eigenvalues: values[..m].to_vec(),
        eigenvectors: vectors.columns(0, m).into_owned(),
        drop_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Covariance of the three-rectangle density used in the R^2 example.
    fn r2_moments() -> MomentEstimate {
        MomentEstimate::new(
            DVector::from_row_slice(&[-0.75, 0.5]),
            DMatrix::from_row_slice(2, 2, &[6.7708, 3.1250, 3.1250, 4.5833]),
        )
        .unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let moments = MomentEstimate::centered(DMatrix::identity(3, 3)).unwrap();
        let data = spectral_decompose(&moments, 1e-9).unwrap();
        assert_eq!(data.rank(), 3);
        assert!(data.eigenvalues.iter().all(|s| (s - 1.0).abs() < 1e-14));
        let gram = data.eigenvectors.transpose() * &data.eigenvectors;
        assert!((gram - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn r3_example_spectrum() {
        let cov = DMatrix::from_row_slice(
            3,
            3,
            &[0.2855, -0.1445, -0.0919, -0.1445, 0.2855, 0.0919, -0.0919, 0.0919, 0.4300],
        );
        let data = spectral_decompose(&MomentEstimate::centered(cov.clone()).unwrap(), 1e-9).unwrap();
        for (got, want) in data.eigenvalues.iter().zip([0.56, 0.3, 0.1410]) {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
        for (i, &s) in data.eigenvalues.iter().enumerate() {
            let u = data.eigenvectors.column(i);
            assert!((&cov * u - u * s).norm() < 1e-8);
        }
    }

    #[test]
    fn tiny_eigenvalue_dropped() {
        let cov = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 1e-15]));
        let data = spectral_decompose(&MomentEstimate::centered(cov).unwrap(), 1e-9).unwrap();
        assert_eq!(data.rank(), 1);
    }

    #[test]
    fn zero_covariance_rejected() {
        let moments = MomentEstimate::centered(DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(spectral_decompose(&moments, 1e-9), Err(Error::ZeroCovariance));
    }

    #[test]
    fn sign_convention() {
        let data = spectral_decompose(&r2_moments(), 1e-9).unwrap();
        for col in data.eigenvectors.column_iter() {
            let pivot = col.iamax();
            assert!(col[pivot] > 0.0);
        }
    }

    #[test]
    fn moment_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(MomentEstimate::centered(asym), Err(Error::NotSymmetric { .. })));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(MomentEstimate::centered(indefinite), Err(Error::NotPsd { .. })));
        assert!(matches!(
            MomentEstimate::new(DVector::zeros(3), DMatrix::identity(2, 2)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(
            MomentEstimate::centered(DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }
}
