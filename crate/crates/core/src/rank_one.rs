//! Rank-1 decomposition `M = sum_i y_i y_i^T` of a PSD matrix with
//! prescribed squared norms `<y_i, y_i> = c_i`.
//!
//! With `M = C C^T`, `C = (sqrt(l_1) u_1 .. sqrt(l_r) u_r 0 .. 0)` and
//! `Λ = C^T C = diag(l_1, .., l_r, 0, .., 0)`, an orthonormal basis `x_i` of
//! `R^K` with `<x_i, Λ x_i> = c_i` gives `y_i = C x_i`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{outer_sum, sorted_symmetric_eigen, symmetrize};
use crate::majorization::{prefix_dominated, LengthProfile};
use crate::schur_horn::{sweep, PrescribedBasis};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Decomposition {
    /// `n x K`, column `i` is `y_i`.
    pub vectors: DMatrix<f64>,
}

impl Rank1Decomposition {
    pub fn source_dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn frame_operator(&self) -> DMatrix<f64> {
        outer_sum(&self.vectors)
    }

    pub fn squared_norms(&self) -> Vec<f64> {
        self.vectors.column_iter().map(|c| c.norm_squared()).collect()
    }
}

/// Whether lengths `c` (K of them) can be realised as a rank-1
/// decomposition of a matrix with non-zero spectrum `eigs` (r <= K,
/// non-increasing): equal totals and `sum_{i<=j} c_i <= sum_{i<=j} eigs_i`.
pub fn feasible_lengths(eigs: &[f64], profile: &LengthProfile, tol: f64) -> bool {
    if eigs.is_empty() || eigs.len() > profile.len() {
        return false;
    }
    let mut padded = eigs.to_vec();
    padded.resize(profile.len(), 0.0);
    prefix_dominated(profile, &padded, tol)
}

/// Decomposes the PSD matrix `m` into `profile.len()` outer products with
/// the prescribed squared norms.
pub fn rank_one_decompose(
    m: &DMatrix<f64>,
    profile: &LengthProfile,
    tol: &Tolerances,
) -> Result<Rank1Decomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let (values, vectors) = sorted_symmetric_eigen(&symmetrize(m));
    let lambda_max = values.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Err(Error::InfeasibleProfile);
    }
    let cutoff = tol.rank * lambda_max;
    if let Some(&lowest) = values.last() {
        if lowest < -cutoff {
            return Err(Error::NotPsd {
                min_eigenvalue: lowest,
            });
        }
    }
    let r = values.iter().take_while(|&&v| v > cutoff).count();
    decompose_spectral(&values[..r], &vectors.columns(0, r).into_owned(), profile, tol)
        .map(|(decomposition, _)| decomposition)
}

/// Decomposition from a known eigen-decomposition `M = sum l_i u_i u_i^T`
/// (`values` positive and non-increasing, `eigenvectors` the matching
/// orthonormal columns). Also returns the basis produced by the sweep.
pub(crate) fn decompose_spectral(
    values: &[f64],
    eigenvectors: &DMatrix<f64>,
    profile: &LengthProfile,
    tol: &Tolerances,
) -> Result<(Rank1Decomposition, PrescribedBasis)> {
    let k = profile.len();
    let r = values.len();
    let n = eigenvectors.nrows();
    if k < r {
        return Err(Error::TooFewVectors { k, m: r });
    }
    if !feasible_lengths(values, profile, tol.scaled_majorization(profile.total())) {
        return Err(Error::InfeasibleProfile);
    }

    let mut padded = values.to_vec();
    padded.resize(k, 0.0);
    let lambda = DMatrix::from_diagonal(&DVector::from_row_slice(&padded));
    let identity: Vec<DVector<f64>> = (0..k)
        .map(|i| {
            let mut e = DVector::zeros(k);
            e[i] = 1.0;
            e
        })
        .collect();
    let basis = sweep(&lambda, &padded, identity, profile, tol)?;

    let mut c = DMatrix::zeros(n, k);
    for (i, &value) in values.iter().enumerate() {
        c.set_column(i, &(eigenvectors.column(i) * libm::sqrt(value)));
    }
    let vectors = c * &basis.vectors;
    Ok((Rank1Decomposition { vectors }, basis))
}
