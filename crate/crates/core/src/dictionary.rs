//! The optimal-dictionary pipeline, the pseudo-inverse representation
//! scheme and cost evaluation.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chain_qp::{
    extract_partition_relative, solve_chain_qp, spectrum_from_partition, ChainQpProblem,
    ChainQpSolution, OptimalSpectrum,
};
use crate::error::{Error, Result};
use crate::linalg::{outer_sum, psd_pseudo_inverse, range_projector, sorted_symmetric_eigen};
use crate::majorization::{collapse_lengths, j_value, BlockPartition, LengthProfile, RealSequence};
use crate::rank_one::decompose_spectral;
use crate::schur_horn::SweepStep;
use crate::spectral::{spectral_decompose, MomentEstimate, SpectralData};
use crate::tolerance::Tolerances;

const NORM_TOL: f64 = 1e-9;
const FRAME_TOL: f64 = 1e-8;

/// Center, vectors of prescribed squared lengths and the derived frame data.
///
/// Construct with [`Dictionary::from_parts`] (which checks every invariant)
/// or through [`build_optimal_dictionary`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    center: DVector<f64>,
    vectors: DMatrix<f64>,
    profile: LengthProfile,
    frame_operator: DMatrix<f64>,
    spectrum: OptimalSpectrum,
    cost: f64,
    pinv: DMatrix<f64>,
}

fn violated(invariant: &'static str, detail: alloc::string::String) -> Error {
    Error::InvariantViolated { invariant, detail }
}

impl Dictionary {
    /// Assembles a dictionary and re-checks its invariants: positive
    /// non-increasing lengths, `<d_i, d_i> = c_i`, `M = sum d_i d_i^T`,
    /// a positive non-increasing spectrum that matches the non-zero
    /// eigenvalues of `M` and sums to `sum c_i`, and a finite cost.
    pub fn from_parts(
        center: DVector<f64>,
        vectors: DMatrix<f64>,
        lengths: Vec<f64>,
        spectrum: Vec<f64>,
        frame_operator: DMatrix<f64>,
        cost: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(violated("center is non-empty", "dimension 0".to_string()));
        }
        let profile = LengthProfile::new(lengths)
            .map_err(|e| violated("lengths are positive and non-increasing", format!("{e}")))?;
        if vectors.ncols() != profile.len() {
            return Err(violated(
                "one vector per length",
                format!("{} vectors, {} lengths", vectors.ncols(), profile.len()),
            ));
        }
        if vectors.nrows() != n {
            return Err(violated(
                "vectors share the center's dimension",
                format!("vectors have dimension {}, center {n}", vectors.nrows()),
            ));
        }
        if center.iter().chain(vectors.iter()).any(|v| !v.is_finite()) {
            return Err(violated("entries are finite", "center or vectors".to_string()));
        }
        for (i, col) in vectors.column_iter().enumerate() {
            let norm = col.norm_squared();
            let c = profile[i];
            if (norm - c).abs() > NORM_TOL * c.max(1.0) {
                return Err(violated(
                    "squared norm of each vector equals its length",
                    format!("vector {i}: |d|^2 = {norm}, length {c}"),
                ));
            }
        }
        if frame_operator.shape() != (n, n) {
            return Err(violated(
                "frame operator is n x n",
                format!("shape {:?}, n = {n}", frame_operator.shape()),
            ));
        }
        let induced = outer_sum(&vectors);
        let frame_err = (&induced - &frame_operator).norm();
        if frame_err.is_nan() || frame_err > FRAME_TOL * induced.norm().max(1.0) {
            return Err(violated(
                "frame operator equals the sum of outer products",
                format!("Frobenius gap {frame_err:e}"),
            ));
        }
        if spectrum.is_empty() || spectrum.len() > n {
            return Err(violated(
                "spectrum has between 1 and n entries",
                format!("{} entries, n = {n}", spectrum.len()),
            ));
        }
        if spectrum.iter().any(|l| !(l.is_finite() && *l > 0.0))
            || spectrum.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12))
        {
            return Err(violated("spectrum is positive and non-increasing", format!("{spectrum:?}")));
        }
        let total: f64 = spectrum.iter().sum();
        if (total - profile.total()).abs() > NORM_TOL * profile.total().max(1.0) {
            return Err(violated(
                "spectrum sums to the total length",
                format!("sum lambda = {total}, sum c = {}", profile.total()),
            ));
        }
        let (frame_eigs, _) = sorted_symmetric_eigen(&induced);
        let scale = frame_eigs[0].abs().max(1.0);
        for (i, eig) in frame_eigs.iter().enumerate() {
            let expected = spectrum.get(i).copied().unwrap_or(0.0);
            if (eig - expected).abs() > FRAME_TOL * scale {
                return Err(violated(
                    "frame operator eigenvalues equal the spectrum",
                    format!("eigenvalue {i}: {eig} vs {expected}"),
                ));
            }
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(violated("cost is finite and non-negative", format!("{cost}")));
        }

        // D^+ = D^T (D D^T)^+; the SVD route loses accuracy on wide D.
        let pinv = vectors.transpose() * psd_pseudo_inverse(&induced, tol.rank);
        Ok(Dictionary {
            center,
            vectors,
            profile,
            frame_operator,
            spectrum: OptimalSpectrum {
                lambda_star: spectrum,
            },
            cost,
            pinv,
        })
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// `n x K`, column `i` is `d_i`.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn profile(&self) -> &LengthProfile {
        &self.profile
    }

    /// `sum_i d_i d_i^T`.
    pub fn frame_operator(&self) -> &DMatrix<f64> {
        &self.frame_operator
    }

    pub fn spectrum(&self) -> &OptimalSpectrum {
        &self.spectrum
    }

    /// Optimal expected cost `p*` recorded at construction.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of vectors `K`.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    /// `D^+`, `K x n`.
    pub fn pseudo_inverse(&self) -> &DMatrix<f64> {
        &self.pinv
    }
}

/// Everything the pipeline computed on the way to the dictionary.
#[derive(Debug, Clone)]
pub struct Design {
    pub dictionary: Dictionary,
    pub spectral: SpectralData,
    pub collapsed: RealSequence,
    pub problem: ChainQpProblem,
    pub dual: ChainQpSolution,
    pub partition: BlockPartition,
    pub sweep: Vec<SweepStep>,
}

impl Design {
    pub fn effective_rank(&self) -> usize {
        self.spectral.rank()
    }

    /// Optimal cost `p* = J(sqrt(sigma), c', partition)`.
    pub fn p_star(&self) -> f64 {
        self.dictionary.cost
    }

    /// Optimal value of the chain QP; `-q*` equals `p*`.
    pub fn q_star(&self) -> f64 {
        self.dual.q_star
    }

    /// `M* = sum lambda*_i u_i u_i^T` on the retained eigenvectors.
    pub fn target_frame_operator(&self) -> DMatrix<f64> {
        let u = &self.spectral.eigenvectors;
        let lambda = DMatrix::from_diagonal(&DVector::from_row_slice(
            &self.dictionary.spectrum.lambda_star,
        ));
        u * lambda * u.transpose()
    }
}

/// Runs the full pipeline and keeps the intermediate results.
pub fn design(moments: &MomentEstimate, profile: &LengthProfile, tol: &Tolerances) -> Result<Design> {
    let spectral = spectral_decompose(moments, tol.drop)?;
    let m = spectral.rank();
    let k = profile.len();
    if k < m {
        return Err(Error::TooFewVectors { k, m });
    }
    let collapsed = collapse_lengths(profile, m)?;
    let problem = ChainQpProblem::new(collapsed.to_vec(), spectral.eigenvalues.clone())?;
    let dual = solve_chain_qp(&problem)?;
    let partition = extract_partition_relative(&dual, tol.partition);
    let spectrum = spectrum_from_partition(&problem, &partition)?;
    let cost = j_value(&spectral.sqrt_eigenvalues(), &collapsed, &partition)?;

    let (decomposition, basis) =
        decompose_spectral(&spectrum.lambda_star, &spectral.eigenvectors, profile, tol)?;
    let frame_operator = decomposition.frame_operator();
    let dictionary = Dictionary::from_parts(
        moments.mean().clone(),
        decomposition.vectors,
        profile.to_vec(),
        spectrum.lambda_star,
        frame_operator,
        cost,
        tol,
    )?;
    Ok(Design {
        dictionary,
        spectral,
        collapsed,
        problem,
        dual,
        partition,
        sweep: basis.steps,
    })
}

/// Optimal dictionary for the given moments and length profile. The
/// center is the mean.
pub fn build_optimal_dictionary(
    moments: &MomentEstimate,
    profile: &LengthProfile,
    tol: &Tolerances,
) -> Result<Dictionary> {
    design(moments, profile, tol).map(|d| d.dictionary)
}

/// Least-squares coefficients and the residual `|D r - (v - c*)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub coefficients: DVector<f64>,
    pub residual: f64,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Minimum-norm coefficients `D^+ (v - c*)` with their residual, without
/// judging representability.
pub fn encode_least_squares(dict: &Dictionary, v: &DVector<f64>) -> Result<Encoding> {
    check_dim(dict.dim(), v.len())?;
    let centered = v - &dict.center;
    let coefficients = &dict.pinv * &centered;
    let residual = (&dict.vectors * &coefficients - &centered).norm();
    Ok(Encoding {
        coefficients,
        residual,
    })
}

/// Minimum-norm coefficients of `v - c*`; fails when `v` is not in
/// `c* + span(d_i)` up to `tol.representation` (relative to `|v - c*|`).
pub fn encode(dict: &Dictionary, v: &DVector<f64>, tol: &Tolerances) -> Result<DVector<f64>> {
    let enc = encode_least_squares(dict, v)?;
    let scale = (v - &dict.center).norm().max(1.0);
    if enc.residual > tol.representation * scale {
        return Err(Error::OutsideSpan {
            residual: enc.residual,
        });
    }
    Ok(enc.coefficients)
}

/// `c* + sum_i r_i d_i`.
pub fn reconstruct(dict: &Dictionary, r: &DVector<f64>) -> Result<DVector<f64>> {
    if r.len() != dict.len() {
        return Err(Error::LengthMismatch {
            expected: dict.len(),
            found: r.len(),
        });
    }
    Ok(&dict.center + &dict.vectors * r)
}

/// `sum_i sigma_i / lambda_i`.
pub fn theoretical_cost(spectral: &SpectralData, spectrum: &OptimalSpectrum) -> Result<f64> {
    let lambda = &spectrum.lambda_star;
    if lambda.len() != spectral.rank() {
        return Err(Error::LengthMismatch {
            expected: spectral.rank(),
            found: lambda.len(),
        });
    }
    let mut total = 0.0;
    for (index, (s, l)) in spectral.eigenvalues.iter().zip(lambda).enumerate() {
        if *l == 0.0 {
            return Err(Error::ZeroDual { index });
        }
        total += s / l;
    }
    Ok(total)
}

/// Expected cost `E |D^+ (V - c)|^2 = trace((Sigma* + (mu - c)(mu - c)^T) M^+)`
/// of representing a vector with the given moments around the dictionary's
/// center. Fails when the centered second moment leaks outside the span of
/// the dictionary.
pub fn expected_cost(dict: &Dictionary, moments: &MomentEstimate, tol: &Tolerances) -> Result<f64> {
    let n = dict.dim();
    check_dim(n, moments.dim())?;
    let offset = moments.mean() - &dict.center;
    let mut second = moments.covariance().clone();
    second.ger(1.0, &offset, &offset, 1.0);
    let scale = second.norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let outside = DMatrix::identity(n, n) - range_projector(&dict.frame_operator, tol.rank);
    let leakage = (&outside * &second * &outside).norm();
    let slack = tol.drop.max(tol.rank) * libm::sqrt(n as f64) * scale * 2.0;
    if leakage > slack {
        return Err(Error::SpanDeficiency { leakage });
    }
    let pinv = psd_pseudo_inverse(&dict.frame_operator, tol.rank);
    Ok((second * pinv).trace())
}
