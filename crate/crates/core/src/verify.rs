//! Independent checks: Monte-Carlo cost, tight-frame residual, a grid
//! oracle for the chain QP and a robustness sweep under perturbed moments.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::chain_qp::{qp_objective, ChainQpProblem};
use crate::dictionary::{build_optimal_dictionary, encode_least_squares, expected_cost, Dictionary};
use crate::error::{Error, Result};
use crate::linalg::{sorted_symmetric_eigen, symmetrize};
use crate::majorization::LengthProfile;
use crate::samples::SampleSet;
use crate::spectral::MomentEstimate;
use crate::tolerance::Tolerances;

/// Largest chain the grid oracle accepts.
pub const GRID_ORACLE_MAX_DIM: usize = 4;

/// Sample mean of `|r(v)|^2` with its spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub mean: f64,
    pub sample_std: f64,
    pub count: usize,
}

impl CostEstimate {
    /// `sample_std / sqrt(count)`.
    pub fn standard_error(&self) -> f64 {
        self.sample_std / libm::sqrt(self.count as f64)
    }
}

/// Average squared coefficient norm over the samples, accumulated in
/// sample order.
pub fn monte_carlo_cost(dict: &Dictionary, samples: &SampleSet) -> Result<CostEstimate> {
    if samples.dim() != dict.dim() {
        return Err(Error::DimensionMismatch {
            expected: dict.dim(),
            found: samples.dim(),
        });
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, v) in samples.rows().iter().enumerate() {
        let cost = encode_least_squares(dict, v)?.coefficients.norm_squared();
        let delta = cost - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (cost - mean);
    }
    let count = samples.len();
    let sample_std = if count > 1 {
        libm::sqrt(m2 / (count - 1) as f64)
    } else {
        0.0
    };
    Ok(CostEstimate {
        mean,
        sample_std,
        count,
    })
}

/// `|D D^T - (sum c / n) I|_F / sqrt(n)`; zero exactly for tight frames.
pub fn tight_frame_residual(dict: &Dictionary) -> f64 {
    let n = dict.dim();
    let level = dict.profile().total() / n as f64;
    let gap = dict.frame_operator() - DMatrix::identity(n, n) * level;
    gap.norm() / libm::sqrt(n as f64)
}

/// Best point of the chain QP restricted to a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub spacing: f64,
}

/// Exact minimum of the chain QP over `{0, h, ..., steps * h}^m` with
/// `h = max_t(sqrt(s_t)/a_t) / steps`, found by dynamic programming over
/// the ordering constraint.
pub fn qp_grid_oracle(problem: &ChainQpProblem, steps: usize) -> Result<GridOptimum> {
    let m = problem.dim();
    if m > GRID_ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge {
            m,
            max: GRID_ORACLE_MAX_DIM,
        });
    }
    if steps == 0 {
        return Err(Error::OracleSteps);
    }
    let upper = problem.free_minimizers().fold(0.0, f64::max);
    let spacing = upper / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|j| j as f64 * spacing).collect();
    let roots: Vec<f64> = problem.targets().iter().map(|s| libm::sqrt(*s)).collect();

    // best[j]: minimum over chains ending at grid[j]; choice[t][j]: argmin
    // of the previous level at or below j.
    let mut best = vec![0.0; grid.len()];
    let mut choice: Vec<Vec<usize>> = Vec::with_capacity(m);
    for (t, (&a, &root)) in problem.weights().iter().zip(&roots).enumerate() {
        let mut running = (f64::INFINITY, 0usize);
        let mut arg = vec![0usize; grid.len()];
        let mut next = vec![0.0; grid.len()];
        for (j, x) in grid.iter().enumerate() {
            let prior = if t == 0 {
                0.0
            } else {
                if best[j] < running.0 {
                    running = (best[j], j);
                }
                arg[j] = running.1;
                running.0
            };
            next[j] = prior + a * x * x - 2.0 * root * x;
        }
        best = next;
        choice.push(arg);
    }
    let (mut j, _) = best
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, v)| if *v < acc.1 { (j, *v) } else { acc });
    let mut x = vec![0.0; m];
    for t in (0..m).rev() {
        x[t] = grid[j];
        j = choice[t][j];
    }
    let value = qp_objective(problem, &x)?;
    Ok(GridOptimum { x, value, spacing })
}

/// One row of [`robustness_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessRow {
    pub delta: f64,
    /// Expected cost of the dictionary built from perturbed moments, minus
    /// the optimum, both measured under the true moments.
    pub cost_gap: f64,
    /// The perturbed covariance had negative eigenvalues set to zero.
    pub psd_clipped: bool,
}

/// Perturbs the mean by `delta |mu| g` and the covariance by
/// `delta |Sigma|_F G` for a unit vector `g` and a symmetric `G` of unit
/// Frobenius norm (both drawn once from `seed`), rebuilds the dictionary
/// and reports its excess cost under the true moments.
pub fn robustness_sweep(
    moments: &MomentEstimate,
    profile: &LengthProfile,
    deltas: &[f64],
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<RobustnessRow>> {
    if let Some(bad) = deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::InvalidDelta(*bad));
    }
    let n = moments.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let g_norm: f64 = g.norm();
    if g_norm > 0.0 {
        g /= g_norm;
    }
    let raw = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let mut big_g = symmetrize(&raw);
    let big_g_norm = big_g.norm();
    if big_g_norm > 0.0 {
        big_g /= big_g_norm;
    }

    let baseline_dict = build_optimal_dictionary(moments, profile, tol)?;
    let baseline = expected_cost(&baseline_dict, moments, tol)?;
    let mean_scale = moments.mean().norm();
    let cov_scale = moments.covariance().norm();

    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mean = moments.mean() + &g * (delta * mean_scale);
        let cov = moments.covariance() + &big_g * (delta * cov_scale);
        let (cov, psd_clipped) = clip_psd(&cov);
        let perturbed = MomentEstimate::new(mean, cov)?;
        let dict = build_optimal_dictionary(&perturbed, profile, tol)?;
        let cost = expected_cost(&dict, moments, tol)?;
        rows.push(RobustnessRow {
            delta,
            cost_gap: cost - baseline,
            psd_clipped,
        });
    }
    Ok(rows)
}

fn clip_psd(cov: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let (values, vectors) = sorted_symmetric_eigen(cov);
    if values.iter().all(|v| *v >= 0.0) {
        return (symmetrize(cov), false);
    }
    let clipped = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|v| v.max(0.0)),
    ));
    (symmetrize(&(&vectors * clipped * vectors.transpose())), true)
}

/// `count` seeded draws from the Gaussian with the given moments.
pub fn sample_gaussian(moments: &MomentEstimate, count: usize, seed: u64) -> Result<SampleSet> {
    let (values, vectors) = sorted_symmetric_eigen(moments.covariance());
    let root = &vectors
        * DMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|v| libm::sqrt(v.max(0.0))),
        ));
    let n = moments.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..count)
        .map(|_| {
            let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            moments.mean() + &root * z
        })
        .collect();
    SampleSet::new(rows)
}
