//! The chain-ordered quadratic program
//!
//! ```text
//! minimise   sum_t a_t x_t^2 - 2 sqrt(s_t) x_t
//! subject to 0 <= x_1 <= x_2 <= ... <= x_m
//! ```
//!
//! Completing the square turns it into a weighted isotonic regression of
//! the targets `sqrt(s_t) / a_t` with weights `a_t`, which
//! pool-adjacent-violators solves exactly in `O(m)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::majorization::{BlockPartition, RealSequence};

/// Weights `a` (collapsed lengths) and targets `s` (covariance eigenvalues).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainQpProblem {
    weights: Vec<f64>,
    targets: Vec<f64>,
}

impl ChainQpProblem {
    /// Weights must be positive, targets non-negative and non-increasing.
    pub fn new(weights: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if weights.len() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                found: targets.len(),
            });
        }
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        for (index, &value) in targets.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NonPositiveTarget { index, value });
            }
        }
        if let Some(index) = targets.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::NotNonIncreasing { index: index + 1 });
        }
        Ok(ChainQpProblem { weights, targets })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Unconstrained per-coordinate minimisers `sqrt(s_t) / a_t`.
    pub fn free_minimizers(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.targets)
            .map(|(a, s)| libm::sqrt(*s) / a)
    }
}

/// Minimiser `x*` of the chain QP and its objective value `q*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainQpSolution {
    pub x_star: Vec<f64>,
    pub q_star: f64,
}

impl ChainQpSolution {
    pub fn max_dual(&self) -> f64 {
        self.x_star.iter().copied().fold(0.0, f64::max)
    }
}

/// Optimal frame spectrum `lambda*`, non-increasing and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSpectrum {
    pub lambda_star: Vec<f64>,
}

impl OptimalSpectrum {
    pub fn total(&self) -> f64 {
        self.lambda_star.iter().sum()
    }
}

/// Evaluates `sum_t a_t x_t^2 - 2 sqrt(s_t) x_t`.
pub fn qp_objective(problem: &ChainQpProblem, x: &[f64]) -> Result<f64> {
    if x.len() != problem.dim() {
        return Err(Error::LengthMismatch {
            expected: problem.dim(),
            found: x.len(),
        });
    }
    Ok(problem
        .weights
        .iter()
        .zip(&problem.targets)
        .zip(x)
        .map(|((a, s), x)| a * x * x - 2.0 * libm::sqrt(*s) * x)
        .sum())
}

/// Exact solution by pool-adjacent-violators.
///
/// Every target must be strictly positive.
pub fn solve_chain_qp(problem: &ChainQpProblem) -> Result<ChainQpSolution> {
    if let Some(index) = problem.targets.iter().position(|&s| s <= 0.0) {
        return Err(Error::NonPositiveTarget {
            index,
            value: problem.targets[index],
        });
    }

    // Each pool keeps (sum of weights, sum of sqrt targets, length); its
    // fitted value is the weighted mean sum_sqrt / sum_weight.
    struct Pool {
        weight: f64,
        root_sum: f64,
        len: usize,
    }
    impl Pool {
        fn value(&self) -> f64 {
            self.root_sum / self.weight
        }
    }

    let mut pools: Vec<Pool> = Vec::with_capacity(problem.dim());
    for (&a, &s) in problem.weights.iter().zip(&problem.targets) {
        pools.push(Pool {
            weight: a,
            root_sum: libm::sqrt(s),
            len: 1,
        });
        while pools.len() > 1 {
            let last = pools.len() - 1;
            if pools[last - 1].value() <= pools[last].value() {
                break;
            }
            let top = pools.pop().unwrap();
            let prev = pools.last_mut().unwrap();
            prev.weight += top.weight;
            prev.root_sum += top.root_sum;
            prev.len += top.len;
        }
    }

    let mut x_star = Vec::with_capacity(problem.dim());
    for pool in &pools {
        let value = pool.value();
        x_star.extend(core::iter::repeat(value).take(pool.len));
    }
    debug_assert!(x_star[0] > 0.0, "nonnegativity constraint became active");
    let q_star = qp_objective(problem, &x_star)?;
    Ok(ChainQpSolution { x_star, q_star })
}

/// Starts a new block wherever `x*_{t-1} < x*_t - tol`.
pub fn extract_partition(solution: &ChainQpSolution, tol: f64) -> BlockPartition {
    let x = &solution.x_star;
    let mut starts = alloc::vec![0];
    starts.extend((1..x.len()).filter(|&t| x[t - 1] < x[t] - tol));
    BlockPartition::new(starts, x.len()).expect("starts are increasing from 0 by construction")
}

/// [`extract_partition`] with the tolerance `rel * max(x*)`.
pub fn extract_partition_relative(solution: &ChainQpSolution, rel: f64) -> BlockPartition {
    extract_partition(solution, rel * solution.max_dual())
}

/// Recovers `lambda*_i = sqrt(s_i) / x*_i`.
pub fn spectrum_from_dual(s: &[f64], solution: &ChainQpSolution) -> Result<OptimalSpectrum> {
    if s.len() != solution.x_star.len() {
        return Err(Error::LengthMismatch {
            expected: solution.x_star.len(),
            found: s.len(),
        });
    }
    let mut lambda_star = Vec::with_capacity(s.len());
    for (index, (&si, &xi)) in s.iter().zip(&solution.x_star).enumerate() {
        if xi == 0.0 {
            return Err(Error::ZeroDual { index });
        }
        lambda_star.push(libm::sqrt(si) / xi);
    }
    Ok(OptimalSpectrum { lambda_star })
}

/// Optimal spectrum through the block map: `lambda(sqrt(s), a, partition)`.
pub fn spectrum_from_partition(
    problem: &ChainQpProblem,
    partition: &BlockPartition,
) -> Result<OptimalSpectrum> {
    let roots: Vec<f64> = problem.targets.iter().map(|s| libm::sqrt(*s)).collect();
    let lambda = crate::majorization::lambda_map(&roots, &problem.weights, partition)?;
    Ok(OptimalSpectrum {
        lambda_star: RealSequence::into_vec(lambda),
    })
}
