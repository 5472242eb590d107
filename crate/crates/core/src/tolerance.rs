/// Numerical thresholds shared by the pipeline.
///
/// Relative thresholds are scaled by the largest magnitude in play
/// (largest eigenvalue, largest dual variable, ...).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Slack on every prefix-sum comparison in a majorization test. Public
    /// majorization checks use it as is; the sweep and the rank-1
    /// feasibility test scale it by `max(1, total)`.
    pub majorization: f64,
    /// A new block starts when consecutive dual variables differ by more
    /// than this times the largest dual variable.
    pub partition: f64,
    /// Sweep step takes the "already matched" branch when
    /// `|b_1 - a_1| <= case_split * max(1, |b_1|)`.
    pub case_split: f64,
    /// Negative square-root arguments down to `-sqrt_clamp * max(1, |b_1|)`
    /// are treated as zero.
    pub sqrt_clamp: f64,
    /// Gram drift of the working set that triggers a Gram-Schmidt pass.
    pub reorthogonalize: f64,
    /// Gram drift above which the sweep gives up.
    pub orthogonality_failure: f64,
    /// Eigenvalues below `rank * lambda_max` count as zero.
    pub rank: f64,
    /// Covariance eigenvalues at or below `drop * sigma_1` are discarded.
    pub drop: f64,
    /// Relative residual allowed before a vector counts as outside the span.
    pub representation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            majorization: 1e-9,
            partition: 1e-10,
            case_split: 1e-11,
            sqrt_clamp: 1e-12,
            reorthogonalize: 1e-12,
            orthogonality_failure: 1e-8,
            rank: 1e-9,
            drop: 1e-9,
            representation: 1e-9,
        }
    }
}

impl Tolerances {
    pub(crate) fn scaled_majorization(&self, total: f64) -> f64 {
        self.majorization * total.max(1.0)
    }
}
