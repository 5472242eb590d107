//! Sequence-level primitives: majorization, length collapsing and the
//! block-averaged spectrum / cost maps indexed by a [`BlockPartition`].

use alloc::vec::Vec;
use core::ops::{Deref, Range};

use crate::error::{Error, Result};

/// Non-empty sequence of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSequence(Vec<f64>);

impl RealSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(RealSequence(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Deref for RealSequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Prescribed squared lengths `c_1 >= c_2 >= ... >= c_K > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthProfile(Vec<f64>);

impl LengthProfile {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        validate_positive(&lengths)?;
        if let Some(index) = lengths.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::NotNonIncreasing { index: index + 1 });
        }
        Ok(LengthProfile(lengths))
    }

    /// Sorts `lengths` descending before validating. The flag reports
    /// whether the input was already sorted.
    pub fn sorted(mut lengths: Vec<f64>) -> Result<(Self, bool)> {
        validate_positive(&lengths)?;
        let was_sorted = lengths.windows(2).all(|w| w[1] <= w[0]);
        lengths.sort_by(|a, b| b.total_cmp(a));
        Ok((LengthProfile(lengths), was_sorted))
    }

    /// `K` unit lengths.
    pub fn unit(k: usize) -> Result<Self> {
        LengthProfile::new(alloc::vec![1.0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl Deref for LengthProfile {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn validate_positive(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value <= 0.0 {
            return Err(Error::NonPositive { index, value });
        }
    }
    Ok(())
}

/// Contiguous blocks covering `0..len`, identified by their (0-based)
/// starting indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    starts: Vec<usize>,
    len: usize,
}

impl BlockPartition {
    pub fn new(starts: Vec<usize>, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidPartition("partition of an empty range"));
        }
        if starts.first() != Some(&0) {
            return Err(Error::InvalidPartition("first block must start at index 0"));
        }
        if starts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition("block starts must strictly increase"));
        }
        if starts.last().is_some_and(|&s| s >= len) {
            return Err(Error::InvalidPartition("block start beyond the sequence"));
        }
        Ok(BlockPartition { starts, len })
    }

    /// One block per index.
    pub fn singletons(len: usize) -> Result<Self> {
        BlockPartition::new((0..len).collect(), len)
    }

    /// A single block spanning everything.
    pub fn whole(len: usize) -> Result<Self> {
        BlockPartition::new(alloc::vec![0], len)
    }

    /// Number of blocks `T`.
    pub fn block_count(&self) -> usize {
        self.starts.len()
    }

    /// Total length `m` covered by the partition.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Block starts in 1-based numbering, `n_1 = 1 < n_2 < ...`.
    pub fn one_based(&self) -> Vec<usize> {
        self.starts.iter().map(|s| s + 1).collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.starts.iter().enumerate().map(move |(l, &start)| {
            let end = self.starts.get(l + 1).copied().unwrap_or(self.len);
            start..end
        })
    }
}

/// `a ≺ b`: every prefix sum of `a` is at most the matching prefix sum of
/// `b` and the totals agree, each comparison up to the absolute slack `tol`.
///
/// Both inputs must be non-increasing (again up to `tol`).
pub fn check_majorization(a: &[f64], b: &[f64], tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Empty);
    }
    check_non_increasing(a, tol)?;
    check_non_increasing(b, tol)?;
    Ok(prefix_dominated(a, b, tol))
}

fn check_non_increasing(values: &[f64], tol: f64) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
    }
    match values.windows(2).position(|w| w[1] > w[0] + tol) {
        Some(index) => Err(Error::NotNonIncreasing { index: index + 1 }),
        None => Ok(()),
    }
}

/// Prefix-sum comparison without the monotonicity checks.
pub(crate) fn prefix_dominated(a: &[f64], b: &[f64], tol: f64) -> bool {
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum_a += x;
        sum_b += y;
        if sum_a > sum_b + tol {
            return false;
        }
    }
    (sum_a - sum_b).abs() <= tol
}

/// Keeps `c_1..c_{m-1}` and folds the tail into `c'_m = c_m + ... + c_K`.
///
/// The result may increase at index `m`.
pub fn collapse_lengths(profile: &LengthProfile, m: usize) -> Result<RealSequence> {
    let k = profile.len();
    if m == 0 || m > k {
        return Err(Error::CollapseOutOfRange { m, k });
    }
    let mut collapsed: Vec<f64> = profile[..m - 1].to_vec();
    collapsed.push(profile[m - 1..].iter().sum());
    RealSequence::new(collapsed)
}

fn check_block_inputs(c: &[f64], a: &[f64], partition: &BlockPartition) -> Result<()> {
    for seq in [c, a] {
        if seq.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                found: seq.len(),
            });
        }
        validate_positive(seq)?;
    }
    Ok(())
}

/// Block-averaged spectrum: inside each block `B`,
/// `lambda_i = c_i * (sum_B a) / (sum_B c)`.
pub fn lambda_map(c: &[f64], a: &[f64], partition: &BlockPartition) -> Result<RealSequence> {
    check_block_inputs(c, a, partition)?;
    let mut lambda = Vec::with_capacity(c.len());
    for (block, range) in partition.blocks().enumerate() {
        let sum_c: f64 = c[range.clone()].iter().sum();
        let sum_a: f64 = a[range.clone()].iter().sum();
        if sum_c <= 0.0 {
            return Err(Error::ZeroBlockSum { block });
        }
        let ratio = sum_a / sum_c;
        lambda.extend(c[range].iter().map(|ci| ci * ratio));
    }
    RealSequence::new(lambda)
}

/// Cost map `sum_blocks (sum_B c)^2 / (sum_B a)`.
pub fn j_value(c: &[f64], a: &[f64], partition: &BlockPartition) -> Result<f64> {
    check_block_inputs(c, a, partition)?;
    let mut total = 0.0;
    for (block, range) in partition.blocks().enumerate() {
        let sum_c: f64 = c[range.clone()].iter().sum();
        let sum_a: f64 = a[range].iter().sum();
        if sum_a <= 0.0 {
            return Err(Error::ZeroBlockSum { block });
        }
        total += sum_c * sum_c / sum_a;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn majorization_examples() {
        assert!(check_majorization(&[1.0, 1.0, 1.0, 1.0], &[2.0, 2.0, 0.0, 0.0], TOL).unwrap());
        assert!(!check_majorization(&[3.0, 1.0], &[2.0, 2.0], TOL).unwrap());
        assert!(check_majorization(&[2.0, 2.0], &[2.0, 2.0], TOL).unwrap());
    }

    #[test]
    fn majorization_rejects_unequal_totals() {
        assert!(!check_majorization(&[1.0, 1.0], &[2.0, 1.0], TOL).unwrap());
    }

    #[test]
    fn majorization_errors() {
        assert_eq!(
            check_majorization(&[1.0], &[1.0, 0.0], TOL),
            Err(Error::LengthMismatch { expected: 1, found: 2 })
        );
        assert_eq!(
            check_majorization(&[1.0, 2.0], &[2.0, 1.0], TOL),
            Err(Error::NotNonIncreasing { index: 1 })
        );
    }

    #[test]
    fn collapse_examples() {
        let p = LengthProfile::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(collapse_lengths(&p, 2).unwrap().as_slice(), &[2.0, 2.0]);
        let p = LengthProfile::new(vec![8.0, 4.0, 2.0, 1.0]).unwrap();
        assert_eq!(collapse_lengths(&p, 3).unwrap().as_slice(), &[8.0, 4.0, 3.0]);
        let p = LengthProfile::new(vec![5.0]).unwrap();
        assert_eq!(collapse_lengths(&p, 1).unwrap().as_slice(), &[5.0]);
    }

    #[test]
    fn collapse_out_of_range() {
        let p = LengthProfile::new(vec![2.0, 1.0]).unwrap();
        assert_eq!(collapse_lengths(&p, 3), Err(Error::CollapseOutOfRange { m: 3, k: 2 }));
        assert_eq!(collapse_lengths(&p, 0), Err(Error::CollapseOutOfRange { m: 0, k: 2 }));
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(LengthProfile::new(vec![1.0, 2.0]), Err(Error::NotNonIncreasing { index: 1 })));
        assert!(matches!(LengthProfile::new(vec![1.0, 0.0]), Err(Error::NonPositive { index: 1, .. })));
        assert_eq!(LengthProfile::new(vec![]), Err(Error::Empty));
        let (p, was_sorted) = LengthProfile::sorted(vec![1.0, 3.0, 2.0]).unwrap();
        assert!(!was_sorted);
        assert_eq!(p.as_slice(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn partition_validation() {
        assert!(BlockPartition::new(vec![1], 3).is_err());
        assert!(BlockPartition::new(vec![0, 2, 2], 3).is_err());
        assert!(BlockPartition::new(vec![0, 3], 3).is_err());
        let p = BlockPartition::new(vec![0, 2, 4], 5).unwrap();
        assert_eq!(p.one_based(), vec![1, 3, 5]);
        let blocks: Vec<_> = p.blocks().collect();
        assert_eq!(blocks, vec![0..2, 2..4, 4..5]);
    }

    #[test]
    fn lambda_single_block() {
        // (2 * 2/3, 1 * 2/3)
        let lam = lambda_map(&[2.0, 1.0], &[1.0, 1.0], &BlockPartition::whole(2).unwrap()).unwrap();
        assert!(close(lam[0], 4.0 / 3.0, 1e-15));
        assert!(close(lam[1], 2.0 / 3.0, 1e-15));
        assert!(close(lam.total(), 2.0, 1e-15));
    }

    #[test]
    fn lambda_singletons_return_a() {
        let a = [3.0, 0.5, 7.0];
        let lam = lambda_map(&[0.1, 9.0, 2.0], &a, &BlockPartition::singletons(3).unwrap()).unwrap();
        for (l, x) in lam.iter().zip(a) {
            assert!(close(*l, x, 1e-15));
        }
    }

    #[test]
    fn j_value_examples() {
        let whole = BlockPartition::whole(2).unwrap();
        assert!(close(j_value(&[2.0, 1.0], &[1.0, 1.0], &whole).unwrap(), 4.5, 1e-15));
        let single = BlockPartition::whole(1).unwrap();
        assert!(close(j_value(&[1.0], &[5.0], &single).unwrap(), 0.2, 1e-15));
        let c = [1.0, 2.0, 3.0];
        let a = [4.0, 5.0, 6.0];
        let expected: f64 = c.iter().zip(a).map(|(c, a)| c * c / a).sum();
        let got = j_value(&c, &a, &BlockPartition::singletons(3).unwrap()).unwrap();
        assert!(close(got, expected, 1e-15));
    }

    #[test]
    fn block_maps_reject_bad_input() {
        let p = BlockPartition::whole(2).unwrap();
        assert!(matches!(lambda_map(&[1.0], &[1.0, 1.0], &p), Err(Error::LengthMismatch { .. })));
        assert!(matches!(j_value(&[1.0, 0.0], &[1.0, 1.0], &p), Err(Error::NonPositive { .. })));
    }

    fn positive_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<usize>)> {
        (1usize..8).prop_flat_map(|m| {
            (
                prop::collection::vec(0.01f64..10.0, m),
                prop::collection::vec(0.01f64..10.0, m),
                prop::collection::vec(any::<bool>(), m),
            )
                .prop_map(|(c, a, cuts)| {
                    let starts = cuts
                        .iter()
                        .enumerate()
                        .filter(|(i, &cut)| *i == 0 || cut)
                        .map(|(i, _)| i)
                        .collect();
                    (c, a, starts)
                })
        })
    }

    fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Random T-transform: average an adjacent pair, keeping the order.
    fn t_transform(b: &[f64], i: usize, w: f64) -> Vec<f64> {
        let mut out = b.to_vec();
        let (x, y) = (b[i], b[i + 1]);
        out[i] = w * x + (1.0 - w) * y;
        out[i + 1] = (1.0 - w) * x + w * y;
        out
    }

    proptest! {
        #[test]
        fn lambda_preserves_total((c, a, starts) in positive_pair()) {
            let p = BlockPartition::new(starts, c.len()).unwrap();
            let lam = lambda_map(&c, &a, &p).unwrap();
            let total_a: f64 = a.iter().sum();
            prop_assert!((lam.total() - total_a).abs() <= 1e-12 * total_a);
        }

        #[test]
        fn j_value_is_sum_of_ratios((c, a, starts) in positive_pair()) {
            let p = BlockPartition::new(starts, c.len()).unwrap();
            let lam = lambda_map(&c, &a, &p).unwrap();
            let direct: f64 = c.iter().zip(lam.iter()).map(|(c, l)| c * c / l).sum();
            let j = j_value(&c, &a, &p).unwrap();
            prop_assert!((j - direct).abs() <= 1e-12 * j);
        }

        #[test]
        fn majorization_is_reflexive(v in prop::collection::vec(-10.0f64..10.0, 1..10)) {
            let v = sorted_desc(v);
            prop_assert!(check_majorization(&v, &v, TOL).unwrap());
        }

        #[test]
        fn majorization_is_transitive(
            v in prop::collection::vec(-10.0f64..10.0, 2..10),
            steps in prop::collection::vec((0usize..100, 0.5f64..1.0), 1..6),
        ) {
            // c ≺ b ≺ a by construction; check the chain closes.
            let a = sorted_desc(v);
            let k = a.len() - 1;
            let (first, second) = steps.split_at(steps.len() / 2);
            let b = first.iter().fold(a.clone(), |acc, &(i, w)| t_transform(&acc, i % k, w));
            let c = second.iter().fold(b.clone(), |acc, &(i, w)| t_transform(&acc, i % k, w));
            let ab = check_majorization(&b, &a, TOL).unwrap();
            let bc = check_majorization(&c, &b, TOL).unwrap();
            prop_assert!(ab && bc);
            prop_assert!(check_majorization(&c, &a, TOL).unwrap());
        }
    }
}
