use nalgebra::DMatrix;
use optdict_core::rank_one::rank_one_decompose;
use optdict_core::schur_horn::{prescribed_diagonal_basis, StepCase};
use optdict_core::{Error, LengthProfile, Tolerances};
use proptest::prelude::*;

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn eigenvalues(sym: &DMatrix<f64>) -> Vec<f64> {
    sorted_desc(sym.clone().symmetric_eigen().eigenvalues.iter().copied().collect())
}

/// Applies T-transforms `(i, j, t)` to `values`.
fn transform(values: &[f64], moves: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut out = values.to_vec();
    let k = out.len();
    for &(i, j, t) in moves {
        let (i, j) = (i % k, j % k);
        let (a, b) = (out[i], out[j]);
        out[i] = t * a + (1.0 - t) * b;
        out[j] = (1.0 - t) * a + t * b;
    }
    sorted_desc(out)
}

fn moves() -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    prop::collection::vec((0usize..64, 0usize..64, 0.0..1.0f64), 0..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prescribed_diagonal(
        k in 1usize..=12,
        entries in prop::collection::vec(-2.0..2.0f64, 144),
        symmetric in any::<bool>(),
        moves in moves(),
    ) {
        let raw = DMatrix::from_iterator(k, k, entries.into_iter().take(k * k));
        let a = if symmetric { &raw + raw.transpose() } else { raw };
        let sym = (&a + a.transpose()) * 0.5;
        let targets = transform(&eigenvalues(&sym), &moves);
        let basis = prescribed_diagonal_basis(&a, &targets, &Tolerances::default()).unwrap();
        let x = &basis.vectors;
        prop_assert!((x.transpose() * x - DMatrix::identity(k, k)).amax() <= 1e-10);
        for (t, col) in x.column_iter().enumerate() {
            prop_assert!((col.dot(&(&a * col)) - targets[t]).abs() <= 1e-8);
        }
        for step in &basis.steps {
            if let StepCase::Blended { theta, replacement_form, expected_replacement_form, .. } = step.case {
                prop_assert!((0.0..=1.0).contains(&theta));
                prop_assert!((replacement_form - expected_replacement_form).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn targets_outside_the_hull_rejected(k in 2usize..=8, entries in prop::collection::vec(-2.0..2.0f64, 64)) {
        let raw = DMatrix::from_iterator(k, k, entries.into_iter().take(k * k));
        let a = &raw + raw.transpose();
        let mut targets = eigenvalues(&a);
        targets[0] += 0.5;
        targets[k - 1] -= 0.5;
        prop_assert_eq!(
            prescribed_diagonal_basis(&a, &targets, &Tolerances::default()).unwrap_err(),
            Error::NotMajorized
        );
    }

    #[test]
    fn rank_one_with_prescribed_norms(
        n in 1usize..=8,
        rank_seed in 0usize..8,
        extra in 0usize..=6,
        entries in prop::collection::vec(-1.0..1.0f64, 64),
        moves in moves(),
        mix in 0.0..1.0f64,
    ) {
        let r = 1 + rank_seed % n;
        let k = r + extra;
        let b = DMatrix::from_iterator(n, r, entries.into_iter().take(n * r));
        let m = &b * b.transpose();
        let mut spectrum = eigenvalues(&m);
        spectrum.truncate(r);
        if spectrum[r - 1] <= 1e-6 * spectrum[0] {
            return Ok(());
        }
        spectrum.resize(k, 0.0);
        let uniform = spectrum.iter().sum::<f64>() / k as f64;
        let c: Vec<f64> = transform(&spectrum, &moves)
            .into_iter()
            .map(|x| mix * x + (1.0 - mix) * uniform)
            .collect();
        if c[k - 1] <= 0.0 {
            return Ok(());
        }
        let profile = LengthProfile::new(c.clone()).unwrap();
        let dec = rank_one_decompose(&m, &profile, &Tolerances::default()).unwrap();
        prop_assert!((dec.frame_operator() - &m).norm() <= 1e-8 * m.norm());
        for (got, want) in dec.squared_norms().iter().zip(&c) {
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn rank_one_rejects_wrong_total(n in 1usize..=5, entries in prop::collection::vec(-1.0..1.0f64, 25)) {
        let b = DMatrix::from_iterator(n, n, entries.into_iter().take(n * n));
        let m = &b * b.transpose() + DMatrix::identity(n, n) * 0.1;
        let total = m.trace();
        let profile = LengthProfile::new(vec![total * 1.01 / n as f64; n]).unwrap();
        prop_assert_eq!(
            rank_one_decompose(&m, &profile, &Tolerances::default()).unwrap_err(),
            Error::InfeasibleProfile
        );
    }
}
