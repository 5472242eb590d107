//! Orthonormal bases with a prescribed quadratic-form diagonal.
//!
//! Given a linear map `A` on `R^K` and a non-increasing target sequence
//! `a` majorized by the spectrum of `(A + A^T) / 2`, the sweep builds an
//! orthonormal basis `x_1..x_K` with `<x_t, A x_t> = a_t`. Each step either
//! takes the leading working vector as is, or blends it with a working
//! vector whose quadratic form lies below the target and puts the
//! complementary blend back into the working set.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{gram_drift, quad_form, sorted_symmetric_eigen, symmetrize};
use crate::majorization::{check_majorization, prefix_dominated};
use crate::tolerance::Tolerances;

/// Stable reordering by descending `<v, A v>`.
pub fn a_sort(a: &DMatrix<f64>, vectors: Vec<DVector<f64>>) -> Result<Vec<DVector<f64>>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != a.nrows()) {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: v.len(),
        });
    }
    Ok(sort_by_form(a, vectors))
}

fn sort_by_form(a: &DMatrix<f64>, vectors: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut keyed: Vec<(f64, DVector<f64>)> =
        vectors.into_iter().map(|v| (quad_form(a, &v), v)).collect();
    keyed.sort_by(|x, y| y.0.total_cmp(&x.0));
    keyed.into_iter().map(|(_, v)| v).collect()
}

/// Blend weight `Θ = sqrt(a1 - bi) / (sqrt(a1 - bi) + sqrt(b1 - a1))`.
///
/// Requires `bi <= a1 < b1`.
pub fn blend_theta(a1: f64, b1: f64, bi: f64) -> Result<f64> {
    let clamp = Tolerances::default().sqrt_clamp * b1.abs().max(1.0);
    blend_theta_clamped(a1, b1, bi, clamp)
}

fn blend_theta_clamped(a1: f64, b1: f64, bi: f64, clamp: f64) -> Result<f64> {
    let below = a1 - bi;
    let above = b1 - a1;
    if !(below >= -clamp && above > 0.0) {
        return Err(Error::BlendPrecondition { a1, b1, bi });
    }
    let num = libm::sqrt(below.max(0.0));
    Ok(num / (num + libm::sqrt(above)))
}

/// How one sweep step produced its output vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepCase {
    /// The leading working vector already had the target form.
    Matched,
    /// The leading vector was blended with the working vector at
    /// `partner` (0-based position in the A-sorted working set).
    Blended {
        partner: usize,
        theta: f64,
        /// `<v, A v>` of the vector returned to the working set.
        replacement_form: f64,
        /// `b_1 + b_i - a_1`, what `replacement_form` must equal.
        expected_replacement_form: f64,
    },
}

/// Record of one sweep step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStep {
    pub target: f64,
    pub leading_form: f64,
    pub case: StepCase,
    /// Whether a Gram-Schmidt pass was needed after this step.
    pub reorthogonalized: bool,
}

/// Working vectors and the targets still to be met.
#[derive(Debug, Clone)]
pub struct SweepState {
    pub working: Vec<DVector<f64>>,
    pub remaining: Vec<f64>,
    pub step: usize,
}

impl SweepState {
    /// The three validity conditions of a sweep state against the
    /// symmetrised operator: orthonormal, A-sorted working vectors; vanishing
    /// cross terms `<u_p, (A + A^T) u_q>`; remaining targets majorized by the
    /// working quadratic forms.
    pub fn is_valid(&self, sym: &DMatrix<f64>, orth_tol: f64, form_tol: f64) -> bool {
        if gram_drift(&self.working) > orth_tol {
            return false;
        }
        let forms: Vec<f64> = self.working.iter().map(|u| quad_form(sym, u)).collect();
        if forms.windows(2).any(|w| w[1] > w[0] + form_tol) {
            return false;
        }
        for (p, u) in self.working.iter().enumerate() {
            let su = sym * u;
            for w in self.working.iter().skip(p + 1) {
                if (2.0 * w.dot(&su)).abs() > form_tol {
                    return false;
                }
            }
        }
        self.remaining.len() == forms.len() && prefix_dominated(&self.remaining, &forms, form_tol)
    }
}

/// Output of [`prescribed_diagonal_basis`]: the basis as matrix columns
/// (column `t` has quadratic form `targets[t]`) and the per-step log.
#[derive(Debug, Clone)]
pub struct PrescribedBasis {
    pub vectors: DMatrix<f64>,
    pub steps: Vec<SweepStep>,
}

/// Orthonormal basis `x_1..x_K` of `R^K` with `<x_t, A x_t> = targets[t]`.
///
/// `targets` must be non-increasing and majorized by the eigenvalues of
/// `(A + A^T) / 2`.
pub fn prescribed_diagonal_basis(
    a: &DMatrix<f64>,
    targets: &[f64],
    tol: &Tolerances,
) -> Result<PrescribedBasis> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if targets.len() != a.nrows() {
        return Err(Error::LengthMismatch {
            expected: a.nrows(),
            found: targets.len(),
        });
    }
    let sym = symmetrize(a);
    let (eigenvalues, eigenvectors) = sorted_symmetric_eigen(&sym);
    let initial = eigenvectors.column_iter().map(|c| c.into_owned()).collect();
    sweep(&sym, &eigenvalues, initial, targets, tol)
}

/// Runs the sweep from a known orthonormal eigenbasis of `sym`, skipping the
/// eigendecomposition.
pub(crate) fn sweep(
    sym: &DMatrix<f64>,
    eigenvalues: &[f64],
    eigenvectors: Vec<DVector<f64>>,
    targets: &[f64],
    tol: &Tolerances,
) -> Result<PrescribedBasis> {
    let k = sym.nrows();
    if !check_majorization(targets, eigenvalues, tol.scaled_majorization(eigenvalues.iter().map(|v| v.abs()).sum()))? {
        return Err(Error::NotMajorized);
    }

    let mut state = SweepState {
        working: sort_by_form(sym, eigenvectors),
        remaining: targets.to_vec(),
        step: 0,
    };
    let mut basis = DMatrix::zeros(k, k);
    let mut steps = Vec::with_capacity(k);

    for (t, &a1) in targets.iter().enumerate() {
        let forms: Vec<f64> = state.working.iter().map(|u| quad_form(sym, u)).collect();
        let b1 = forms[0];
        let scale = b1.abs().max(1.0);

        let (x, case) = if state.working.len() == 1 || (b1 - a1).abs() <= tol.case_split * scale {
            (state.working.remove(0), StepCase::Matched)
        } else if b1 < a1 {
            return Err(Error::NotMajorized);
        } else {
            // First i with b_i <= a_1 < b_{i-1}; the last vector stands in
            // when rounding pushed every b_i just above a_1.
            let partner = (1..forms.len())
                .find(|&i| forms[i] <= a1)
                .unwrap_or(forms.len() - 1);
            let bi = forms[partner];
            let theta = blend_theta_clamped(a1, b1, bi, tol.sqrt_clamp * scale)?;
            let norm = libm::sqrt(theta * theta + (1.0 - theta) * (1.0 - theta));
            let lead = &state.working[0];
            let other = &state.working[partner];
            let x = (lead * theta + other * (1.0 - theta)) / norm;
            let v = (lead * (1.0 - theta) - other * theta) / norm;
            let replacement_form = quad_form(sym, &v);

            state.working.remove(partner);
            state.working.remove(0);
            state.working.push(v);
            state.working = sort_by_form(sym, core::mem::take(&mut state.working));
            (
                x,
                StepCase::Blended {
                    partner,
                    theta,
                    replacement_form,
                    expected_replacement_form: b1 + bi - a1,
                },
            )
        };
        basis.set_column(t, &x);
        state.remaining.remove(0);
        state.step = t + 1;

        let mut reorthogonalized = false;
        if gram_drift(&state.working) > tol.reorthogonalize {
            state.working = sort_by_form(sym, gram_schmidt(&state.working));
            reorthogonalized = true;
            let drift = gram_drift(&state.working);
            if drift > tol.orthogonality_failure {
                return Err(Error::OrthogonalityLost { drift });
            }
        }
        debug_assert!(
            state.is_valid(sym, 1e-10, 1e-8 * scale),
            "sweep state invalid after step {}",
            t + 1
        );
        steps.push(SweepStep {
            target: a1,
            leading_form: b1,
            case,
            reorthogonalized,
        });
    }

    let columns: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
    let drift = gram_drift(&columns);
    if drift > tol.orthogonality_failure {
        return Err(Error::OrthogonalityLost { drift });
    }
    Ok(PrescribedBasis {
        vectors: basis,
        steps,
    })
}

/// One modified Gram-Schmidt pass.
fn gram_schmidt(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for q in &out {
            let proj = q.dot(&w);
            w.axpy(-proj, q, 1.0);
        }
        let norm = w.norm();
        out.push(w / norm);
    }
    out
}
