use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
///
/// Each eigenvector is flipped so that its largest-magnitude entry (first
/// one on ties) is positive, which makes the output reproducible.
pub(crate) fn sorted_symmetric_eigen(s: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = s.nrows();
    let sym = symmetrize(s);
    let mut basis = sym.clone().symmetric_eigen().eigenvectors;
    let eigenvalues = jacobi_polish(&sym, &mut basis);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[j].total_cmp(&eigenvalues[i]));
    let values = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = basis.column(i).into_owned();
        normalize_sign(&mut v);
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

const POLISH_SWEEPS: usize = 10;

/// Cyclic Jacobi sweeps on `U^T S U` until its off-diagonal part is at
/// rounding level, accumulating the rotations into `basis`. The QL output
/// of nalgebra can leave off-diagonal terms around `1e-9 |S|`; starting
/// from it, one or two sweeps usually suffice. Returns the diagonal.
fn jacobi_polish(sym: &DMatrix<f64>, basis: &mut DMatrix<f64>) -> Vec<f64> {
    let n = sym.nrows();
    let mut b = symmetrize(&(basis.transpose() * sym * &*basis));
    let target = f64::EPSILON * b.norm();
    for _ in 0..POLISH_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += b[(p, q)] * b[(p, q)];
            }
        }
        if libm::sqrt(off) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let bpq = b[(p, q)];
                if bpq == 0.0 {
                    continue;
                }
                let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * bpq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (b[(k, p)], b[(k, q)]);
                    b[(k, p)] = c * kp - s * kq;
                    b[(k, q)] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (b[(p, k)], b[(q, k)]);
                    b[(p, k)] = c * pk - s * qk;
                    b[(q, k)] = s * pk + c * qk;
                }
                for k in 0..n {
                    let (kp, kq) = (basis[(k, p)], basis[(k, q)]);
                    basis[(k, p)] = c * kp - s * kq;
                    basis[(k, q)] = s * kp + c * kq;
                }
            }
        }
    }
    (0..n).map(|i| b[(i, i)]).collect()
}

pub(crate) fn normalize_sign(v: &mut DVector<f64>) {
    let mut pivot = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if !v.is_empty() && v[pivot] < 0.0 {
        v.neg_mut();
    }
}

pub(crate) fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Moore-Penrose inverse of a symmetric PSD matrix, dropping eigenvalues
/// below `rel * lambda_max`.
pub(crate) fn psd_pseudo_inverse(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let (values, vectors) = sorted_symmetric_eigen(m);
    let cutoff = rel * values.first().copied().unwrap_or(0.0).max(0.0);
    let mut inv = DMatrix::zeros(n, n);
    for (i, &value) in values.iter().enumerate() {
        if value > cutoff && value > 0.0 {
            let u = vectors.column(i);
            inv += (u * u.transpose()) / value;
        }
    }
    inv
}

/// Orthogonal projector onto the range of a symmetric PSD matrix.
pub(crate) fn range_projector(m: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let n = m.nrows();
    let (values, vectors) = sorted_symmetric_eigen(m);
    let cutoff = rel * values.first().copied().unwrap_or(0.0).max(0.0);
    let mut proj = DMatrix::zeros(n, n);
    for (i, &value) in values.iter().enumerate() {
        if value > cutoff && value > 0.0 {
            let u = vectors.column(i);
            proj += u * u.transpose();
        }
    }
    proj
}

/// Largest `|<u_p, u_q> - delta_pq|` over a family of vectors.
pub(crate) fn gram_drift(vectors: &[DVector<f64>]) -> f64 {
    let mut drift: f64 = 0.0;
    for (p, u) in vectors.iter().enumerate() {
        for (q, w) in vectors.iter().enumerate().skip(p) {
            let target = if p == q { 1.0 } else { 0.0 };
            drift = drift.max((u.dot(w) - target).abs());
        }
    }
    drift
}

/// `sum_i v_i v_i^T` over the columns of `vectors`.
pub(crate) fn outer_sum(vectors: &DMatrix<f64>) -> DMatrix<f64> {
    vectors * vectors.transpose()
}

pub(crate) fn quad_form(a: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(a * v))
}
