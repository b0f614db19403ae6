use serde::{Deserialize, Serialize};

use super::eigen::Rotation;
use super::matrix::{vec_dot, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// `M = U diag(sigma) V` with unitary `U` (rows x rows) and `V` (cols x cols).
///
/// `V` is stored as the right factor itself, not its adjoint: its first
/// `k` rows are the conjugated right singular vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdDecomposition {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                let uik = self.u[(i, k)] * s;
                for j in 0..n {
                    out[(i, j)] += uik * self.v[(k, j)];
                }
            }
        }
        out
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Rows of `V` (conjugated) spanning the right null space at the given
    /// relative threshold.
    pub fn null_space(&self, rel_tol: f64) -> Vec<Vec<C64>> {
        let cutoff = rel_tol * self.largest().max(f64::MIN_POSITIVE);
        let n = self.v.rows();
        let mut basis = Vec::new();
        for k in 0..n {
            let small = self.singular_values.get(k).is_none_or(|&s| s <= cutoff);
            if small {
                basis.push(self.v.row(k).iter().map(|z| z.conj()).collect());
            }
        }
        basis
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi.
///
/// Columns are orthogonalised pairwise, which keeps small singular values
/// accurate to working precision relative to the largest one.
pub fn svd(m: &ComplexMatrix) -> Result<SvdDecomposition> {
    if m.rows() < m.cols() {
        let t = svd_tall(&m.adjoint())?;
        return Ok(SvdDecomposition { u: t.v.adjoint(), singular_values: t.singular_values, v: t.u.adjoint() });
    }
    svd_tall(m)
}

fn svd_tall(m: &ComplexMatrix) -> Result<SvdDecomposition> {
    let (rows, n) = m.shape();
    let mut a = m.as_slice().to_vec();
    let mut w = ComplexMatrix::identity(n).into_vec();
    let eps = f64::EPSILON;
    // columns below this squared norm are numerically zero and never rotated
    let negligible = (eps * m.frobenius_norm()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..rows {
                    let x = a[k * n + p];
                    let y = a[k * n + q];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if alpha <= negligible || beta <= negligible || gamma.norm() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rot.apply_cols(&mut a, rows, n, p, q);
                rot.apply_cols(&mut w, n, n, p, q);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::ConvergenceFailure("one-sided jacobi svd"));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|k| a[k * n + j].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma_max = norms[order[0]];
    let cutoff = sigma_max * (rows.max(n) as f64) * eps;

    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(rows);
    let mut singular_values = Vec::with_capacity(n);
    let mut v = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        singular_values.push(norms[j]);
        for i in 0..n {
            v[(k, i)] = w[i * n + j].conj();
        }
        if norms[j] > cutoff {
            u_cols.push((0..rows).map(|i| a[i * n + j] / norms[j]).collect());
        }
    }
    complete_basis(&mut u_cols, rows);
    let mut u = ComplexMatrix::zeros(rows, rows);
    for (k, col) in u_cols.iter().enumerate() {
        u.set_col(k, col);
    }
    Ok(SvdDecomposition { u, singular_values, v })
}

/// Extends orthonormal vectors to a basis of C^dim with Gram-Schmidt on the
/// standard basis, choosing the candidate with the largest residual each time.
pub fn complete_basis(basis: &mut Vec<Vec<C64>>, dim: usize) {
    while basis.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..dim {
            let mut e = vec![ZERO; dim];
            e[i] = ONE;
            for _ in 0..2 {
                for b in basis.iter() {
                    let proj = vec_dot(b, &e);
                    e.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
                }
            }
            let norm = vec_norm(&e);
            if best.as_ref().is_none_or(|(n, _)| norm > *n + 1e-12) {
                best = Some((norm, e));
            }
        }
        let (norm, mut e) = best.expect("dimension is positive");
        e.iter_mut().for_each(|x| *x /= norm);
        basis.push(e);
    }
}
