use super::eigen::eigvalsh;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::svd::svd;
use crate::error::{Error, Result};

/// Number of singular values above `tol * max(1, sigma_max)`.
pub fn rank(m: &ComplexMatrix, tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let s = svd(m).expect("one-sided jacobi converges on finite input");
    let cutoff = tol * s.largest().max(1.0);
    s.singular_values.iter().filter(|&&x| x > cutoff).count()
}

/// Kronecker product; entry `(i p + k, j q + l)` is `a[i][j] b[k][l]` for `b` of size p x q.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// `P M P^dagger`, re-symmetrised.
pub fn congruence(p: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if p.cols() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "congruence factor has {} columns, matrix has order {}",
            p.cols(),
            m.rows()
        )));
    }
    Ok(p.matmul(m).matmul(&p.adjoint()).hermitian_part())
}

/// Rows and columns restricted to `keep` (strictly increasing).
pub fn principal_submatrix(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let order = m.rows();
    if let Some(&bad) = keep.iter().find(|&&i| i >= order) {
        return Err(Error::IndexOutOfBounds { index: bad, order });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DimensionMismatch("principal indices must be strictly increasing".into()));
    }
    Ok(ComplexMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]))
}

/// `M22 - M21 M11^{-1} M12` for the leading `block_size` block.
///
/// The leading block must be invertible: its smallest |eigenvalue| has to
/// exceed `1e-10 |M11|_F`.
pub fn schur_complement(m: &ComplexMatrix, block_size: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if block_size == 0 || block_size > n {
        return Err(Error::DimensionMismatch(format!("block size {block_size} for order {n}")));
    }
    let k = block_size;
    let m11 = m.sub_matrix(0, 0, k, k);
    let m12 = m.sub_matrix(0, k, k, n - k);
    let m21 = m.sub_matrix(k, 0, n - k, k);
    let m22 = m.sub_matrix(k, k, n - k, n - k);

    let smallest = eigvalsh(&m11)?.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    if !(smallest > 1e-10 * m11.frobenius_norm()) {
        return Err(Error::SingularBlock { smallest });
    }
    let x = solve(&m11, &m12).ok_or(Error::SingularBlock { smallest })?;
    Ok((&m22 - &m21.matmul(&x)).hermitian_part())
}

struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    sign: f64,
}

fn lu_decompose(a: &ComplexMatrix) -> Option<Lu> {
    let n = a.rows();
    let mut lu = a.as_slice().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| lu[i * n + col].norm().total_cmp(&lu[j * n + col].norm()))?;
        if lu[pivot * n + col] == ZERO {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                lu.swap(pivot * n + j, col * n + j);
            }
            perm.swap(pivot, col);
            sign = -sign;
        }
        let d = lu[col * n + col];
        for i in col + 1..n {
            let f = lu[i * n + col] / d;
            lu[i * n + col] = f;
            for j in col + 1..n {
                let t = lu[col * n + j];
                lu[i * n + j] -= f * t;
            }
        }
    }
    Some(Lu { n, lu, perm, sign })
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> C64 {
    assert!(a.is_square());
    if a.rows() == 0 {
        return ONE;
    }
    match lu_decompose(a) {
        None => ZERO,
        Some(lu) => (0..lu.n).map(|i| lu.lu[i * lu.n + i]).product::<C64>() * lu.sign,
    }
}

/// Solves `A X = B`; `None` when `A` is exactly singular.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<ComplexMatrix> {
    assert!(a.is_square() && a.rows() == b.rows());
    let Lu { n, lu, perm, .. } = lu_decompose(a)?;
    let mut x = ComplexMatrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        let mut y: Vec<C64> = perm.iter().map(|&p| b[(p, c)]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = lu[i * n + j] * y[j];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = lu[i * n + j] * y[j];
                y[i] -= t;
            }
            y[i] /= lu[i * n + i];
        }
        x.set_col(c, &y);
    }
    Some(x)
}

pub fn inverse(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Dense real solve `A x = b` (row-major `n x n`) with partial pivoting.
pub fn solve_real(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            b.swap(pivot, col);
        }
        for i in col + 1..n {
            let f = a[i * n + col] / a[col * n + col];
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            b[i] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            b[i] -= a[i * n + j] * b[j];
        }
        b[i] /= a[i * n + i];
    }
    Some(b)
}
