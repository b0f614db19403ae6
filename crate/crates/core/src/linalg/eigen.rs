use serde::{Deserialize, Serialize};

use super::matrix::{normalize_phase, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius target, relative to the input norm.
pub const OFF_DIAGONAL_TARGET: f64 = 1e-13;
/// Hermiticity defect (relative to `1 + |M|_F`) above which input is rejected.
pub const HERMITIAN_REJECT: f64 = 1e-8;

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.col(i)
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..n {
                let vik = v[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `|V^dagger V - I|_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        v.adjoint().matmul(v).distance(&ComplexMatrix::identity(v.cols()))
    }

    /// `max_i |M v_i - lambda_i v_i|_2`.
    pub fn max_residual(&self, m: &ComplexMatrix) -> f64 {
        (0..self.eigenvalues.len())
            .map(|i| {
                let v = self.eigenvector(i);
                let mv = m.matvec(&v);
                mv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * self.eigenvalues[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_REJECT * (1.0 + m.frobenius_norm()) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(M + M^dagger)/2` before the sweep; a defect
/// above `1e-8 (1 + |M|_F)` is rejected instead. Eigenvalues come back in
/// ascending order and each eigenvector has its first significant component
/// real positive, so the output is a pure function of the input bits.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part().into_vec();
    let mut v = ComplexMatrix::identity(n).into_vec();
    jacobi(&mut a, n, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|r| v[r * n + i]).collect();
        normalize_phase(&mut col, 1e-10);
        vectors.set_col(k, &col);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors })
}

/// Ascending eigenvalues only; same sweep as [`eig_hermitian`] without
/// accumulating the rotations.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part().into_vec();
    jacobi(&mut a, n, None)?;
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Parameters of the unitary acting on coordinates (p, q) that zeroes the
/// off-diagonal entry of the Hermitian 2x2 block `[[alpha, g], [conj g, beta]]`.
///
/// The rotation is `diag(1, conj(e)) * [[c, s], [-s, c]]` with `e = g/|g|`;
/// `t` is the tangent of the real rotation angle.
#[derive(Clone, Copy)]
pub(crate) struct Rotation {
    pub c: f64,
    pub s: f64,
    pub e: C64,
    pub t: f64,
}

impl Rotation {
    pub(crate) fn new(alpha: f64, beta: f64, g: C64) -> Self {
        let r = g.norm();
        let e = g / r;
        let theta = (beta - alpha) / (2.0 * r);
        let t = if theta == 0.0 {
            1.0
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Rotation { c, s: t * c, e, t }
    }

    /// Right-multiplies columns p and q of a row-major `rows x n` buffer.
    #[inline]
    pub(crate) fn apply_cols(&self, buf: &mut [C64], rows: usize, n: usize, p: usize, q: usize) {
        let eb = self.e.conj();
        for k in 0..rows {
            let x = buf[k * n + p];
            let y = buf[k * n + q];
            buf[k * n + p] = x * self.c - y * eb * self.s;
            buf[k * n + q] = x * self.s + y * eb * self.c;
        }
    }

    /// Left-multiplies rows p and q by the adjoint rotation.
    #[inline]
    fn apply_rows_adjoint(&self, buf: &mut [C64], n: usize, p: usize, q: usize) {
        for k in 0..n {
            let x = buf[p * n + k];
            let y = buf[q * n + k];
            buf[p * n + k] = x * self.c - y * self.e * self.s;
            buf[q * n + k] = x * self.s + y * self.e * self.c;
        }
    }
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(a: &mut [C64], n: usize, mut v: Option<&mut [C64]>) -> Result<()> {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || n < 2 {
        return Ok(());
    }
    let target = OFF_DIAGONAL_TARGET * norm;
    let negligible = 1e-18 * norm;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, n) <= target {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[p * n + q];
                if g.norm() <= negligible {
                    continue;
                }
                let alpha = a[p * n + p].re;
                let beta = a[q * n + q].re;
                let rot = Rotation::new(alpha, beta, g);
                let r = g.norm();
                rot.apply_cols(a, n, n, p, q);
                rot.apply_rows_adjoint(a, n, p, q);
                a[p * n + p] = C64::new(alpha - rot.t * r, 0.0);
                a[q * n + q] = C64::new(beta + rot.t * r, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                if let Some(v) = v.as_deref_mut() {
                    rot.apply_cols(v, n, n, p, q);
                }
            }
        }
    }
    if off_diagonal_norm(a, n) <= target {
        Ok(())
    } else {
        Err(Error::ConvergenceFailure("hermitian jacobi"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{gaussian_matrix, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eig_hermitian(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(e.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let e = eig_hermitian(&ComplexMatrix::from_diagonal(&[2.0, -1.0, 0.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 0.0, 2.0]);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 9);
            let e = eig_hermitian(&h).unwrap();
            let scale = h.frobenius_norm();
            assert!(e.reconstruct().distance(&h) <= 1e-10 * scale);
            assert!(e.orthonormality_defect() <= 1e-10);
            assert!(e.max_residual(&h) <= 1e-10 * scale);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let vals = eigvalsh(&h).unwrap();
            for (a, b) in vals.iter().zip(&e.eigenvalues) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let g = gaussian_matrix(&mut ChaCha8Rng::seed_from_u64(1), 3, 3);
        assert!(matches!(eig_hermitian(&g), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            eig_hermitian(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn small_defect_is_repaired() {
        let mut h = ComplexMatrix::from_diagonal(&[1.0, 2.0]);
        h[(0, 1)] = C64::new(0.5, 1e-12);
        h[(1, 0)] = C64::new(0.5, 0.0);
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
    }

    #[test]
    fn deterministic_for_identical_input() {
        let h = random_hermitian(&mut ChaCha8Rng::seed_from_u64(3), 7);
        assert_eq!(eig_hermitian(&h).unwrap(), eig_hermitian(&h.clone()).unwrap());
    }
}
