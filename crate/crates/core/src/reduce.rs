//! Constructive reductions: Hermitian combinations of 2x2 blocks,
//! kernel-aligned normal forms, cross-block and minor-based inertia.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{congruence, determinant, eigvalsh, kron, rank, svd, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::ptrans::{partial_transpose, BipartiteDims, Inertia, ProductVector};

/// Kernel membership tolerance for the product vector, relative to `|M|_F`.
pub const KERNEL_TOL: f64 = 1e-7;
/// Eigenvalue floor still accepted as positive semidefinite, relative to `|M|_F`.
pub const PSD_FLOOR: f64 = 1e-8;

/// Scalars with `x S + y B1 + z B2` Hermitian and `(y, z) != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianCombination {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl HermitianCombination {
    pub fn combine(&self, s: &ComplexMatrix, b1: &ComplexMatrix, b2: &ComplexMatrix) -> ComplexMatrix {
        &(&s.scale(self.x) + &b1.scale(self.y)) + &b2.scale(self.z)
    }
}

fn check_2x2(m: &ComplexMatrix, name: &str) -> Result<()> {
    if m.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!("{name} must be 2x2, got {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

/// Finds `x = i x2`, `y`, `z` making `x S + y B1 + z B2` Hermitian.
///
/// Hermiticity is four real linear conditions on the five real unknowns
/// `(x2, Re y, Im y, Re z, Im z)`; an SVD null vector always exists, and the
/// one with the largest `(y, z)` part is returned, normalised to unit length.
pub fn hermitian_combination(s: &ComplexMatrix, b1: &ComplexMatrix, b2: &ComplexMatrix) -> Result<HermitianCombination> {
    check_2x2(s, "S")?;
    check_2x2(b1, "B1")?;
    check_2x2(b2, "B2")?;
    let s = s.hermitian_part();
    let (a, b, c) = (s[(0, 0)].re, s[(1, 1)].re, s[(0, 1)]);
    let (d, e, f, g) = (b1[(0, 0)], b1[(0, 1)], b1[(1, 0)], b1[(1, 1)]);
    let (h, k, l, m) = (b2[(0, 0)], b2[(0, 1)], b2[(1, 0)], b2[(1, 1)]);
    let system = ComplexMatrix::from_real_rows(&[
        &[a, d.im, d.re, h.im, h.re],
        &[b, g.im, g.re, m.im, m.re],
        &[2.0 * c.im, f.re - e.re, e.im - f.im, l.re - k.re, k.im - l.im],
        &[2.0 * c.re, e.im + f.im, e.re + f.re, k.im + l.im, k.re + l.re],
    ]);
    if system.frobenius_norm() == 0.0 {
        return Ok(HermitianCombination { x: ZERO, y: ONE, z: ZERO });
    }
    let basis = svd(&system)?.null_space(1e-10);
    let yz_norm = |v: &Vec<C64>| v[1..].iter().map(|t| t.re * t.re).sum::<f64>().sqrt();
    let best = basis
        .iter()
        .max_by(|p, q| yz_norm(p).total_cmp(&yz_norm(q)))
        .filter(|v| yz_norm(v) > 1e-8)
        .ok_or(Error::DegenerateSystem)?;
    let r: Vec<f64> = best.iter().map(|t| t.re).collect();
    let norm = r.iter().map(|t| t * t).sum::<f64>().sqrt();
    Ok(HermitianCombination {
        x: C64::new(0.0, r[0] / norm),
        y: C64::new(r[1], r[2]) / norm,
        z: C64::new(r[3], r[4]) / norm,
    })
}

/// Local congruence that aligns a product kernel vector with `|0,0>`.
///
/// `left` and `right` are the factors `A`, `B` with `A e1 ~ beta` and
/// `B e1 ~ alpha`; the input is mapped to `result = (A^T (x) B^dagger) M (conj A (x) B)`,
/// whose partial transpose is `(A (x) B)^dagger M^Gamma (A (x) B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
    pub result: ComplexMatrix,
}

impl ReductionCertificate {
    /// The congruence factor `A^T (x) B^dagger` with `result = P M P^dagger`.
    pub fn transform(&self) -> ComplexMatrix {
        kron(&self.left.transpose(), &self.right.adjoint())
    }
}

/// Unitary Householder reflection sending `e1` to a unit multiple of `v`.
fn householder_to(v: &[C64]) -> Result<ComplexMatrix> {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = v.len();
    let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
    let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
    let mut u = v.iter().map(|z| -z).collect::<Vec<_>>();
    u[0] += phase;
    let un = vec_norm(&u);
    if un <= 1e-14 {
        return Ok(ComplexMatrix::identity(n));
    }
    let outer = ComplexMatrix::outer(&u).scale_real(2.0 / (un * un));
    Ok(&ComplexMatrix::identity(n) - &outer)
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvalsh(m)?.first().copied().unwrap_or(0.0))
}

/// Congruence by local factors after which `|0,0>` lies in the kernel of
/// both the result and its partial transpose.
pub fn zero_first_row_col(m: &ComplexMatrix, dims: BipartiteDims, phi: &ProductVector) -> Result<ReductionCertificate> {
    if phi.dims() != dims {
        return Err(Error::DimensionMismatch(format!("product vector is {} but dims are {dims}", phi.dims())));
    }
    let pt = partial_transpose(m, dims)?;
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let min_eig = min_eigenvalue(m)?;
    if min_eig < -PSD_FLOOR * scale {
        return Err(Error::NotPsd { min_eigenvalue: min_eig });
    }
    let residual = vec_norm(&pt.matvec(&phi.to_vector()));
    if residual > KERNEL_TOL * scale {
        return Err(Error::NotInKernel { residual });
    }
    let left = householder_to(&phi.beta)?;
    let right = householder_to(&phi.alpha)?;
    let p = kron(&left.transpose(), &right.adjoint());
    let result = congruence(&p, m)?;
    Ok(ReductionCertificate { left, right, result })
}

/// `[[0, B], [B^dagger, 0]]`.
pub fn cross_block(b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = b.shape();
    ComplexMatrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
        (true, false) => b[(i, j - n)],
        (false, true) => b[(j, i - n)].conj(),
        _ => ZERO,
    })
}

/// Inertia of [`cross_block`]`(b)`: `(r, m + n - 2r, r)` with `r = rank b`.
pub fn cross_inertia(b: &ComplexMatrix) -> Inertia {
    let r = rank(b, 1e-9);
    Inertia::new(r, b.rows() + b.cols() - 2 * r, r)
}

/// Leading principal minors `|M_1|, ..., |M_n|` (real parts).
pub fn leading_minors(m: &ComplexMatrix) -> Vec<f64> {
    (1..=m.rows()).map(|s| determinant(&m.sub_matrix(0, 0, s, s)).re).collect()
}

/// Inertia from the sign pattern of the leading principal minors, or `None`
/// when some minor is too small to have a reliable sign.
pub fn inertia_from_minors(m: &ComplexMatrix) -> Option<Inertia> {
    if !m.is_square() {
        return None;
    }
    let base = 1.0 + m.frobenius_norm();
    let minors = leading_minors(m);
    let mut prev = 1.0f64;
    let mut neg = 0;
    for (s, &d) in minors.iter().enumerate() {
        if d.abs() <= 1e-10 * base.powi(s as i32 + 1) {
            return None;
        }
        if d.signum() != prev.signum() {
            neg += 1;
        }
        prev = d;
    }
    Some(Inertia::new(neg, 0, m.rows() - neg))
}

/// `M - k A A^dagger`.
pub fn rank_downdate(m: &ComplexMatrix, a: &ComplexMatrix, k: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if a.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!("factor has {} rows, matrix has order {}", a.rows(), m.rows())));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidConfig(format!("downdate weight must be positive, got {k}")));
    }
    Ok((m - &a.gram().scale_real(k)).hermitian_part())
}
