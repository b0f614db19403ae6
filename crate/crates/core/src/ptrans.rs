//! Bipartite structure on `C^m (x) C^n`: partial transpose, inertia, and
//! product-vector detection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, normalize_phase, svd, vec_dot, vec_kron, vec_norm, ComplexMatrix, C64};

/// Default relative zero threshold for inertia counting.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BipartiteDims {
    pub m: usize,
    pub n: usize,
}

impl BipartiteDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!("bipartite dimensions {m}x{n} must be positive")));
        }
        Ok(Self { m, n })
    }

    pub fn order(&self) -> usize {
        self.m * self.n
    }

    /// Flat index of `|i, k>`.
    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.n + k
    }

    fn check(&self, order: usize) -> Result<()> {
        if order != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "order {order} does not factor as {}x{}",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl FromStr for BipartiteDims {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::DimensionMismatch(format!("cannot parse dimensions `{s}` (expected MxN)"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = a.trim().parse().map_err(|_| bad())?;
        let n = b.trim().parse().map_err(|_| bad())?;
        Self::new(m, n)
    }
}

/// Which tensor factor the transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Subsystem {
    #[default]
    A,
    B,
}

/// `(neg, zero, pos)` eigenvalue counts, negatives first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Inertia {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

impl Inertia {
    pub const fn new(neg: usize, zero: usize, pos: usize) -> Self {
        Self { neg, zero, pos }
    }

    pub fn order(&self) -> usize {
        self.neg + self.zero + self.pos
    }

    /// Counts eigenvalues against an absolute threshold.
    pub fn from_eigenvalues(eigenvalues: &[f64], threshold: f64) -> Self {
        let neg = eigenvalues.iter().filter(|&&x| x < -threshold).count();
        let pos = eigenvalues.iter().filter(|&&x| x > threshold).count();
        Self { neg, zero: eigenvalues.len() - neg - pos, pos }
    }
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.neg, self.zero, self.pos)
    }
}

impl FromStr for Inertia {
    type Err = Error;
    /// Accepts `a,b,c` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTarget { target: s.to_string(), reason: "expected three counts a,b,c".into() };
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<usize> = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match parts.as_slice() {
            &[a, b, c] => Ok(Self::new(a, b, c)),
            _ => Err(bad()),
        }
    }
}

/// Unit factors of a product vector `beta (x) alpha`.
///
/// The first significant component of `beta` is real positive; any global
/// phase lives in `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    pub beta: Vec<C64>,
    pub alpha: Vec<C64>,
}

impl ProductVector {
    pub fn new(beta: Vec<C64>, alpha: Vec<C64>) -> Result<Self> {
        let nb = vec_norm(&beta);
        let na = vec_norm(&alpha);
        if nb == 0.0 || na == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut beta: Vec<C64> = beta.iter().map(|z| z / nb).collect();
        let before = beta.clone();
        normalize_phase(&mut beta, 1e-10);
        // carry the removed phase over to alpha so the tensor product is unchanged
        let phase = vec_dot(&beta, &before);
        let alpha = alpha.iter().map(|z| z / na * phase).collect();
        Ok(Self { beta, alpha })
    }

    pub fn dims(&self) -> BipartiteDims {
        BipartiteDims { m: self.beta.len(), n: self.alpha.len() }
    }

    pub fn to_vector(&self) -> Vec<C64> {
        vec_kron(&self.beta, &self.alpha)
    }

    /// `conj(beta) (x) alpha`, the vector that `M` annihilates whenever
    /// `M^Gamma` annihilates this one and `M >= 0`.
    pub fn partial_conjugate(&self) -> Vec<C64> {
        let b: Vec<C64> = self.beta.iter().map(|z| z.conj()).collect();
        vec_kron(&b, &self.alpha)
    }
}

/// Partial transpose on system A: block `(i, j)` of the result is block `(j, i)`
/// of the input, blocks being `n x n`.
pub fn partial_transpose(m: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    partial_transpose_on(m, dims, Subsystem::A)
}

pub fn partial_transpose_on(m: &ComplexMatrix, dims: BipartiteDims, system: Subsystem) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    dims.check(m.rows())?;
    let n = dims.n;
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        match system {
            Subsystem::A => m[(j * n + k, i * n + l)],
            Subsystem::B => m[(i * n + l, j * n + k)],
        }
    }))
}

/// Inertia with zero threshold `zero_tol * max(1, |M|_F)`.
pub fn inertia(m: &ComplexMatrix, zero_tol: f64) -> Result<Inertia> {
    let values = eigvalsh(m)?;
    Ok(Inertia::from_eigenvalues(&values, zero_tol * m.frobenius_norm().max(1.0)))
}

fn reshape(v: &[C64], dims: BipartiteDims) -> ComplexMatrix {
    ComplexMatrix::from_fn(dims.m, dims.n, |i, k| v[dims.index(i, k)])
}

/// Returns the factors when `v`, reshaped to `m x n`, has `sigma_2 <= tol sigma_1`.
pub fn is_product_vector(v: &[C64], dims: BipartiteDims, tol: f64) -> Result<Option<ProductVector>> {
    dims.check(v.len())?;
    if vec_norm(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = svd(&reshape(v, dims))?;
    let second = s.singular_values.get(1).copied().unwrap_or(0.0);
    if second > tol * s.singular_values[0] {
        return Ok(None);
    }
    let beta = s.u.col(0);
    let alpha: Vec<C64> = s.v.row(0).to_vec();
    ProductVector::new(beta, alpha).map(Some)
}

/// Product vectors found in a two-dimensional span.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilProducts {
    pub vectors: Vec<ProductVector>,
    /// Every vector of the span is a product vector; `vectors` then holds
    /// the two generators.
    pub is_line: bool,
}

/// Tolerance for filtering pencil candidates through the rank-one test.
pub const PENCIL_FILTER_TOL: f64 = 1e-7;

/// Product vectors in `span{v1, v2}`.
///
/// With `A`, `B` the reshaped inputs, `A + lambda B` has rank at most one iff
/// all of its 2x2 minors vanish. Each minor is a quadratic in `lambda`; the
/// roots of the one with the largest leading coefficient give the finite
/// candidates, `B` alone is the `lambda = infinity` candidate, and each
/// candidate is kept only if it passes [`is_product_vector`].
pub fn pencil_product_vectors(v1: &[C64], v2: &[C64], dims: BipartiteDims) -> Result<PencilProducts> {
    dims.check(v1.len())?;
    dims.check(v2.len())?;
    let n1 = vec_norm(v1);
    let n2 = vec_norm(v2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DependentInputs);
    }
    let u1: Vec<C64> = v1.iter().map(|z| z / n1).collect();
    let u2: Vec<C64> = v2.iter().map(|z| z / n2).collect();
    let overlap = vec_dot(&u1, &u2).norm();
    if overlap > 1.0 - 1e-10 {
        return Err(Error::DependentInputs);
    }
    let a = reshape(&u1, dims);
    let b = reshape(&u2, dims);

    // minor(i,j;k,l) of A + x B = c0 + c1 x + c2 x^2
    let mut quads: Vec<[C64; 3]> = Vec::new();
    for i in 0..dims.m {
        for j in i + 1..dims.m {
            for k in 0..dims.n {
                for l in k + 1..dims.n {
                    let c0 = a[(i, k)] * a[(j, l)] - a[(i, l)] * a[(j, k)];
                    let c1 = a[(i, k)] * b[(j, l)] + b[(i, k)] * a[(j, l)] - a[(i, l)] * b[(j, k)] - b[(i, l)] * a[(j, k)];
                    let c2 = b[(i, k)] * b[(j, l)] - b[(i, l)] * b[(j, k)];
                    quads.push([c0, c1, c2]);
                }
            }
        }
    }
    let vanish = 1e-12;
    let biggest = |idx: usize| {
        quads
            .iter()
            .max_by(|p, q| p[idx].norm().total_cmp(&q[idx].norm()))
            .copied()
    };

    let is_line = quads.iter().all(|q| q.iter().all(|c| c.norm() <= vanish));
    if is_line {
        let vectors = [&u1, &u2]
            .iter()
            .filter_map(|v| is_product_vector(v, dims, PENCIL_FILTER_TOL).ok().flatten())
            .collect();
        return Ok(PencilProducts { vectors, is_line: true });
    }

    let mut roots: Vec<C64> = Vec::new();
    if let Some(q) = biggest(2).filter(|q| q[2].norm() > vanish) {
        let [c0, c1, c2] = q;
        let disc = (c1 * c1 - c0 * c2 * 4.0).sqrt();
        // numerically stable quadratic roots
        let s = if (c1.conj() * disc).re >= 0.0 { c1 + disc } else { c1 - disc };
        if s.norm() > 0.0 {
            roots.push(-s / (c2 * 2.0));
            roots.push(-(c0 * 2.0) / s);
        } else {
            roots.push(C64::new(0.0, 0.0));
        }
    } else if let Some(q) = biggest(1).filter(|q| q[1].norm() > vanish) {
        roots.push(-q[0] / q[1]);
    }

    let mut candidates: Vec<Vec<C64>> = roots
        .iter()
        .filter(|r| r.is_finite())
        .map(|&x| u1.iter().zip(&u2).map(|(p, q)| p + q * x).collect())
        .collect();
    candidates.push(u2.clone());

    let mut vectors: Vec<ProductVector> = Vec::new();
    for c in candidates {
        if vec_norm(&c) <= 1e-12 {
            continue;
        }
        if let Some(pv) = is_product_vector(&c, dims, PENCIL_FILTER_TOL)? {
            let w = pv.to_vector();
            let duplicate = vectors.iter().any(|e| vec_dot(&e.to_vector(), &w).norm() >= 1.0 - 1e-8);
            if !duplicate {
                vectors.push(pv);
            }
        }
    }
    Ok(PencilProducts { vectors, is_line: false })
}
