use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::{sample_kernel_state, sample_state_with, task_rng};
use super::thread_pool;
use crate::error::{Error, Result};
use crate::linalg::random::{gaussian_matrix, gaussian_real_vector, gaussian_vector, random_hermitian};
use crate::linalg::{eig_hermitian, kron, principal_submatrix, vec_dot, vec_kron, vec_norm, ComplexMatrix, C64};
use crate::ptrans::{inertia, partial_transpose, pencil_product_vectors, BipartiteDims, Inertia, DEFAULT_ZERO_TOL};
use crate::reduce::{cross_block, cross_inertia, hermitian_combination, inertia_from_minors, rank_downdate, zero_first_row_col};

/// Registered lemma checks, in the order `"all"` runs them.
pub const LEMMAS: &[&str] = &[
    "product-tran",
    "vector-tran",
    "sumdif",
    "projection",
    "sub-lem",
    "cross-lem",
    "det-lem",
    "negative-change",
    "ker-trans",
    "pro-in-ker",
    "ew-positive-count",
    "hermit-22",
    "first-tran",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_defect: f64,
    pub tolerance: f64,
}

impl LemmaOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub outcomes: Vec<LemmaOutcome>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(LemmaOutcome::ok)
    }
}

type Trial = fn(&mut ChaCha8Rng) -> Result<Vec<f64>>;

/// Part names with their tolerances, and the trial producing one defect per part.
fn suite(name: &str) -> Option<(&'static [(&'static str, f64)], Trial)> {
    Some(match name {
        "product-tran" => (&[("product-tran", 1e-12)], product_tran),
        "vector-tran" => (&[("vector-tran (i)", 1e-12), ("vector-tran (ii)", 1e-8)], vector_tran),
        "sumdif" => (&[("sumdif", 0.0), ("sumdif (psd shift)", 0.0)], sumdif),
        "projection" => (&[("projection", 0.0), ("projection (principal submatrix)", 0.0)], projection),
        "sub-lem" => (&[("sub-lem", 0.0), ("sub-lem (row removal)", 1e-12)], sub_lem),
        "cross-lem" => (&[("cross-lem", 0.0)], cross_lem),
        "det-lem" => (&[("det-lem", 0.0)], det_lem),
        "negative-change" => (&[("negative-change (i)", 0.0), ("negative-change (ii)", 0.0)], negative_change),
        "ker-trans" => (&[("ker-trans", 0.0)], ker_trans),
        "pro-in-ker" => (&[("pro-in-ker", 1e-7), ("pro-in-ker (negative span)", 0.0)], pro_in_ker),
        "ew-positive-count" => (&[("ew-positive-count", 0.0)], ew_positive_count),
        "hermit-22" => (&[("hermit-22", 1e-12)], hermit_22),
        "first-tran" => (&[("first-tran", 1e-10), ("first-tran (inertia)", 0.0)], first_tran),
        _ => return None,
    })
}

/// Runs the randomized suite for `name`, or every suite for `"all"`.
///
/// Trial `t` of lemma `k` draws from stream `(k << 32) | t`, so reports are
/// independent of thread count and of which lemmas are selected.
pub fn verify_lemma(name: &str, trials: usize, seed: u64) -> Result<VerificationReport> {
    let selected: Vec<(usize, &str)> = if name == "all" {
        LEMMAS.iter().copied().enumerate().collect()
    } else {
        let k = LEMMAS.iter().position(|&l| l == name).ok_or_else(|| Error::UnknownLemma(name.to_string()))?;
        vec![(k, LEMMAS[k])]
    };
    if trials == 0 {
        return Err(Error::InvalidConfig("verification needs at least one trial".into()));
    }
    let pool = thread_pool();
    let mut outcomes = Vec::new();
    for (k, lemma) in selected {
        let (parts, trial) = suite(lemma).expect("registered lemma");
        let defects: Vec<Vec<f64>> = pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| trial(&mut task_rng(seed, ((k as u64) << 32) | t as u64)))
                .collect::<Result<_>>()
        })?;
        for (p, &(part, tolerance)) in parts.iter().enumerate() {
            let column = defects.iter().map(|d| d[p]);
            let failed = column.clone().filter(|&x| !(x <= tolerance)).count();
            outcomes.push(LemmaOutcome {
                name: part.to_string(),
                trials,
                passed: trials - failed,
                failed,
                worst_defect: column.fold(0.0, f64::max),
                tolerance,
            });
        }
    }
    Ok(VerificationReport { seed, trials, outcomes })
}

fn random_dims(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> BipartiteDims {
    BipartiteDims::new(rng.random_range(lo..=hi), rng.random_range(lo..=hi)).expect("positive dims")
}

fn zero_tol_inertia(m: &ComplexMatrix) -> Result<Inertia> {
    inertia(m, DEFAULT_ZERO_TOL)
}

/// `sum_i s_i g_i g_i^dagger` with `neg` negative and `pos` positive terms.
fn signed_low_rank(rng: &mut ChaCha8Rng, d: usize, neg: usize, pos: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..neg + pos {
        let g = ComplexMatrix::outer(&gaussian_vector(rng, d));
        m = if i < neg { &m - &g } else { &m + &g };
    }
    m
}

fn random_signed(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let neg = rng.random_range(0..=d);
    let pos = rng.random_range(0..=d - neg);
    signed_low_rank(rng, d, neg, pos)
}

fn excess(lhs: usize, rhs: usize) -> f64 {
    lhs.saturating_sub(rhs) as f64
}

fn mismatch(a: Inertia, b: Inertia) -> f64 {
    (a.neg.abs_diff(b.neg) + a.zero.abs_diff(b.zero) + a.pos.abs_diff(b.pos)) as f64
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(f64::MIN_POSITIVE)
}

fn product_tran(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = random_dims(rng, 1, 4);
    let (m, n) = (dims.m, dims.n);
    let a = gaussian_matrix(rng, m, m);
    let c = gaussian_matrix(rng, m, m);
    let b = gaussian_matrix(rng, n, n);
    let d = gaussian_matrix(rng, n, n);
    let x = random_hermitian(rng, dims.order());
    let lhs = partial_transpose(&kron(&a, &b).matmul(&x).matmul(&kron(&c, &d)), dims)?;
    let rhs = kron(&c.transpose(), &b).matmul(&partial_transpose(&x, dims)?).matmul(&kron(&a.transpose(), &d));
    Ok(vec![rel(lhs.distance(&rhs), rhs.frobenius_norm())])
}

fn vector_tran(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = random_dims(rng, 2, 4);
    let beta: Vec<C64> = gaussian_real_vector(rng, dims.m).into_iter().map(|x| C64::new(x, 0.0)).collect();
    let alpha = gaussian_vector(rng, dims.n);
    let phi = vec_kron(&beta, &alpha);
    let h = random_hermitian(rng, dims.order());
    let hp = partial_transpose(&h, dims)?;
    let q1 = vec_dot(&phi, &h.matvec(&phi));
    let q2 = vec_dot(&phi, &hp.matvec(&phi));
    let first = rel((q1 - q2).norm(), h.frobenius_norm() * vec_norm(&phi).powi(2));

    let dims = random_dims(rng, 2, 4);
    let terms = rng.random_range(1..dims.order());
    let (state, pv) = sample_kernel_state(rng, dims, terms, true)?;
    let phi = pv.to_vector();
    let scale = state.frobenius_norm();
    let pre = vec_norm(&partial_transpose(&state, dims)?.matvec(&phi));
    if pre > 1e-10 * scale {
        return Err(Error::NotInKernel { residual: pre });
    }
    let second = rel(vec_norm(&state.matvec(&phi)), scale);
    Ok(vec![first, second])
}

fn sumdif(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = rng.random_range(2..=12);
    let a = random_signed(rng, d);
    let b = random_signed(rng, d);
    let (ia, ib, iab) = (zero_tol_inertia(&a)?, zero_tol_inertia(&b)?, zero_tol_inertia(&(&a + &b))?);
    let first = excess(iab.neg, ia.neg + ib.neg).max(excess(iab.pos, ia.pos + ib.pos));

    let rank = rng.random_range(0..=d);
    let p = signed_low_rank(rng, d, 0, rank);
    let n = random_signed(rng, d);
    let (i_n, i_sum) = (zero_tol_inertia(&n)?, zero_tol_inertia(&(&p + &n))?);
    let second = excess(i_sum.neg, i_n.neg).max(excess(i_n.pos, i_sum.pos));
    Ok(vec![first, second])
}

fn projection(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = rng.random_range(2..=12);
    let m = random_signed(rng, d);
    let im = zero_tol_inertia(&m)?;
    let k = rng.random_range(1..=d);
    let p = &gaussian_matrix(rng, d, k).matmul(&gaussian_matrix(rng, k, d));
    let ix = zero_tol_inertia(&p.matmul(&m).matmul(&p.adjoint()))?;
    let first = excess(ix.neg, im.neg).max(excess(ix.pos, im.pos));

    let mut keep: Vec<usize> = (0..d).filter(|_| rng.random::<bool>()).collect();
    if keep.is_empty() {
        keep.push(rng.random_range(0..d));
    }
    let is = zero_tol_inertia(&principal_submatrix(&m, &keep)?)?;
    let second = excess(is.neg, im.neg).max(excess(is.pos, im.pos));
    Ok(vec![first, second])
}

/// Leading principal submatrices of `M^Gamma`, and removal of every row and
/// column with second index 0 from a 3x4 state, which commutes with the
/// partial transpose.
fn sub_lem(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = BipartiteDims::new(3, 4)?;
    let d = dims.order();
    let rank = rng.random_range(1..=d);
    let state = sample_state_with(rng, dims, rank)?;
    let pt = partial_transpose(&state, dims)?;
    let ip = zero_tol_inertia(&pt)?;
    let s = rng.random_range(1..=d);
    let lead: Vec<usize> = (0..s).collect();
    let il = zero_tol_inertia(&principal_submatrix(&pt, &lead)?)?;
    let first = excess(il.neg, ip.neg).max(excess(il.pos, ip.pos));

    let keep: Vec<usize> = (0..d).filter(|i| i % dims.n != 0).collect();
    let sub_dims = BipartiteDims::new(3, 3)?;
    let n_gamma = partial_transpose(&principal_submatrix(&state, &keep)?, sub_dims)?;
    let removed = principal_submatrix(&pt, &keep)?;
    let commute = rel(n_gamma.distance(&removed), pt.frobenius_norm());
    let isub = zero_tol_inertia(&n_gamma)?;
    let bound = excess(isub.neg, ip.neg).max(excess(isub.pos, ip.pos));
    Ok(vec![first, if bound > 0.0 { f64::MAX } else { commute }])
}

fn cross_lem(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let (n, m) = (rng.random_range(1..=5), rng.random_range(1..=5));
    let r = rng.random_range(0..=n.min(m));
    let b = gaussian_matrix(rng, n, r).matmul(&gaussian_matrix(rng, r, m));
    let by_eig = zero_tol_inertia(&cross_block(&b))?;
    Ok(vec![mismatch(cross_inertia(&b), by_eig)])
}

fn det_lem(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = rng.random_range(1..=8);
    let m = random_hermitian(rng, d);
    Ok(vec![match inertia_from_minors(&m) {
        Some(by_minors) => mismatch(by_minors, zero_tol_inertia(&m)?),
        None => 0.0,
    }])
}

/// Largest `k` in `(0, hi]` found by bisection with `In(M - k A A^dagger)` unchanged.
fn bisect_k0(m: &ComplexMatrix, a: &ComplexMatrix, target: Inertia, hi: f64) -> Result<f64> {
    let keeps = |k: f64| -> Result<bool> { Ok(zero_tol_inertia(&rank_downdate(m, a, k)?)? == target) };
    if keeps(hi)? {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if keeps(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn negative_change(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let d = rng.random_range(3..=9);
    let r = rng.random_range(1..d);
    let neg = rng.random_range(0..=r);
    let m = signed_low_rank(rng, d, neg, r - neg);
    let im = zero_tol_inertia(&m)?;
    let s = rng.random_range(1..=3);
    let scale = m.frobenius_norm();

    let range = eig_hermitian(&m)?;
    let basis: Vec<usize> = (0..d).filter(|&i| range.eigenvalues[i].abs() > 1e-9 * scale).collect();
    let coeffs = gaussian_matrix(rng, basis.len(), s);
    let a_in = ComplexMatrix::from_fn(d, s, |i, j| {
        basis.iter().enumerate().map(|(b, &col)| range.eigenvectors[(i, col)] * coeffs[(b, j)]).sum()
    });
    let unit = scale / a_in.frobenius_norm().powi(2);
    let k0 = bisect_k0(&m, &a_in, im, unit)?;
    let first = if k0 > 0.0 {
        [0.5, 0.1, 0.01]
            .iter()
            .map(|f| Ok(mismatch(zero_tol_inertia(&rank_downdate(&m, &a_in, f * k0)?)?, im)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    } else {
        f64::MAX
    };

    let a_out = gaussian_matrix(rng, d, s);
    let k = 10f64.powf(rng.random_range(-4.0..2.0)) * scale / a_out.frobenius_norm().powi(2);
    let after = zero_tol_inertia(&rank_downdate(&m, &a_out, k)?)?;
    let second = if after.neg > im.neg { 0.0 } else { 1.0 };
    Ok(vec![first, second])
}

/// Two-qutrit states whose `(0, 1)` block is Hermitian.
fn ker_trans(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = BipartiteDims::new(3, 3)?;
    let d = dims.order();
    let rank = rng.random_range(1..=d);
    let mut m = sample_state_with(rng, dims, rank)?;
    let block = m.sub_matrix(0, 3, 3, 3).hermitian_part();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, 3 + j)] = block[(i, j)];
            m[(3 + i, j)] = block[(j, i)].conj();
        }
    }
    let low = crate::linalg::eigvalsh(&m)?[0];
    let shift = (-low).max(0.0) + rng.random_range(0.0..0.05);
    let m = &m + &ComplexMatrix::identity(d).scale_real(shift);
    let diff = &partial_transpose(&m, dims)? - &m;
    Ok(vec![excess(zero_tol_inertia(&diff)?.neg, 3)])
}

/// Product vectors in non-positive eigenspaces of `M^Gamma` for NPT states
/// lie in its kernel; spans of negative eigenvectors hold none.
fn pro_in_ker(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = BipartiteDims::new(3, 3)?;
    let (state, phi, eig) = loop {
        let terms = rng.random_range(1..=6);
        let (state, phi) = sample_kernel_state(rng, dims, terms, false)?;
        let eig = eig_hermitian(&partial_transpose(&state, dims)?)?;
        if eig.eigenvalues[0] < -1e-6 * state.frobenius_norm() {
            break (state, phi, eig);
        }
    };
    let pt = partial_transpose(&state, dims)?;
    let scale = state.frobenius_norm();
    let found = pencil_product_vectors(&phi.to_vector(), &eig.eigenvector(0), dims)?;
    let first = if found.vectors.is_empty() {
        f64::MAX
    } else {
        found
            .vectors
            .iter()
            .map(|p| rel(vec_norm(&pt.matvec(&p.to_vector())), scale))
            .fold(0.0, f64::max)
    };

    let second = loop {
        let rank = rng.random_range(1..=4);
        let npt = sample_state_with(rng, dims, rank)?;
        let e = eig_hermitian(&partial_transpose(&npt, dims)?)?;
        let tau = 1e-6 * npt.frobenius_norm();
        if e.eigenvalues[1] < -tau {
            let f = pencil_product_vectors(&e.eigenvector(0), &e.eigenvector(1), dims)?;
            break if f.is_line { f64::MAX } else { f.vectors.len() as f64 };
        }
    };
    Ok(vec![first, second])
}

fn ew_positive_count(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = random_dims(rng, 2, 4);
    let rank = rng.random_range(1..=dims.order());
    let state = sample_state_with(rng, dims, rank)?;
    let ip = zero_tol_inertia(&partial_transpose(&state, dims)?)?;
    Ok(vec![if ip.neg > 0 { excess(3, ip.pos) } else { 0.0 }])
}

fn hermit_22(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let s = random_hermitian(rng, 2);
    let b1 = gaussian_matrix(rng, 2, 2);
    let b2 = gaussian_matrix(rng, 2, 2);
    let c = hermitian_combination(&s, &b1, &b2)?;
    let combined = c.combine(&s, &b1, &b2);
    let scale = s.frobenius_norm() + b1.frobenius_norm() + b2.frobenius_norm();
    let yz = c.y.norm() + c.z.norm();
    Ok(vec![if yz > 1e-8 { rel(combined.hermitian_defect(), scale) } else { f64::MAX }])
}

fn first_tran(rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let dims = random_dims(rng, 2, 4);
    let terms = rng.random_range(1..dims.order());
    let real_beta = rng.random::<bool>();
    let (state, phi) = sample_kernel_state(rng, dims, terms, real_beta)?;
    let cert = zero_first_row_col(&state, dims, &phi)?;
    let pt = partial_transpose(&cert.result, dims)?;
    let d = dims.order();
    let edge = (0..d)
        .map(|i| cert.result[(0, i)].norm().max(cert.result[(i, 0)].norm()).max(pt[(0, i)].norm()).max(pt[(i, 0)].norm()))
        .fold(0.0, f64::max);
    let same = mismatch(zero_tol_inertia(&cert.result)?, zero_tol_inertia(&state)?)
        + mismatch(zero_tol_inertia(&pt)?, zero_tol_inertia(&partial_transpose(&state, dims)?)?);
    Ok(vec![rel(edge, cert.result.frobenius_norm()), same])
}
