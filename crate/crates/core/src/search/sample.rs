use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::random::{gaussian_matrix, gaussian_vector, real_gaussian_matrix};
use crate::linalg::{inverse, kron, ComplexMatrix, ONE, ZERO};
use crate::ptrans::{BipartiteDims, ProductVector};

/// Generator for task `index` of a run seeded with `seed`.
///
/// Every independent task (restart, census sample, verification trial) owns
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Trace-one Ginibre state `G G^dagger / tr` with `G` of shape `(m n) x rank`.
pub fn sample_state(dims: BipartiteDims, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    sample_state_with(&mut task_rng(seed, 0), dims, rank)
}

pub fn sample_state_with<R: Rng + ?Sized>(rng: &mut R, dims: BipartiteDims, rank: usize) -> Result<ComplexMatrix> {
    let d = dims.order();
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, order: d });
    }
    let g = gaussian_matrix(rng, d, rank);
    let m = g.gram();
    let tr = m.trace().re;
    Ok(m.scale_real(1.0 / tr))
}

/// Trace-one state `M` with a known product vector `phi` in the kernel of
/// both `M` and `M^Gamma`.
///
/// `M` starts as a sum of `terms` rank-one projectors onto Gaussian vectors
/// that vanish either on all `|0, k>` or on all `|i, 0>`; each such
/// projector annihilates `|0,0>` together with its partial transpose. A
/// random local congruence `G (x) K` then moves the kernel vector to
/// `(G^T)^{-1} e0 (x) (K^dagger)^{-1} e0`. With `real_beta` the factor `G`
/// is real, so `phi` has a real left factor.
pub fn sample_kernel_state<R: Rng + ?Sized>(
    rng: &mut R,
    dims: BipartiteDims,
    terms: usize,
    real_beta: bool,
) -> Result<(ComplexMatrix, ProductVector)> {
    let (m, n) = (dims.m, dims.n);
    if m < 2 || n < 2 {
        return Err(Error::DimensionMismatch(format!("kernel states need both factors >= 2, got {dims}")));
    }
    let d = dims.order();
    let mut state = ComplexMatrix::zeros(d, d);
    for _ in 0..terms.max(1) {
        let mut x = gaussian_vector(rng, d);
        if rng.random::<bool>() {
            (0..n).for_each(|k| x[dims.index(0, k)] = ZERO);
        } else {
            (0..m).for_each(|i| x[dims.index(i, 0)] = ZERO);
        }
        state = &state + &ComplexMatrix::outer(&x);
    }
    let g = if real_beta { real_gaussian_matrix(rng, m, m) } else { gaussian_matrix(rng, m, m) };
    let k = gaussian_matrix(rng, n, n);
    let gt_inv = inverse(&g.transpose()).ok_or(Error::SingularBlock { smallest: 0.0 })?;
    let kd_inv = inverse(&k.adjoint()).ok_or(Error::SingularBlock { smallest: 0.0 })?;
    let state = crate::linalg::congruence(&kron(&g, &k), &state)?;
    let state = state.scale_real(1.0 / state.trace().re);
    let mut e0 = vec![ZERO; m.max(n)];
    e0[0] = ONE;
    let beta = gt_inv.matvec(&e0[..m]);
    let alpha = kd_inv.matvec(&e0[..n]);
    Ok((state, ProductVector::new(beta, alpha)?))
}
