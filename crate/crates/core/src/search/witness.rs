use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::task_rng;
use super::thread_pool;
use crate::error::{Error, Result};
use crate::linalg::random::gaussian_real_vector;
use crate::linalg::{eig_hermitian, eigvalsh, eigvalsh_tridiagonal, solve_real, ComplexMatrix, C64};
use crate::ptrans::{inertia, partial_transpose, BipartiteDims, Inertia, DEFAULT_ZERO_TOL};

pub const DEFAULT_MARGIN: f64 = 1e-4;
pub const DEFAULT_SEPARATION_RATIO: f64 = 1e4;
pub const DEFAULT_MAX_ITERS: usize = 120;
/// The optimiser aims at `max(AIM_FACTOR * margin, AIM_FLOOR)` for nonzero classes.
const AIM_FACTOR: f64 = 2.0;
const AIM_FLOOR: f64 = 1e-2;
const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-7;
const POLISH_ITERS: usize = 40;
/// A restart stops once the objective gains less than `STALL_GAIN`
/// (relative) over `STALL_WINDOW` sweeps.
const STALL_WINDOW: usize = 20;
const STALL_GAIN: f64 = 1e-3;
/// Witness PSD floor, relative to the Frobenius norm.
pub const PSD_CERT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dims: BipartiteDims,
    pub target: Inertia,
    pub restarts: usize,
    /// Compass sweeps per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub zero_tol: f64,
    pub margin: f64,
    pub separation_ratio: f64,
}

impl SearchConfig {
    /// Defaults: 50 restarts up to order 9, 200 beyond.
    pub fn new(dims: BipartiteDims, target: Inertia) -> Self {
        Self {
            dims,
            target,
            restarts: if dims.order() <= 9 { 50 } else { 200 },
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            zero_tol: DEFAULT_ZERO_TOL,
            margin: DEFAULT_MARGIN,
            separation_ratio: DEFAULT_SEPARATION_RATIO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims.order();
        if self.target.order() != d {
            return Err(Error::InvalidTarget {
                target: self.target.to_string(),
                reason: format!("components sum to {} but the order is {d}", self.target.order()),
            });
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidConfig("restarts and max_iters must be positive".into()));
        }
        if !(self.zero_tol > 0.0 && self.zero_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("zero_tol {} outside (0, 1)", self.zero_tol)));
        }
        if !(self.separation_ratio >= 10.0) {
            return Err(Error::InvalidConfig(format!("separation_ratio {} below 10", self.separation_ratio)));
        }
        if !(self.margin > self.zero_tol * self.separation_ratio && self.margin < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "margin {} must exceed zero_tol * separation_ratio = {} and stay below 1",
                self.margin,
                self.zero_tol * self.separation_ratio
            )));
        }
        Ok(())
    }

    /// Residual below which a run counts as reaching the target:
    /// every slot within `zero_tol` of its class.
    pub fn certification_threshold(&self) -> f64 {
        self.dims.order() as f64 * self.zero_tol * self.zero_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    NotFound,
}

/// Spectral evidence for a found witness; all values are relative to the
/// Frobenius norm of the matrix they come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub state_min_eigenvalue: f64,
    pub max_zero_eigenvalue: f64,
    pub min_nonzero_eigenvalue: f64,
    /// `min_nonzero_eigenvalue / zero_tol`.
    pub separation: f64,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub status: SearchStatus,
    /// Trace-one state whose partial transpose has the target inertia.
    pub witness: Option<ComplexMatrix>,
    pub achieved: Inertia,
    pub residual: f64,
    pub restarts_used: usize,
    pub certification: Option<Certification>,
}

impl WitnessResult {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

/// Hinge objective on eigenvalues `mu` (ascending, already relative):
/// `a` slots pushed below `-margin`, `b` slots to zero, the rest above `margin`.
pub fn hinge_objective(mu: &[f64], target: Inertia, margin: f64) -> f64 {
    let (a, b) = (target.neg, target.zero);
    mu.iter()
        .enumerate()
        .map(|(i, &x)| {
            if i < a {
                (x + margin).max(0.0).powi(2)
            } else if i < a + b {
                x * x
            } else {
                (margin - x).max(0.0).powi(2)
            }
        })
        .sum()
}

/// Re-checks a candidate from scratch.
pub fn certify(state: &ComplexMatrix, config: &SearchConfig) -> Result<std::result::Result<Certification, Inertia>> {
    let pt = partial_transpose(state, config.dims)?;
    let achieved = inertia(&pt, config.zero_tol)?;
    let scale_state = state.frobenius_norm();
    let state_min = eigvalsh(state)?[0] / scale_state;
    let scale = pt.frobenius_norm();
    let spectrum: Vec<f64> = eigvalsh(&pt)?.iter().map(|x| x / scale).collect();
    let t = config.target;
    let zeros = &spectrum[t.neg..t.neg + t.zero];
    let nonzero = spectrum[..t.neg].iter().chain(&spectrum[t.neg + t.zero..]);
    let max_zero = zeros.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let min_nonzero = nonzero.map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let signs_ok = spectrum[..t.neg].iter().all(|&x| x < 0.0) && spectrum[t.neg + t.zero..].iter().all(|&x| x > 0.0);
    let ok = achieved == t
        && state_min >= -PSD_CERT_FLOOR
        && signs_ok
        && max_zero <= config.zero_tol
        && min_nonzero >= config.margin
        && min_nonzero >= config.separation_ratio * config.zero_tol;
    if !ok {
        return Ok(Err(achieved));
    }
    Ok(Ok(Certification {
        state_min_eigenvalue: state_min,
        max_zero_eigenvalue: max_zero,
        min_nonzero_eigenvalue: min_nonzero,
        separation: min_nonzero / config.zero_tol,
        spectrum,
    }))
}

/// Factor rank used by restart `index`: `d, 1, d-1, 2, d-2, ...`.
pub fn restart_rank(d: usize, index: usize) -> usize {
    let cycle = index % d;
    if cycle % 2 == 0 {
        d - cycle / 2
    } else {
        cycle / 2 + 1
    }
}

/// `M = L L^dagger` for the `d x r` factor packed as `(re, im)` pairs.
struct Problem<'a> {
    config: &'a SearchConfig,
    d: usize,
    r: usize,
}

impl Problem<'_> {
    fn factor(&self, theta: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d, self.r, |p, q| {
            let k = 2 * (p * self.r + q);
            C64::new(theta[k], theta[k + 1])
        })
    }

    fn state(&self, theta: &[f64]) -> ComplexMatrix {
        self.factor(theta).gram()
    }

    /// Ascending eigenvalues of `M^Gamma / |M|_F`.
    fn spectrum(&self, theta: &[f64]) -> Vec<f64> {
        let m = self.state(theta);
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
        let pt = partial_transpose(&m, self.config.dims).expect("dims checked");
        let mut mu = eigvalsh_tridiagonal(&pt).expect("finite input converges");
        mu.iter_mut().for_each(|x| *x /= scale);
        mu
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        hinge_objective(&self.spectrum(theta), self.config.target, (AIM_FACTOR * self.config.margin).max(AIM_FLOOR))
    }

    /// Nonzero classes already past the margin and the zero cluster an order
    /// of magnitude closer to zero than any of them.
    fn ready(&self, mu: &[f64]) -> bool {
        let t = self.config.target;
        let margin = self.config.margin;
        let nonzero_ok = mu[..t.neg].iter().all(|&x| x <= -margin) && mu[t.neg + t.zero..].iter().all(|&x| x >= margin);
        let gap = mu[..t.neg].iter().chain(&mu[t.neg + t.zero..]).map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        nonzero_ok && self.zero_defect(mu) <= 0.1 * gap
    }

    /// Largest relative eigenvalue in the zero cluster.
    fn zero_defect(&self, mu: &[f64]) -> f64 {
        let t = self.config.target;
        mu[t.neg..t.neg + t.zero].iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Levenberg-Marquardt on the compression `V0^dagger M^Gamma V0` of the
    /// zero cluster, using `tr(X^Gamma Y) = tr(X Y^Gamma)` for the Jacobian.
    fn polish(&self, theta: &mut Vec<f64>) -> bool {
        let t = self.config.target;
        let b = t.zero;
        let (d, r) = (self.d, self.r);
        let n_par = theta.len();
        let goal = 1e-3 * self.config.zero_tol;
        let mut lambda = 1e-10;
        for _ in 0..POLISH_ITERS {
            let m = self.state(theta);
            let scale = m.frobenius_norm();
            let pt = partial_transpose(&m, self.config.dims).expect("dims checked");
            let Ok(e) = eig_hermitian(&pt) else { return false };
            let mu: Vec<f64> = e.eigenvalues.iter().map(|x| x / scale).collect();
            if !self.ready(&mu) {
                return false;
            }
            let current = self.zero_defect(&mu);
            if current <= goal {
                return true;
            }
            let l = self.factor(theta);
            let ladj = l.adjoint();
            let vs: Vec<Vec<C64>> = (t.neg..t.neg + b).map(|i| e.eigenvector(i)).collect();
            let mut residual = Vec::with_capacity(b * b);
            let mut jac: Vec<Vec<f64>> = Vec::with_capacity(b * b);
            for s in 0..b {
                for u in s..b {
                    let q = ComplexMatrix::from_fn(d, d, |i, j| vs[u][i] * vs[s][j].conj());
                    let q = partial_transpose(&q, self.config.dims).expect("dims checked");
                    let lq = ladj.matmul(&q);
                    let ql = q.matmul(&l);
                    let value: C64 = (0..d).map(|i| (0..d).map(|j| m[(i, j)] * q[(j, i)]).sum::<C64>()).sum();
                    let mut row_re = vec![0.0; n_par];
                    let mut row_im = vec![0.0; n_par];
                    for p in 0..d {
                        for c in 0..r {
                            let k = 2 * (p * r + c);
                            let x = lq[(c, p)];
                            let y = ql[(p, c)];
                            let dre = x + y;
                            let dim = (x - y) * C64::new(0.0, 1.0);
                            row_re[k] = dre.re;
                            row_re[k + 1] = dim.re;
                            row_im[k] = dre.im;
                            row_im[k + 1] = dim.im;
                        }
                    }
                    residual.push(value.re / scale);
                    jac.push(row_re.iter().map(|x| x / scale).collect());
                    if u != s {
                        residual.push(value.im / scale);
                        jac.push(row_im.iter().map(|x| x / scale).collect());
                    }
                }
            }
            let k = residual.len();
            let mut gram = vec![0.0; k * k];
            for i in 0..k {
                for j in i..k {
                    let v: f64 = jac[i].iter().zip(&jac[j]).map(|(x, y)| x * y).sum();
                    gram[i * k + j] = v;
                    gram[j * k + i] = v;
                }
            }
            let diag_max = (0..k).map(|i| gram[i * k + i]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let mut accepted = false;
            for _ in 0..8 {
                let mut g = gram.clone();
                for i in 0..k {
                    g[i * k + i] += lambda * diag_max;
                }
                let Some(w) = solve_real(g, residual.clone()) else {
                    lambda *= 100.0;
                    continue;
                };
                let mut trial = theta.clone();
                for (p, x) in trial.iter_mut().enumerate() {
                    *x -= (0..k).map(|i| jac[i][p] * w[i]).sum::<f64>();
                }
                let mu_trial = self.spectrum(&trial);
                if self.ready(&mu_trial) && self.zero_defect(&mu_trial) < current {
                    *theta = trial;
                    lambda = (lambda * 0.1).max(1e-14);
                    accepted = true;
                    break;
                }
                lambda *= 100.0;
            }
            if !accepted {
                return false;
            }
        }
        let mu = self.spectrum(theta);
        self.ready(&mu) && self.zero_defect(&mu) <= goal
    }

    fn normalized_state(&self, theta: &[f64]) -> ComplexMatrix {
        let m = self.state(theta);
        let tr = m.trace().re;
        m.scale_real(1.0 / tr)
    }
}

struct RestartOutcome {
    index: usize,
    residual: f64,
    state: ComplexMatrix,
    certification: std::result::Result<Certification, Inertia>,
}

fn run_restart(config: &SearchConfig, index: usize) -> Result<RestartOutcome> {
    let d = config.dims.order();
    let r = restart_rank(d, index);
    let problem = Problem { config, d, r };
    let mut rng = task_rng(config.seed, index as u64);
    let mut theta = gaussian_real_vector(&mut rng, 2 * d * r);
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.shuffle(&mut rng);
    let mut step = INITIAL_STEP * (1.0 + 0.5 * rng.random::<f64>());

    let try_finish = |theta: &mut Vec<f64>| -> Result<Option<(ComplexMatrix, Certification)>> {
        let mu = problem.spectrum(theta);
        if !problem.ready(&mu) {
            return Ok(None);
        }
        let mut polished = theta.clone();
        if config.target.zero > 0 && !problem.polish(&mut polished) {
            return Ok(None);
        }
        let state = problem.normalized_state(&polished);
        match certify(&state, config)? {
            Ok(cert) => {
                *theta = polished;
                Ok(Some((state, cert)))
            }
            Err(_) => Ok(None),
        }
    };

    let mut f = problem.objective(&theta);
    let mut history = Vec::with_capacity(config.max_iters);
    for sweep in 0..config.max_iters {
        history.push(f);
        if sweep >= STALL_WINDOW && f > (1.0 - STALL_GAIN) * history[sweep - STALL_WINDOW] {
            break;
        }
        let mut improved = false;
        for &c in &order {
            for sign in [1.0, -1.0] {
                let old = theta[c];
                theta[c] = old + sign * step;
                let g = problem.objective(&theta);
                if g < f {
                    f = g;
                    improved = true;
                    break;
                }
                theta[c] = old;
            }
        }
        if let Some((state, cert)) = try_finish(&mut theta)? {
            let residual = hinge_objective(&cert.spectrum, config.target, config.margin);
            return Ok(RestartOutcome { index, residual, state, certification: Ok(cert) });
        }
        if !improved {
            step *= 0.5;
            if step < MIN_STEP {
                break;
            }
        }
    }
    let state = problem.normalized_state(&theta);
    let mu = problem.spectrum(&theta);
    let residual = hinge_objective(&mu, config.target, config.margin);
    let certification = certify(&state, config)?;
    Ok(RestartOutcome { index, residual, state, certification })
}

/// Randomised search for a state whose partial transpose has the target
/// inertia.
///
/// Restart `i` optimises a `d x r_i` factor `L` of `M = L L^dagger` (rank
/// schedule [`restart_rank`]) by compass search on the hinge objective with
/// the margin doubled, then polishes the zero cluster and certifies the
/// trace-one state from scratch. The lowest certified restart index wins, so
/// the result does not depend on the number of worker threads.
pub fn target_inertia_search(config: &SearchConfig) -> Result<WitnessResult> {
    config.validate()?;
    let pool = thread_pool();
    let batch = pool.current_num_threads().max(1);
    let mut best: Option<RestartOutcome> = None;
    let mut start = 0;
    while start < config.restarts {
        let end = (start + batch).min(config.restarts);
        let outcomes: Vec<Result<RestartOutcome>> =
            pool.install(|| (start..end).into_par_iter().map(|i| run_restart(config, i)).collect());
        for outcome in outcomes {
            let outcome = outcome?;
            if let Ok(cert) = outcome.certification {
                let achieved = config.target;
                return Ok(WitnessResult {
                    status: SearchStatus::Found,
                    witness: Some(outcome.state),
                    achieved,
                    residual: outcome.residual,
                    restarts_used: outcome.index + 1,
                    certification: Some(cert),
                });
            }
            if best.as_ref().is_none_or(|b| outcome.residual < b.residual) {
                best = Some(outcome);
            }
        }
        start = end;
    }
    let best = best.expect("at least one restart");
    let achieved = match best.certification {
        Err(i) => i,
        Ok(_) => unreachable!("certified restarts return early"),
    };
    Ok(WitnessResult {
        status: SearchStatus::NotFound,
        witness: None,
        achieved,
        residual: best.residual,
        restarts_used: config.restarts,
        certification: None,
    })
}
