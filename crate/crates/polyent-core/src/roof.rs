//! Maximization of average entanglement over pure-state decompositions
//! (entanglement / concurrence of assistance), plus a brute-force grid
//! oracle for rank <= 2 states used by tests.
//!
//! Every decomposition of `rho` arises from an isometry mixing its
//! eigen-ensemble, so the search walks the isometry manifold with
//! Givens-style two-coordinate rotations (angle + phase), optimized
//! coordinate-wise with golden-section refinement. Restarts draw
//! Haar-random isometries from streams derived from `(seed, restart)`.
//! Reported values are lower bounds on the true assistance.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::CMat;
use crate::policy::Tolerances;
use crate::state::{DensityMatrix, PureState};
use crate::C64;

/// Probabilities plus normalized members reconstructing a target state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    pub probs: Vec<f64>,
    pub members: Vec<PureState>,
}

impl EnsembleDecomposition {
    /// Frobenius distance between `sum p_i |psi_i><psi_i|` and the target.
    pub fn reconstruction_error(&self, target: &DensityMatrix) -> f64 {
        let d = target.total_dim();
        let mut acc = CMat::zeros(d, d);
        for (p, member) in self.probs.iter().zip(&self.members) {
            let amps = member.amps();
            for i in 0..d {
                for j in 0..d {
                    acc[(i, j)] += amps[i] * amps[j].conj() * *p;
                }
            }
        }
        acc.sub(target.mat()).frobenius_norm()
    }
}

/// Objective averaged over decomposition members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Objective {
    /// Von Neumann entropy (bits) of the first-party marginal.
    EntropyOfMarginal,
    /// Pure-state concurrence across the bipartition.
    Concurrence,
}

/// Knobs for [`maximize_assistance`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerSettings {
    /// Ensemble size M; `None` picks `2 * rank`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Maximum number of full rotation sweeps per restart.
    pub max_iters: usize,
    /// A sweep improving the objective by less than this ends the restart.
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            ensemble_size: None,
            restarts: 16,
            max_iters: 200,
            step_tolerance: 1e-7,
            seed: 0,
        }
    }
}

/// Outcome of an assistance maximization: a certified lower bound.
#[derive(Debug, Clone)]
pub struct AssistanceResult {
    pub value: f64,
    pub best: EnsembleDecomposition,
    /// Set when the best restart stopped at the iteration cap instead of
    /// meeting the step tolerance.
    pub hit_iteration_cap: bool,
}

/// Eigen-ensemble of a density matrix: columns `sqrt(mu_j) |e_j>`.
struct EigenEnsemble {
    columns: Vec<Vec<C64>>, // r columns, each of length d
    rank: usize,
}

fn eigen_ensemble(rho: &DensityMatrix, tol: &Tolerances) -> Result<EigenEnsemble> {
    let (w, v) = crate::matrix::herm_eig(rho.mat(), tol)?;
    let d = rho.total_dim();
    let rank = w.iter().filter(|&&x| x > tol.eig_clamp).count().max(1);
    let mut columns = Vec::with_capacity(rank);
    for j in 0..rank {
        let root = math::sqrt(w[j].max(0.0));
        columns.push((0..d).map(|i| v[(i, j)] * root).collect());
    }
    Ok(EigenEnsemble { columns, rank })
}

/// Build the decomposition generated by an `M x r` isometry acting on the
/// eigen-ensemble: members `sqrt(p_i)|psi_i> = sum_j v_ij sqrt(mu_j)|e_j>`.
pub fn decomposition_from_isometry(
    rho: &DensityMatrix,
    v: &CMat,
    tol: &Tolerances,
) -> Result<EnsembleDecomposition> {
    let ens = eigen_ensemble(rho, tol)?;
    if v.cols() != ens.rank {
        return Err(Error::invalid_argument(alloc::format!(
            "isometry has {} columns but rank is {}",
            v.cols(),
            ens.rank
        )));
    }
    if v.rows() < v.cols() {
        return Err(Error::invalid_argument("isometry must be tall (M >= r)"));
    }
    let gram = v.adjoint().mul(v);
    if gram.sub(&CMat::identity(v.cols())).max_abs() > tol.isometry {
        return Err(Error::invalid_argument(
            "isometry columns are not orthonormal",
        ));
    }
    let d = rho.total_dim();
    let mut raw_members: Vec<Vec<C64>> = Vec::with_capacity(v.rows());
    for i in 0..v.rows() {
        let mut m = vec![C64::new(0.0, 0.0); d];
        for (j, col) in ens.columns.iter().enumerate() {
            let coeff = v[(i, j)];
            for (slot, &e) in m.iter_mut().zip(col.iter()) {
                *slot += coeff * e;
            }
        }
        raw_members.push(m);
    }
    let decomposition = finish_decomposition(raw_members, rho)?;
    let err = decomposition.reconstruction_error(rho);
    if err > tol.ensemble_reconstruction {
        return Err(Error::numeric(alloc::format!(
            "decomposition reconstruction residual {err:.3e}"
        )));
    }
    Ok(decomposition)
}

fn finish_decomposition(
    raw_members: Vec<Vec<C64>>,
    rho: &DensityMatrix,
) -> Result<EnsembleDecomposition> {
    let mut probs = Vec::new();
    let mut members = Vec::new();
    for m in raw_members {
        let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if p < 1e-14 {
            continue;
        }
        let amps = m.iter().map(|z| z / math::sqrt(p)).collect();
        probs.push(p);
        members.push(PureState::normalized(amps, rho.dims().to_vec())?);
    }
    Ok(EnsembleDecomposition { probs, members })
}

/// Objective of one unnormalized member; returns `p * f(psi/sqrt(p))`.
fn member_value(m: &[C64], d_a: usize, d_b: usize, objective: Objective) -> f64 {
    let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if p < 1e-14 {
        return 0.0;
    }
    // Gram matrix of the d_a x d_b amplitude matrix, normalized by p.
    let mut gram = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..d_a {
        for j in 0..d_a {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d_b {
                acc += m[i * d_b + k] * m[j * d_b + k].conj();
            }
            gram[i][j] = acc / p;
        }
    }
    match objective {
        Objective::Concurrence => {
            let mut purity = 0.0;
            for row in gram.iter().take(d_a) {
                for z in row.iter().take(d_a) {
                    purity += z.norm_sqr();
                }
            }
            p * math::sqrt((2.0 * (1.0 - purity)).max(0.0))
        }
        Objective::EntropyOfMarginal => {
            let w = small_herm_eigvals(&gram, d_a);
            let mut s = 0.0;
            for &lam in &w {
                if lam > 1e-12 {
                    s -= lam * math::log2(lam);
                }
            }
            p * s
        }
    }
}

/// Eigenvalues of a small (n <= 4) Hermitian matrix held in a fixed array.
fn small_herm_eigvals(g: &[[C64; 4]; 4], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![g[0][0].re];
    }
    if n == 2 {
        let tr = g[0][0].re + g[1][1].re;
        let det = g[0][0].re * g[1][1].re - g[0][1].norm_sqr();
        let disc = math::sqrt((tr * tr / 4.0 - det).max(0.0));
        return vec![tr / 2.0 + disc, tr / 2.0 - disc];
    }
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = g[i][j];
        }
    }
    crate::matrix::herm_eigvals(&m, &Tolerances::default()).unwrap_or_else(|_| vec![0.0; n])
}

struct SearchState {
    members: Vec<Vec<C64>>, // M unnormalized member vectors
    values: Vec<f64>,       // cached member_value per member
    total: f64,
    d_a: usize,
    d_b: usize,
    objective: Objective,
}

impl SearchState {
    fn new(members: Vec<Vec<C64>>, d_a: usize, d_b: usize, objective: Objective) -> Self {
        let values: Vec<f64> = members
            .iter()
            .map(|m| member_value(m, d_a, d_b, objective))
            .collect();
        let total = values.iter().sum();
        SearchState {
            members,
            values,
            total,
            d_a,
            d_b,
            objective,
        }
    }

    /// Objective after rotating rows (a, b) by (theta, phi), without applying.
    fn probe(&self, a: usize, b: usize, theta: f64, phi: f64) -> f64 {
        let (c, s) = (math::cos(theta), math::sin(theta));
        let u = C64::new(math::cos(phi), math::sin(phi));
        let d = self.members[a].len();
        let mut ma = vec![C64::new(0.0, 0.0); d];
        let mut mb = vec![C64::new(0.0, 0.0); d];
        for i in 0..d {
            let x = self.members[a][i];
            let y = self.members[b][i];
            ma[i] = x * c + y * (u * s);
            mb[i] = -x * (u.conj() * s) + y * c;
        }
        self.total - self.values[a] - self.values[b]
            + member_value(&ma, self.d_a, self.d_b, self.objective)
            + member_value(&mb, self.d_a, self.d_b, self.objective)
    }

    fn apply(&mut self, a: usize, b: usize, theta: f64, phi: f64) {
        let (c, s) = (math::cos(theta), math::sin(theta));
        let u = C64::new(math::cos(phi), math::sin(phi));
        let d = self.members[a].len();
        for i in 0..d {
            let x = self.members[a][i];
            let y = self.members[b][i];
            self.members[a][i] = x * c + y * (u * s);
            self.members[b][i] = -x * (u.conj() * s) + y * c;
        }
        self.values[a] = member_value(&self.members[a], self.d_a, self.d_b, self.objective);
        self.values[b] = member_value(&self.members[b], self.d_a, self.d_b, self.objective);
        self.total = self.values.iter().sum();
    }
}

const GOLDEN_RATIO: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - GOLDEN_RATIO * (hi - lo);
    let mut x2 = lo + GOLDEN_RATIO * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN_RATIO * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN_RATIO * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

const COARSE_THETAS: [f64; 7] = [
    -1.178097245096172,  // -3pi/8
    -0.7853981633974483, // -pi/4
    -0.39269908169872414,
    0.0,
    0.39269908169872414, // pi/8
    0.7853981633974483,
    1.178097245096172,
];
const COARSE_PHIS: [f64; 4] = [0.0, 1.5707963267948966, 3.141592653589793, 4.71238898038469];

fn optimize_pair(state: &mut SearchState, a: usize, b: usize) -> f64 {
    let before = state.total;
    // coarse scan
    let mut best = (0.0f64, 0.0f64, before);
    for &th in &COARSE_THETAS {
        if th == 0.0 {
            continue;
        }
        for &ph in &COARSE_PHIS {
            let v = state.probe(a, b, th, ph);
            if v > best.2 {
                best = (th, ph, v);
            }
        }
    }
    let (mut th, mut ph, _) = best;
    // refine angle then phase
    let (th_ref, _) = golden_max(|t| state.probe(a, b, t, ph), th - 0.45, th + 0.45, 28);
    th = th_ref;
    let (ph_ref, _) = golden_max(|p| state.probe(a, b, th, p), ph - 1.65, ph + 1.65, 28);
    ph = ph_ref;
    let (th2, final_val) = golden_max(|t| state.probe(a, b, t, ph), th - 0.1, th + 0.1, 20);
    if final_val > before {
        state.apply(a, b, th2, ph);
    }
    state.total - before
}

/// Maximize the average `objective` over pure-state decompositions of a
/// bipartite `rho`. Deterministic for fixed settings; the returned value is
/// a lower bound on the true assistance and never falls below the
/// eigen-ensemble average.
pub fn maximize_assistance(
    rho: &DensityMatrix,
    objective: Objective,
    settings: &OptimizerSettings,
    tol: &Tolerances,
) -> Result<AssistanceResult> {
    if rho.dims().len() != 2 {
        return Err(Error::invalid_argument(
            "maximize_assistance: state must be bipartite",
        ));
    }
    if settings.restarts < 1 {
        return Err(Error::invalid_argument("restarts must be >= 1"));
    }
    let d_a = rho.dims()[0];
    let d_b = rho.dims()[1];
    if d_a > 4 {
        return Err(Error::invalid_argument(
            "maximize_assistance: focus dimension > 4 unsupported",
        ));
    }
    let ens = eigen_ensemble(rho, tol)?;
    let r = ens.rank;
    let m_size = settings.ensemble_size.unwrap_or(2 * r).max(r);
    if settings.ensemble_size.is_some_and(|m| m < r) {
        return Err(Error::invalid_argument(alloc::format!(
            "ensemble size {} below rank {r}",
            settings.ensemble_size.unwrap()
        )));
    }
    let d = rho.total_dim();

    // Rank one leaves nothing to mix: assistance equals the objective of the
    // single member.
    if r == 1 {
        let value = member_value(&ens.columns[0], d_a, d_b, objective);
        let best = finish_decomposition(ens.columns, rho)?;
        return Ok(AssistanceResult {
            value,
            best,
            hit_iteration_cap: false,
        });
    }

    let identity_members = |ens: &EigenEnsemble| -> Vec<Vec<C64>> {
        let mut ms: Vec<Vec<C64>> = ens.columns.clone();
        ms.resize(m_size, vec![C64::new(0.0, 0.0); d]);
        ms
    };

    // The eigen-ensemble itself is always a visited decomposition, so the
    // result dominates the convexity baseline by construction.
    let mut best_state = SearchState::new(identity_members(&ens), d_a, d_b, objective);
    let mut best_value = best_state.total;
    let mut best_hit_cap = false;

    for restart in 0..settings.restarts {
        let mut rng = restart_rng(settings.seed, restart as u64);
        let v = random_isometry(m_size, r, &mut rng);
        let mut members: Vec<Vec<C64>> = Vec::with_capacity(m_size);
        for i in 0..m_size {
            let mut mvec = vec![C64::new(0.0, 0.0); d];
            for (j, col) in ens.columns.iter().enumerate() {
                let coeff = v[(i, j)];
                for (slot, &e) in mvec.iter_mut().zip(col.iter()) {
                    *slot += coeff * e;
                }
            }
            members.push(mvec);
        }
        let mut state = SearchState::new(members, d_a, d_b, objective);
        let mut hit_cap = true;
        for _sweep in 0..settings.max_iters {
            let mut gain = 0.0;
            for a in 0..m_size {
                for b in (a + 1)..m_size {
                    gain += optimize_pair(&mut state, a, b);
                }
            }
            if gain < settings.step_tolerance {
                hit_cap = false;
                break;
            }
        }
        if state.total > best_value {
            best_value = state.total;
            best_state = state;
            best_hit_cap = hit_cap;
        }
    }

    let decomposition = finish_decomposition(best_state.members, rho)?;
    let err = decomposition.reconstruction_error(rho);
    if err > tol.ensemble_reconstruction {
        return Err(Error::numeric(alloc::format!(
            "optimizer decomposition reconstruction residual {err:.3e}"
        )));
    }
    Ok(AssistanceResult {
        value: best_value,
        best: decomposition,
        hit_iteration_cap: best_hit_cap,
    })
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(crate::state::derive_seed(seed, restart))
}

fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> CMat {
    let mut g = CMat::zeros(rows, cols);
    let unit = |r: &mut ChaCha12Rng| (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    for i in 0..rows {
        for j in 0..cols {
            let mut u1 = unit(rng);
            if u1 == 0.0 {
                u1 = 1.0 / (1u64 << 53) as f64;
            }
            let u2 = unit(rng);
            let rad = math::sqrt(-2.0 * math::ln(u1));
            let ang = 2.0 * math::PI * u2;
            g[(i, j)] = C64::new(rad * math::cos(ang), rad * math::sin(ang));
        }
    }
    // modified Gram-Schmidt, twice for orthogonality at machine precision
    for _ in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let mut proj = C64::new(0.0, 0.0);
                for i in 0..rows {
                    proj += g[(i, k)].conj() * g[(i, j)];
                }
                for i in 0..rows {
                    let gk = g[(i, k)];
                    g[(i, j)] -= proj * gk;
                }
            }
            let norm = math::sqrt((0..rows).map(|i| g[(i, j)].norm_sqr()).sum());
            for i in 0..rows {
                g[(i, j)] /= norm;
            }
        }
    }
    g
}

/// Exhaustive grid search over decomposition isometries for rank <= 2 states.
///
/// Ensemble sizes 2, 3 and 4 are scanned with chains of two-coordinate
/// rotations; the 2-member chart gets the full `resolution`, larger charts a
/// proportionally coarser one. Test-only verification oracle.
pub fn grid_oracle(
    rho: &DensityMatrix,
    objective: Objective,
    resolution: usize,
    tol: &Tolerances,
) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::invalid_argument("grid_oracle: state must be bipartite"));
    }
    if resolution < 4 {
        return Err(Error::invalid_argument("grid_oracle: resolution too small"));
    }
    let ens = eigen_ensemble(rho, tol)?;
    let d_a = rho.dims()[0];
    let d_b = rho.dims()[1];
    if d_a > 4 {
        return Err(Error::invalid_argument(
            "grid_oracle: focus dimension > 4 unsupported",
        ));
    }
    if ens.rank > 2 {
        return Err(Error::invalid_argument(alloc::format!(
            "grid_oracle: rank {} exceeds 2",
            ens.rank
        )));
    }
    if ens.rank == 1 {
        return Ok(member_value(&ens.columns[0], d_a, d_b, objective));
    }

    let e0 = &ens.columns[0];
    let e1 = &ens.columns[1];
    let d = e0.len();
    let mut best = f64::NEG_INFINITY;

    // M = 2: full-resolution chart over (theta, phi)
    let thetas = resolution + 1;
    for ti in 0..thetas {
        let th = math::FRAC_PI_2 * ti as f64 / resolution as f64;
        let (c, s) = (math::cos(th), math::sin(th));
        for pi_ in 0..resolution {
            let ph = 2.0 * math::PI * pi_ as f64 / resolution as f64;
            let u = C64::new(math::cos(ph), math::sin(ph));
            let mut m0 = vec![C64::new(0.0, 0.0); d];
            let mut m1 = vec![C64::new(0.0, 0.0); d];
            for i in 0..d {
                m0[i] = e0[i] * c + e1[i] * (u * s);
                m1[i] = -e0[i] * (u.conj() * s) + e1[i] * c;
            }
            let v = member_value(&m0, d_a, d_b, objective)
                + member_value(&m1, d_a, d_b, objective);
            if v > best {
                best = v;
            }
        }
    }

    // M = 3 and M = 4: rotation chains (0,1), (1,2), ... on zero-padded
    // ensembles, coarser per-axis grids.
    for m_size in 3..=4usize {
        let res = (resolution / (3 * (m_size - 2) + 3)).max(5);
        let mut members: Vec<Vec<C64>> = vec![e0.clone(), e1.clone()];
        members.resize(m_size, vec![C64::new(0.0, 0.0); d]);
        let chain: Vec<(usize, usize)> = (0..m_size - 1).map(|i| (i, i + 1)).collect();
        best = best.max(scan_chain(
            &members, &chain, 0, res, d_a, d_b, objective,
        ));
    }
    Ok(best)
}

fn scan_chain(
    members: &[Vec<C64>],
    chain: &[(usize, usize)],
    depth: usize,
    res: usize,
    d_a: usize,
    d_b: usize,
    objective: Objective,
) -> f64 {
    if depth == chain.len() {
        return members
            .iter()
            .map(|m| member_value(m, d_a, d_b, objective))
            .sum();
    }
    let (a, b) = chain[depth];
    let d = members[0].len();
    let mut best = f64::NEG_INFINITY;
    for ti in 0..=res {
        let th = math::FRAC_PI_2 * ti as f64 / res as f64;
        let (c, s) = (math::cos(th), math::sin(th));
        for pi_ in 0..res {
            let ph = 2.0 * math::PI * pi_ as f64 / res as f64;
            let u = C64::new(math::cos(ph), math::sin(ph));
            let mut next = members.to_vec();
            for i in 0..d {
                let x = members[a][i];
                let y = members[b][i];
                next[a][i] = x * c + y * (u * s);
                next[b][i] = -x * (u.conj() * s) + y * c;
            }
            let v = scan_chain(&next, chain, depth + 1, res, d_a, d_b, objective);
            if v > best {
                best = v;
            }
        }
    }
    best
}
