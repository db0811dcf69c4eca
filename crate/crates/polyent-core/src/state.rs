//! Pure states, density matrices and subsystem partitions.
//!
//! Subsystem ordering is big-endian throughout: subsystem 0 is the most
//! significant tensor factor, so for dims `[d0, d1, ...]` the flat index of
//! basis state `|i0 i1 ...>` is `((i0*d1 + i1)*d2 + i2)...`. Every module in
//! the crate shares this convention.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::CMat;
use crate::policy::Tolerances;
use crate::C64;

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::invalid_argument("dims must be nonempty and positive"));
    }
    Ok(())
}

/// Strides for big-endian flat indexing of `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Normalized pure state over a list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Construct, enforcing `product(dims) == len(amps)` and unit norm.
    pub fn new(amps: Vec<C64>, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        check_dims(&dims)?;
        let d: usize = dims.iter().product();
        if d != amps.len() {
            return Err(Error::invalid_argument(alloc::format!(
                "amplitude length {} does not match dims product {}",
                amps.len(),
                d
            )));
        }
        let n = math::sqrt(amps.iter().map(|z| z.norm_sqr()).sum());
        if math::abs(n - 1.0) > tol.norm {
            return Err(Error::invalid_argument(alloc::format!(
                "state norm {n} not within {:.1e} of 1",
                tol.norm
            )));
        }
        Ok(PureState { amps, dims })
    }

    /// Construct after rescaling to unit norm; rejects (near-)zero vectors.
    pub fn normalized(mut amps: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let d: usize = dims.iter().product();
        if d != amps.len() {
            return Err(Error::invalid_argument(alloc::format!(
                "amplitude length {} does not match dims product {}",
                amps.len(),
                d
            )));
        }
        let n = math::sqrt(amps.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if n < 1e-12 {
            return Err(Error::invalid_argument("cannot normalize a zero vector"));
        }
        for z in &mut amps {
            *z /= n;
        }
        Ok(PureState { amps, dims })
    }

    /// Basis state `|0...0>` over `dims`.
    pub fn ground(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let d: usize = dims.iter().product();
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[0] = C64::new(1.0, 0.0);
        Ok(PureState { amps, dims })
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amps.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Density matrix of `|psi><psi|`.
    pub fn density(&self) -> DensityMatrix {
        let d = self.amps.len();
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix {
            mat: m,
            dims: self.dims.clone(),
            unnormalized: false,
        }
    }

    /// Tensor product `self (x) other`, dims concatenated.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = crate::matrix::kron_vec(&self.amps, &other.amps);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { amps, dims }
    }

    /// Reorder subsystems; `order[k]` is the original index placed at slot `k`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<PureState> {
        validate_permutation(order, self.dims.len())?;
        let old_strides = strides(&self.dims);
        let new_dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let new_strides = strides(&new_dims);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (flat, &amp) in self.amps.iter().enumerate() {
            let mut new_flat = 0;
            for (k, &orig) in order.iter().enumerate() {
                let idx = (flat / old_strides[orig]) % self.dims[orig];
                new_flat += idx * new_strides[k];
            }
            out[new_flat] = amp;
        }
        Ok(PureState {
            amps: out,
            dims: new_dims,
        })
    }

    /// Amplitude matrix of the bipartition `focus | rest`, rest subsystems in
    /// ascending original order.
    pub fn bipartition_matrix(&self, focus: usize) -> Result<CMat> {
        if focus >= self.dims.len() {
            return Err(Error::invalid_argument("focus index out of range"));
        }
        let mut order = vec![focus];
        order.extend((0..self.dims.len()).filter(|&i| i != focus));
        let permuted = self.permute_subsystems(&order)?;
        let da = self.dims[focus];
        let db = permuted.total_dim() / da;
        CMat::from_rows(da, db, permuted.amps)
    }

    /// Reduced density matrix on `keep` (ascending original order).
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.density().partial_trace(keep)
    }
}

fn validate_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::invalid_argument("permutation length mismatch"));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::invalid_argument("invalid subsystem permutation"));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Hermitian PSD operator over subsystem dimensions; unit trace unless
/// explicitly flagged as an unnormalized (projected) block.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
    dims: Vec<usize>,
    unnormalized: bool,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, PSD within the floor, unit trace.
    pub fn new(mat: CMat, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        let dm = Self::new_unnormalized(mat, dims, tol)?;
        let tr = dm.mat.trace().re;
        if math::abs(tr - 1.0) > tol.trace {
            return Err(Error::invalid_argument(alloc::format!(
                "trace {tr} not within {:.1e} of 1",
                tol.trace
            )));
        }
        Ok(DensityMatrix {
            unnormalized: false,
            ..dm
        })
    }

    /// Validated constructor for projected blocks: trace may fall below 1.
    pub fn new_unnormalized(mat: CMat, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        check_dims(&dims)?;
        let d: usize = dims.iter().product();
        if !mat.is_square() || mat.rows() != d {
            return Err(Error::invalid_argument(
                "matrix shape does not match dims product",
            ));
        }
        if mat.hermiticity_defect() > tol.hermiticity {
            return Err(Error::invalid_argument(alloc::format!(
                "matrix not Hermitian (defect {:.3e})",
                mat.hermiticity_defect()
            )));
        }
        let w = crate::matrix::herm_eigvals(&mat, tol)?;
        if let Some(&min) = w.last() {
            if min < -tol.psd_floor {
                return Err(Error::invalid_argument(alloc::format!(
                    "matrix not PSD (eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(DensityMatrix {
            mat,
            dims,
            unnormalized: true,
        })
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_unnormalized(&self) -> bool {
        self.unnormalized
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Purity `Tr(rho^2)`; equals the squared Frobenius norm for Hermitian
    /// operators.
    pub fn purity(&self) -> f64 {
        self.mat.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        crate::matrix::herm_eigvals(&self.mat, tol)
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            mat: crate::matrix::kron(&self.mat, &other.mat),
            dims,
            unnormalized: self.unnormalized || other.unnormalized,
        }
    }

    /// Partial trace keeping `keep` (any distinct valid indices); kept
    /// subsystems stay in their original ascending order and the trace is
    /// preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.dims.len();
        if keep.is_empty() {
            return Err(Error::invalid_argument("partial_trace: keep set empty"));
        }
        let mut sorted: Vec<usize> = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() || *sorted.last().unwrap() >= n {
            return Err(Error::invalid_argument(
                "partial_trace: keep indices must be distinct and in range",
            ));
        }
        let traced: Vec<usize> = (0..n).filter(|i| !sorted.contains(i)).collect();
        let st = strides(&self.dims);
        let keep_dims: Vec<usize> = sorted.iter().map(|&i| self.dims[i]).collect();
        let dk: usize = keep_dims.iter().product();
        let dt: usize = traced.iter().map(|&i| self.dims[i]).product();
        let keep_strides = strides(&keep_dims);

        // flat offsets of every kept / traced multi-index in the full space
        let flat_offsets = |subs: &[usize], count: usize| -> Vec<usize> {
            let local_dims: Vec<usize> = subs.iter().map(|&i| self.dims[i]).collect();
            let local_strides = strides(&local_dims);
            (0..count)
                .map(|idx| {
                    subs.iter()
                        .enumerate()
                        .map(|(k, &orig)| ((idx / local_strides[k]) % local_dims[k]) * st[orig])
                        .sum()
                })
                .collect()
        };
        let keep_offsets = flat_offsets(&sorted, dk);
        let traced_offsets = if traced.is_empty() {
            vec![0usize]
        } else {
            flat_offsets(&traced, dt)
        };

        let mut out = CMat::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for &e in &traced_offsets {
                    acc += self.mat[(keep_offsets[a] + e, keep_offsets[b] + e)];
                }
                let _ = keep_strides; // strides of the output are implicit in the loop order
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix {
            mat: out,
            dims: keep_dims,
            unnormalized: self.unnormalized,
        })
    }

    /// Reorder subsystems; `order[k]` is the original index placed at slot `k`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<DensityMatrix> {
        validate_permutation(order, self.dims.len())?;
        let old_strides = strides(&self.dims);
        let new_dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let new_strides = strides(&new_dims);
        let d = self.total_dim();
        let map: Vec<usize> = (0..d)
            .map(|flat| {
                order
                    .iter()
                    .enumerate()
                    .map(|(k, &orig)| ((flat / old_strides[orig]) % self.dims[orig]) * new_strides[k])
                    .sum()
            })
            .collect();
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(map[i], map[j])] = self.mat[(i, j)];
            }
        }
        Ok(DensityMatrix {
            mat: out,
            dims: new_dims,
            unnormalized: self.unnormalized,
        })
    }

    /// Reduced state on `(focus, partner)` with the focus moved to the first
    /// slot, as every bipartite measure in this crate expects.
    pub fn reduced_pair(&self, focus: usize, partner: usize) -> Result<DensityMatrix> {
        if focus == partner {
            return Err(Error::invalid_argument("reduced_pair: focus == partner"));
        }
        let keep = if focus < partner {
            vec![focus, partner]
        } else {
            vec![partner, focus]
        };
        let red = self.partial_trace(&keep)?;
        if focus < partner {
            Ok(red)
        } else {
            red.permute_subsystems(&[1, 0])
        }
    }

    /// Merge all subsystems into a single `focus | rest` bipartite layout.
    pub fn as_bipartition(&self, focus: usize) -> Result<DensityMatrix> {
        if focus >= self.dims.len() {
            return Err(Error::invalid_argument("focus index out of range"));
        }
        let mut order = vec![focus];
        order.extend((0..self.dims.len()).filter(|&i| i != focus));
        let permuted = self.permute_subsystems(&order)?;
        let da = self.dims[focus];
        let db = permuted.total_dim() / da;
        Ok(DensityMatrix {
            mat: permuted.mat,
            dims: vec![da, db],
            unnormalized: self.unnormalized,
        })
    }

    /// Purification: a two-party pure state whose first-party marginal is
    /// `self`, with ancilla dimension equal to the rank.
    pub fn purify(&self, tol: &Tolerances) -> Result<PureState> {
        let (w, v) = crate::matrix::herm_eig(&self.mat, tol)?;
        let r = w.iter().filter(|&&x| x > tol.eig_clamp).count().max(1);
        let d = self.total_dim();
        let mut amps = vec![C64::new(0.0, 0.0); d * r];
        for j in 0..r {
            let root = math::sqrt(w[j].max(0.0));
            for i in 0..d {
                amps[i * r + j] = v[(i, j)] * root;
            }
        }
        PureState::new(amps, vec![d, r], tol)
    }
}

/// Focus subsystem plus an ordered list of partner subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartitionSpec {
    pub focus: usize,
    pub partners: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(focus: usize, partners: Vec<usize>, subsystems: usize) -> Result<Self> {
        if partners.is_empty() {
            return Err(Error::invalid_argument("partners must be nonempty"));
        }
        if focus >= subsystems || partners.iter().any(|&p| p >= subsystems) {
            return Err(Error::invalid_argument("partition index out of range"));
        }
        let mut seen = vec![false; subsystems];
        seen[focus] = true;
        for &p in &partners {
            if seen[p] {
                return Err(Error::invalid_argument(
                    "partition indices must be distinct (focus not a partner)",
                ));
            }
            seen[p] = true;
        }
        Ok(PartitionSpec { focus, partners })
    }

    /// Focus vs. every other subsystem, partners ascending.
    pub fn global(focus: usize, subsystems: usize) -> Result<Self> {
        let partners: Vec<usize> = (0..subsystems).filter(|&i| i != focus).collect();
        PartitionSpec::new(focus, partners, subsystems)
    }

    /// True when focus plus partners cover all `subsystems`.
    pub fn covers_all(&self, subsystems: usize) -> bool {
        self.partners.len() + 1 == subsystems
    }
}

/// Derive the sub-seed of item `index` from a master seed (splitmix64-style
/// finalizer). Campaigns and restarts use this so streams stay independent
/// and reproducible.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Haar-random pure state over `dims`, deterministic for a given seed.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    check_dims(dims)?;
    let d: usize = dims.iter().product();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut amps = Vec::with_capacity(d);
    for _ in 0..d {
        let (re, im) = gaussian_pair(&mut rng);
        amps.push(C64::new(re, im));
    }
    PureState::normalized(amps, dims.to_vec())
}

/// One Box-Muller pair of independent standard normals.
fn gaussian_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let unit = |r: &mut ChaCha12Rng| (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut u1 = unit(rng);
    if u1 == 0.0 {
        u1 = 1.0 / (1u64 << 53) as f64;
    }
    let u2 = unit(rng);
    let radius = math::sqrt(-2.0 * math::ln(u1));
    let angle = 2.0 * math::PI * u2;
    (radius * math::cos(angle), radius * math::sin(angle))
}
