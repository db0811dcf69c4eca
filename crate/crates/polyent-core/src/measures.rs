//! Entanglement quantities used by the polygamy inequalities: pure-state
//! concurrence, two-qubit concurrence of assistance, the block-sum bound
//! over local 2x2 subspace pairs, von Neumann entropy and pure-state
//! entanglement.
//!
//! Assistance-type values on a density matrix `rho` are sums of square roots
//! of the eigenvalues of `rho * rho_tilde`. Those eigenvalues are always
//! computed through the Hermitian equivalent `sqrt(rho) rho_tilde sqrt(rho)`,
//! which guarantees a real nonnegative spectrum.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{herm_eigvals, kron, psd_sqrt, CMat};
use crate::policy::Tolerances;
use crate::state::{DensityMatrix, PartitionSpec, PureState};
use crate::C64;

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MeasureMode {
    ExactClosedForm,
    BlockSum,
    OptimizerLowerBound,
}

/// Value of a measure plus its provenance and per-term breakdown.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureResult {
    pub value: f64,
    pub mode: MeasureMode,
    pub diagnostics: Vec<Diagnostic>,
}

/// Labeled scalar in a measure breakdown.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostic {
    pub label: String,
    pub value: f64,
}

impl Diagnostic {
    fn new(label: impl Into<String>, value: f64) -> Self {
        Diagnostic {
            label: label.into(),
            value,
        }
    }
}

/// One pair of local 2x2 subspaces with its antisymmetric generators.
///
/// `l_a` is `P_A (-|i><j| + |j><i|) P_A` for the A-side pair `(i, j)`, and
/// `l_b` the analogue for the B-side pair `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePairOps {
    pub a_pair: (usize, usize),
    pub b_pair: (usize, usize),
    pub l_a: CMat,
    pub l_b: CMat,
}

fn antisym_generator(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = C64::new(-1.0, 0.0);
    m[(j, i)] = C64::new(1.0, 0.0);
    m
}

/// All `d_a(d_a-1)/2 * d_b(d_b-1)/2` subspace pairs in lexicographic order
/// (A-side pair outer, B-side pair inner).
pub fn build_subspace_ops(d_a: usize, d_b: usize) -> Result<Vec<SubspacePairOps>> {
    if d_a < 2 || d_b < 2 {
        return Err(Error::invalid_argument(
            "subspace ops need local dimensions >= 2",
        ));
    }
    let mut out = Vec::with_capacity(d_a * (d_a - 1) / 2 * d_b * (d_b - 1) / 2);
    for i in 0..d_a {
        for j in (i + 1)..d_a {
            for k in 0..d_b {
                for l in (k + 1)..d_b {
                    out.push(SubspacePairOps {
                        a_pair: (i, j),
                        b_pair: (k, l),
                        l_a: antisym_generator(d_a, i, j),
                        l_b: antisym_generator(d_b, k, l),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Pure-state concurrence `sqrt(2(1 - Tr rho_A^2))` of the cut
/// `focus | partners`, which must cover the whole system.
///
/// The determinant form `4 sum |a_ik a_jl - a_il a_jk|^2` is evaluated as
/// well and the two routes must agree within the dual-form tolerance.
pub fn concurrence_pure(
    psi: &PureState,
    cut: &PartitionSpec,
    tol: &Tolerances,
) -> Result<MeasureResult> {
    if !cut.covers_all(psi.subsystems()) {
        return Err(Error::invalid_argument(
            "concurrence_pure: cut must bipartition the full system",
        ));
    }
    let rho_a = psi.marginal(&[cut.focus])?;
    // 2(1 - Tr rho_A^2) = 4 sum_{i<j} lambda_i lambda_j for a unit-trace
    // marginal; the pairwise form is free of cancellation near zero.
    let lam = rho_a.eigenvalues(tol)?;
    let mut pair_products = 0.0;
    for i in 0..lam.len() {
        for j in (i + 1)..lam.len() {
            pair_products += lam[i].max(0.0) * lam[j].max(0.0);
        }
    }
    let c_trace = math::sqrt(4.0 * pair_products);

    let m = psi.bipartition_matrix(cut.focus)?;
    let mut sum_sq = 0.0;
    for_each_minor(&m, |_, _, minor| sum_sq += minor.norm_sqr());
    let c_det = math::sqrt(4.0 * sum_sq);

    if math::abs(c_trace - c_det) > tol.dual_form {
        return Err(Error::numeric(format!(
            "concurrence dual forms disagree: trace {c_trace} vs determinant {c_det}"
        )));
    }
    debug_assert!(c_trace <= max_concurrence(&rho_a) + 1e-9);
    Ok(MeasureResult {
        value: c_trace,
        mode: MeasureMode::ExactClosedForm,
        diagnostics: vec![
            Diagnostic::new("trace-form", c_trace),
            Diagnostic::new("determinant-form", c_det),
        ],
    })
}

fn max_concurrence(rho_a: &DensityMatrix) -> f64 {
    let d = rho_a.total_dim() as f64;
    math::sqrt(2.0 * (d - 1.0) / d)
}

fn for_each_minor<F: FnMut((usize, usize), (usize, usize), C64)>(m: &CMat, mut f: F) {
    for i in 0..m.rows() {
        for j in (i + 1)..m.rows() {
            for k in 0..m.cols() {
                for l in (k + 1)..m.cols() {
                    let minor = m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)];
                    f((i, j), (k, l), minor);
                }
            }
        }
    }
}

/// Square roots of the eigenvalues of `rho * rho_tilde`, descending, where
/// `rho_tilde = flip rho^* flip` for a given real flip operator. Computed via
/// the Hermitian product `sqrt(rho) rho_tilde sqrt(rho)`.
fn assistance_lambdas(rho: &DensityMatrix, flip: &CMat, tol: &Tolerances) -> Result<Vec<f64>> {
    let s = psd_sqrt(rho.mat(), tol)?;
    let tilde = flip.mul(&rho.mat().conj()).mul(flip);
    let h = s.mul(&tilde).mul(&s);
    let mu = herm_eigvals(&h, tol)?;
    Ok(mu.iter().map(|&x| clamped_sqrt(x, tol)).collect())
}

/// Square root with the sub-clamp eigenvalue noise zeroed out; spurious
/// near-zero eigenvalues would otherwise leak `sqrt(eps)`-sized mass into
/// every lambda sum.
fn clamped_sqrt(x: f64, tol: &Tolerances) -> f64 {
    if x > tol.eig_clamp {
        math::sqrt(x)
    } else {
        0.0
    }
}

fn two_qubit_flip() -> CMat {
    let y = antisym_generator(2, 0, 1);
    kron(&y, &y)
}

/// Two-qubit concurrence of assistance: the sum of the square roots of the
/// eigenvalues of `rho * rho_tilde`, equal to the maximum average concurrence
/// over pure-state decompositions. Accepts unnormalized blocks (the value
/// scales linearly with trace).
pub fn ca_two_qubit(rho: &DensityMatrix, tol: &Tolerances) -> Result<MeasureResult> {
    if rho.dims() != [2, 2] {
        return Err(Error::invalid_argument("ca_two_qubit: dims must be (2,2)"));
    }
    let lambdas = assistance_lambdas(rho, &two_qubit_flip(), tol)?;
    let value: f64 = lambdas.iter().sum();
    let diagnostics = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| Diagnostic::new(format!("lambda{i}"), l))
        .collect();
    Ok(MeasureResult {
        value,
        mode: MeasureMode::ExactClosedForm,
        diagnostics,
    })
}

/// Wootters concurrence of a two-qubit mixed state,
/// `max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4)`.
pub fn concurrence_two_qubit(rho: &DensityMatrix, tol: &Tolerances) -> Result<MeasureResult> {
    if rho.dims() != [2, 2] {
        return Err(Error::invalid_argument(
            "concurrence_two_qubit: dims must be (2,2)",
        ));
    }
    let lambdas = assistance_lambdas(rho, &two_qubit_flip(), tol)?;
    let value = (lambdas[0] - lambdas[1..].iter().sum::<f64>()).max(0.0);
    let diagnostics = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| Diagnostic::new(format!("lambda{i}"), l))
        .collect();
    Ok(MeasureResult {
        value,
        mode: MeasureMode::ExactClosedForm,
        diagnostics,
    })
}

/// Assistance of one 2x2-subspace block: the sum of square roots of the
/// eigenvalues of `rho * rho_tilde_mn` with
/// `rho_tilde_mn = (L_A^m (x) L_B^n) rho^* (L_A^m (x) L_B^n)`.
pub fn ca_block(rho: &DensityMatrix, ops: &SubspacePairOps, tol: &Tolerances) -> Result<f64> {
    let flip = block_flip(rho, ops)?;
    let lambdas = assistance_lambdas(rho, &flip, tol)?;
    Ok(lambdas.iter().sum())
}

fn block_flip(rho: &DensityMatrix, ops: &SubspacePairOps) -> Result<CMat> {
    if rho.dims().len() != 2
        || rho.dims()[0] != ops.l_a.rows()
        || rho.dims()[1] != ops.l_b.rows()
    {
        return Err(Error::invalid_argument(
            "ca_block: state dims do not match subspace operators",
        ));
    }
    Ok(kron(&ops.l_a, &ops.l_b))
}

/// Block-sum assistance bound: the sum of [`ca_block`] over every local
/// 2x2-subspace pair. For two-qubit input this equals [`ca_two_qubit`]
/// exactly (there is a single block).
pub fn tau_a(rho: &DensityMatrix, tol: &Tolerances) -> Result<MeasureResult> {
    if rho.dims().len() != 2 {
        return Err(Error::invalid_argument(
            "tau_a: state must be bipartite (merge partners first)",
        ));
    }
    let ops = build_subspace_ops(rho.dims()[0], rho.dims()[1])?;
    let s = psd_sqrt(rho.mat(), tol)?;
    let conj = rho.mat().conj();
    let mut value = 0.0;
    let mut diagnostics = Vec::with_capacity(ops.len());
    for op in &ops {
        let flip = kron(&op.l_a, &op.l_b);
        let tilde = flip.mul(&conj).mul(&flip);
        let h = s.mul(&tilde).mul(&s);
        let mu = herm_eigvals(&h, tol)?;
        let block: f64 = mu.iter().map(|&x| clamped_sqrt(x, tol)).sum();
        diagnostics.push(Diagnostic::new(
            format!(
                "({},{})x({},{})",
                op.a_pair.0, op.a_pair.1, op.b_pair.0, op.b_pair.1
            ),
            block,
        ));
        value += block;
    }
    Ok(MeasureResult {
        value,
        mode: MeasureMode::BlockSum,
        diagnostics,
    })
}

/// Block-sum assistance bound of a pure state on the cut `focus | partners`,
/// evaluated through the exact pure-state block values
/// `|<phi| L_A (x) L_B |phi^*>| = 2 |minor|` of the bipartition amplitude
/// matrix. Agrees with [`tau_a`] on the pure density matrix.
pub fn tau_a_pure(psi: &PureState, cut: &PartitionSpec, tol: &Tolerances) -> Result<MeasureResult> {
    if !cut.covers_all(psi.subsystems()) {
        return Err(Error::invalid_argument(
            "tau_a_pure: cut must bipartition the full system",
        ));
    }
    let _ = tol;
    let m = psi.bipartition_matrix(cut.focus)?;
    let mut value = 0.0;
    let mut diagnostics = Vec::new();
    for_each_minor(&m, |(i, j), (k, l), minor| {
        let block = 2.0 * minor.norm();
        diagnostics.push(Diagnostic::new(format!("({i},{j})x({k},{l})"), block));
        value += block;
    });
    Ok(MeasureResult {
        value,
        mode: MeasureMode::BlockSum,
        diagnostics,
    })
}

/// Von Neumann entropy in bits, `-sum lambda_i log2 lambda_i` with
/// `0 log 0 = 0`. Eigenvalues below the clamp threshold are dropped.
pub fn von_neumann_entropy(rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    let w = rho.eigenvalues(tol)?;
    let mut s = 0.0;
    for &lam in &w {
        if lam > tol.eig_clamp {
            s -= lam * math::log2(lam);
        }
    }
    debug_assert!(s <= math::log2(rho.total_dim() as f64) + 1e-9);
    Ok(s.max(0.0))
}

/// Entropy of entanglement of a pure state across `focus | partners`: the
/// von Neumann entropy of the focus marginal. On pure states this is also
/// the entanglement of assistance of the cut.
pub fn entanglement_pure(psi: &PureState, cut: &PartitionSpec, tol: &Tolerances) -> Result<f64> {
    if !cut.covers_all(psi.subsystems()) {
        return Err(Error::invalid_argument(
            "entanglement_pure: cut must bipartition the full system",
        ));
    }
    von_neumann_entropy(&psi.marginal(&[cut.focus])?, tol)
}
