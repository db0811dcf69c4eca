//! The inequality engine: Hamming-weight machinery, the weighted polygamy
//! bounds for assistance measures, their condition-gated tighter variants,
//! the prior weighted bound they are compared against, and the baseline
//! monogamy/polygamy inequalities.
//!
//! Upper-bound reports carry `slack = rhs - lhs`; the one lower-bound
//! (monogamy) baseline flips the sign so that `slack >= 0` always means the
//! inequality holds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::measures;
use crate::policy::Tolerances;
use crate::roof::{maximize_assistance, Objective, OptimizerSettings};
use crate::state::{PartitionSpec, PureState};

/// Number of set bits in the binary expansion of `j`.
pub fn hamming_weight(j: u64) -> u32 {
    j.count_ones()
}

/// Binary expansion of a nonnegative integer, least-significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryIndexVector {
    pub j: u64,
    pub bits: Vec<u8>,
    pub weight: u32,
}

impl BinaryIndexVector {
    pub fn new(j: u64) -> Self {
        let n = if j == 0 { 1 } else { 64 - j.leading_zeros() as usize };
        let bits = (0..n).map(|i| ((j >> i) & 1) as u8).collect();
        BinaryIndexVector {
            j,
            bits,
            weight: j.count_ones(),
        }
    }
}

/// Which exponent the weight coefficient uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum WeightScheme {
    /// `(2^x - 1)^{w_H(j)}`
    Hamming,
    /// `(2^x - 1)^j`
    Linear,
}

/// Weight coefficient `(2^x - 1)^e` with `e` the Hamming weight of `j` or
/// `j` itself. The coefficient for `j = 0` is 1 by convention, including at
/// `x = 0` where the base vanishes.
pub fn weight_coeff(x: f64, j: u64, scheme: WeightScheme) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid_argument(format!(
            "weight exponent {x} outside [0, 1]"
        )));
    }
    let e = match scheme {
        WeightScheme::Hamming => hamming_weight(j) as i32,
        WeightScheme::Linear => j as i32,
    };
    if e == 0 {
        return Ok(1.0);
    }
    Ok(math::powi(math::exp2(x) - 1.0, e))
}

/// Coefficient `beta^{w_H(j)}` of the prior weighted bound.
fn prior_coeff(beta: f64, j: u64) -> f64 {
    let w = hamming_weight(j) as i32;
    if w == 0 {
        1.0
    } else {
        math::powi(beta, w)
    }
}

/// Outcome of the scalar lemma `(1+t)^x <= 1 + (2^x - 1) t^x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Outcome {
    pub holds: bool,
    /// `rhs - lhs`.
    pub residual: f64,
}

/// Check the scalar lemma at a point of `[0,1]^2`.
pub fn lemma1_holds(x: f64, t: f64, tol: &Tolerances) -> Result<Lemma1Outcome> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid_argument(format!(
            "lemma domain is [0,1]^2, got x={x}, t={t}"
        )));
    }
    let lhs = math::powf(1.0 + t, x);
    let rhs = 1.0 + (math::exp2(x) - 1.0) * math::powf(t, x);
    let residual = rhs - lhs;
    Ok(Lemma1Outcome {
        holds: residual >= -tol.lemma_residual,
        residual,
    })
}

/// Measure power with the degenerate-limit convention: `v^0` is 0 for a
/// vanishing measure and 1 otherwise, so zero-measure terms never create
/// spurious right-hand-side mass at exponent 0.
pub fn measure_pow(v: f64, e: f64, tol: &Tolerances) -> f64 {
    let v = v.max(0.0);
    if e == 0.0 {
        if v <= tol.zero_measure {
            0.0
        } else {
            1.0
        }
    } else {
        math::powf(v, e)
    }
}

/// Which quantity the left-hand side of an assistance bound uses for the
/// global cut of a pure state: the literal block-sum, or the pure-state
/// concurrence (the value the worked examples report).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LhsMode {
    BlockSum,
    PureConcurrence,
}

/// Partner-term ordering before weights are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TermOrder {
    /// The partner order of the partition as given.
    Given,
    /// Stable descending sort by term value.
    SortedDescending,
}

/// Where entanglement-of-assistance partner terms come from.
#[derive(Debug, Clone)]
pub enum EaSource {
    /// Caller-supplied exact values, one per partner in partition order.
    Injected(Vec<f64>),
    /// Decomposition optimizer (lower bounds); pure pairs short-circuit to
    /// the exact marginal entropy.
    Optimizer(OptimizerSettings),
}

/// Inequalities the engine can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InequalityId {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Eq19Prior,
    CkwEq1,
    DualCaEq2,
    TauSqEq4,
    EaEq18,
}

/// Baseline inequality selector for [`check_baseline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    CkwEq1,
    DualCaEq2,
    TauSqEq4,
    EaEq18,
}

/// Bound direction: polygamy bounds are upper bounds on the LHS, the CKW
/// monogamy baseline is a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Direction {
    UpperBound,
    LowerBound,
}

/// One weighted partner term of a report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TermEntry {
    /// Subsystem index of the partner.
    pub partner: usize,
    pub label: String,
    /// Raw measure value before powering.
    pub raw: f64,
    /// Measure value raised to the report exponent.
    pub value: f64,
    pub weight: f64,
    /// `weight * value`.
    pub contribution: f64,
}

/// Provenance flags of a report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeFlags {
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub lhs_mode: Option<LhsMode>,
    pub term_measure: String,
    pub term_source: String,
    pub order: TermOrder,
    pub escalated: bool,
}

/// Full outcome of one inequality check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolygamyReport {
    pub inequality_id: InequalityId,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub exponent: Option<f64>,
    pub direction: Direction,
    /// Raw LHS measure before powering.
    pub lhs_raw: f64,
    /// LHS as it appears in the inequality (powered).
    pub lhs: f64,
    pub terms: Vec<TermEntry>,
    pub rhs: f64,
    /// Signed slack; nonnegative means the bound holds.
    pub slack: f64,
    pub holds: bool,
    /// True when any RHS term is an optimizer lower bound, so a violation
    /// verdict is not conclusive.
    pub tentative: bool,
    /// Sort applied to partner terms; `permutation[k]` is the index into the
    /// partition's partner list occupying slot `k`.
    pub permutation: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub condition_status: Option<bool>,
    pub mode_flags: ModeFlags,
}

impl PolygamyReport {
    fn finish(mut self, tol: &Tolerances) -> Self {
        self.rhs = self.terms.iter().map(|t| t.contribution).sum();
        self.slack = match self.direction {
            Direction::UpperBound => self.rhs - self.lhs,
            Direction::LowerBound => self.lhs - self.rhs,
        };
        self.holds = self.slack >= -tol.slack;
        self
    }
}

fn partner_label(focus: usize, partner: usize) -> String {
    let letter = |i: usize| (b'A' + (i as u8 % 26)) as char;
    format!("{}{}", letter(focus), letter(partner))
}

/// Raw tau values (block-sum assistance) of every reduced pair, in partition
/// order.
fn pair_tau_values(psi: &PureState, part: &PartitionSpec, tol: &Tolerances) -> Result<Vec<f64>> {
    let rho = psi.density();
    part.partners
        .iter()
        .map(|&p| {
            let pair = rho.reduced_pair(part.focus, p)?;
            Ok(measures::tau_a(&pair, tol)?.value)
        })
        .collect()
}

fn global_lhs(
    psi: &PureState,
    part: &PartitionSpec,
    mode: LhsMode,
    tol: &Tolerances,
) -> Result<f64> {
    match mode {
        LhsMode::BlockSum => Ok(measures::tau_a_pure(psi, part, tol)?.value),
        LhsMode::PureConcurrence => Ok(measures::concurrence_pure(psi, part, tol)?.value),
    }
}

/// Entanglement-of-assistance values per partner plus an exactness flag.
fn ea_values(
    psi: &PureState,
    part: &PartitionSpec,
    source: &EaSource,
    tol: &Tolerances,
) -> Result<(Vec<f64>, bool)> {
    match source {
        EaSource::Injected(vals) => {
            if vals.len() != part.partners.len() {
                return Err(Error::invalid_argument(format!(
                    "{} injected terms for {} partners",
                    vals.len(),
                    part.partners.len()
                )));
            }
            Ok((vals.clone(), false))
        }
        EaSource::Optimizer(settings) => {
            let rho = psi.density();
            let mut vals = Vec::with_capacity(part.partners.len());
            let mut any_bound = false;
            for &p in &part.partners {
                let pair = rho.reduced_pair(part.focus, p)?;
                if pair.purity() >= 1.0 - tol.dual_form {
                    // pure pair: assistance is the exact marginal entropy
                    let s = measures::von_neumann_entropy(&pair.partial_trace(&[0])?, tol)?;
                    vals.push(s);
                } else {
                    let r = maximize_assistance(&pair, Objective::EntropyOfMarginal, settings, tol)?;
                    vals.push(r.value);
                    any_bound = true;
                }
            }
            Ok((vals, any_bound))
        }
    }
}

/// Stable descending sort; returns (sorted values, permutation).
fn sort_descending(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    (perm.iter().map(|&i| values[i]).collect(), perm)
}

struct WeightedCheck<'a> {
    id: InequalityId,
    exponent: f64,
    /// exponent fed to `weight_coeff` (alpha/2 for tau bounds, beta for EOA)
    weight_x: f64,
    scheme: WeightScheme,
    term_measure: &'a str,
    term_source: &'a str,
    lhs_mode: Option<LhsMode>,
    order: TermOrder,
}

fn weighted_report(
    cfg: &WeightedCheck,
    lhs_raw: f64,
    raw_terms: &[f64],
    part: &PartitionSpec,
    tentative: bool,
    condition_status: Option<bool>,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    let (ordered, perm) = match cfg.order {
        TermOrder::Given => (raw_terms.to_vec(), (0..raw_terms.len()).collect()),
        TermOrder::SortedDescending => sort_descending(raw_terms),
    };
    let mut terms = Vec::with_capacity(ordered.len());
    for (slot, (&raw, &orig)) in ordered.iter().zip(&perm).enumerate() {
        let weight = weight_coeff(cfg.weight_x, slot as u64, cfg.scheme)?;
        let value = measure_pow(raw, cfg.exponent, tol);
        terms.push(TermEntry {
            partner: part.partners[orig],
            label: partner_label(part.focus, part.partners[orig]),
            raw,
            value,
            weight,
            contribution: weight * value,
        });
    }
    let report = PolygamyReport {
        inequality_id: cfg.id,
        exponent: Some(cfg.exponent),
        direction: Direction::UpperBound,
        lhs_raw,
        lhs: measure_pow(lhs_raw, cfg.exponent, tol),
        terms,
        rhs: 0.0,
        slack: 0.0,
        holds: false,
        tentative,
        permutation: perm,
        condition_status,
        mode_flags: ModeFlags {
            lhs_mode: cfg.lhs_mode,
            term_measure: cfg.term_measure.into(),
            term_source: cfg.term_source.into(),
            order: cfg.order,
            escalated: false,
        },
    };
    Ok(report.finish(tol))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::invalid_argument(format!(
            "alpha {alpha} outside [0, 2]"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid_argument(format!(
            "beta {beta} outside [0, 1]"
        )));
    }
    Ok(())
}

fn require_cover(psi: &PureState, part: &PartitionSpec) -> Result<()> {
    if !part.covers_all(psi.subsystems()) {
        return Err(Error::invalid_argument(
            "partition must cover the whole pure state",
        ));
    }
    Ok(())
}

/// Hamming-weight weighted polygamy bound for the alpha-power of the
/// assistance bound: partner terms are sorted descending (the proof's
/// relabeling) before the weights `(2^{alpha/2}-1)^{w_H(j)}` are assigned.
pub fn check_theorem1(
    psi: &PureState,
    part: &PartitionSpec,
    alpha: f64,
    lhs_mode: LhsMode,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    check_alpha(alpha)?;
    require_cover(psi, part)?;
    let lhs_raw = global_lhs(psi, part, lhs_mode, tol)?;
    let taus = pair_tau_values(psi, part, tol)?;
    weighted_report(
        &WeightedCheck {
            id: InequalityId::Theorem1,
            exponent: alpha,
            weight_x: alpha / 2.0,
            scheme: WeightScheme::Hamming,
            term_measure: "tau_a",
            term_source: "closed-form",
            lhs_mode: Some(lhs_mode),
            order: TermOrder::SortedDescending,
        },
        lhs_raw,
        &taus,
        part,
        false,
        None,
        tol,
    )
}

/// Condition-gated tighter bound with weights `(2^{alpha/2}-1)^j`. The
/// ordering condition `tau_i^2 >= sum_{j>i} tau_j^2` is evaluated on the
/// partner order as given (the paper's worked example depends on it);
/// `TermOrder::SortedDescending` re-checks it after the relabeling instead.
/// The report is produced either way, with `condition_status` recording the
/// gate.
pub fn check_theorem2(
    psi: &PureState,
    part: &PartitionSpec,
    alpha: f64,
    lhs_mode: LhsMode,
    order: TermOrder,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    check_alpha(alpha)?;
    require_cover(psi, part)?;
    let lhs_raw = global_lhs(psi, part, lhs_mode, tol)?;
    let taus = pair_tau_values(psi, part, tol)?;
    let ordered = match order {
        TermOrder::Given => taus.clone(),
        TermOrder::SortedDescending => sort_descending(&taus).0,
    };
    let condition = ordering_condition(&ordered, tol);
    weighted_report(
        &WeightedCheck {
            id: InequalityId::Theorem2,
            exponent: alpha,
            weight_x: alpha / 2.0,
            scheme: WeightScheme::Linear,
            term_measure: "tau_a",
            term_source: "closed-form",
            lhs_mode: Some(lhs_mode),
            order,
        },
        lhs_raw,
        &taus,
        part,
        false,
        Some(condition),
        tol,
    )
}

/// `v_i^2 >= sum_{j>i} v_j^2` for all i, with a small cushion.
fn ordering_condition(values: &[f64], tol: &Tolerances) -> bool {
    for i in 0..values.len().saturating_sub(1) {
        let tail: f64 = values[i + 1..].iter().map(|v| v * v).sum();
        if values[i] * values[i] < tail - tol.condition {
            return false;
        }
    }
    true
}

/// Hamming-weight weighted polygamy bound for the beta-power of the
/// entanglement of assistance. The LHS of a pure global cut is the exact
/// marginal entropy; partner terms come from `source`.
pub fn check_theorem3(
    psi: &PureState,
    part: &PartitionSpec,
    beta: f64,
    source: &EaSource,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    check_beta(beta)?;
    require_cover(psi, part)?;
    let lhs_raw = measures::entanglement_pure(psi, part, tol)?;
    let (vals, tentative) = ea_values(psi, part, source, tol)?;
    let report = weighted_report(
        &WeightedCheck {
            id: InequalityId::Theorem3,
            exponent: beta,
            weight_x: beta,
            scheme: WeightScheme::Hamming,
            term_measure: "E_a",
            term_source: ea_source_label(source),
            lhs_mode: None,
            order: TermOrder::SortedDescending,
        },
        lhs_raw,
        &vals,
        part,
        tentative,
        None,
        tol,
    )?;
    escalate_if_needed(report, psi, part, beta, source, tol, |s| {
        WeightedCheck {
            id: InequalityId::Theorem3,
            exponent: beta,
            weight_x: beta,
            scheme: WeightScheme::Hamming,
            term_measure: "E_a",
            term_source: ea_source_label(s),
            lhs_mode: None,
            order: TermOrder::SortedDescending,
        }
    })
}

/// Condition-gated tighter EOA bound with weights `(2^beta-1)^j`; same
/// ordering-condition handling as the tau-variant.
pub fn check_theorem4(
    psi: &PureState,
    part: &PartitionSpec,
    beta: f64,
    source: &EaSource,
    order: TermOrder,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    check_beta(beta)?;
    require_cover(psi, part)?;
    let lhs_raw = measures::entanglement_pure(psi, part, tol)?;
    let (vals, tentative) = ea_values(psi, part, source, tol)?;
    let ordered = match order {
        TermOrder::Given => vals.clone(),
        TermOrder::SortedDescending => sort_descending(&vals).0,
    };
    let condition = ordering_condition(&ordered, tol);
    let report = weighted_report(
        &WeightedCheck {
            id: InequalityId::Theorem4,
            exponent: beta,
            weight_x: beta,
            scheme: WeightScheme::Linear,
            term_measure: "E_a",
            term_source: ea_source_label(source),
            lhs_mode: None,
            order,
        },
        lhs_raw,
        &vals,
        part,
        tentative,
        Some(condition),
        tol,
    )?;
    escalate_if_needed(report, psi, part, beta, source, tol, |s| WeightedCheck {
        id: InequalityId::Theorem4,
        exponent: beta,
        weight_x: beta,
        scheme: WeightScheme::Linear,
        term_measure: "E_a",
        term_source: ea_source_label(s),
        lhs_mode: None,
        order,
    })
}

/// Prior weighted EOA bound with coefficients `beta^{w_H(j)}`; the ordering
/// precondition is enforced by sorting.
pub fn check_eq19_prior(
    psi: &PureState,
    part: &PartitionSpec,
    beta: f64,
    source: &EaSource,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    check_beta(beta)?;
    require_cover(psi, part)?;
    let lhs_raw = measures::entanglement_pure(psi, part, tol)?;
    let (vals, tentative) = ea_values(psi, part, source, tol)?;
    let (ordered, perm) = sort_descending(&vals);
    let mut terms = Vec::with_capacity(ordered.len());
    for (slot, (&raw, &orig)) in ordered.iter().zip(&perm).enumerate() {
        let weight = prior_coeff(beta, slot as u64);
        let value = measure_pow(raw, beta, tol);
        terms.push(TermEntry {
            partner: part.partners[orig],
            label: partner_label(part.focus, part.partners[orig]),
            raw,
            value,
            weight,
            contribution: weight * value,
        });
    }
    let report = PolygamyReport {
        inequality_id: InequalityId::Eq19Prior,
        exponent: Some(beta),
        direction: Direction::UpperBound,
        lhs_raw,
        lhs: measure_pow(lhs_raw, beta, tol),
        terms,
        rhs: 0.0,
        slack: 0.0,
        holds: false,
        tentative,
        permutation: perm,
        condition_status: None,
        mode_flags: ModeFlags {
            lhs_mode: None,
            term_measure: "E_a".into(),
            term_source: ea_source_label(source).into(),
            order: TermOrder::SortedDescending,
            escalated: false,
        },
    };
    Ok(report.finish(tol))
}

fn ea_source_label(source: &EaSource) -> &'static str {
    match source {
        EaSource::Injected(_) => "injected",
        EaSource::Optimizer(_) => "optimizer-lower-bound",
    }
}

/// A tentative violation (optimizer-backed RHS) is retried once with four
/// times the restarts before the verdict stands; more restarts can only
/// raise the lower-bound terms.
fn escalate_if_needed(
    report: PolygamyReport,
    psi: &PureState,
    part: &PartitionSpec,
    exponent: f64,
    source: &EaSource,
    tol: &Tolerances,
    rebuild: impl Fn(&EaSource) -> WeightedCheck<'static>,
) -> Result<PolygamyReport> {
    if report.holds || !report.tentative {
        return Ok(report);
    }
    let EaSource::Optimizer(settings) = source else {
        return Ok(report);
    };
    let escalated_settings = OptimizerSettings {
        restarts: settings.restarts * 4,
        ..settings.clone()
    };
    let escalated_source = EaSource::Optimizer(escalated_settings);
    let (vals, tentative) = ea_values(psi, part, &escalated_source, tol)?;
    let cfg = rebuild(&escalated_source);
    // re-evaluate the ordering condition on the refreshed terms
    let condition = report.condition_status.map(|_| {
        let ordered = match cfg.order {
            TermOrder::Given => vals.clone(),
            TermOrder::SortedDescending => sort_descending(&vals).0,
        };
        ordering_condition(&ordered, tol)
    });
    let mut retried = weighted_report(&cfg, report.lhs_raw, &vals, part, tentative, condition, tol)?;
    let _ = exponent;
    retried.mode_flags.escalated = true;
    Ok(retried)
}

/// Baseline (unit / squared exponent) inequalities.
pub fn check_baseline(
    psi: &PureState,
    part: &PartitionSpec,
    which: Baseline,
    lhs_mode: LhsMode,
    ea_source: &EaSource,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    require_cover(psi, part)?;
    let all_qubits = psi.dims().iter().all(|&d| d == 2);
    match which {
        Baseline::CkwEq1 | Baseline::DualCaEq2 if !all_qubits => {
            return Err(Error::invalid_argument(
                "this baseline inequality applies to all-qubit systems only",
            ));
        }
        _ => {}
    }
    let rho = psi.density();
    match which {
        Baseline::CkwEq1 => {
            // monogamy: C^2(A|rest) >= sum C^2(pairs), Wootters pairs
            let lhs_raw = measures::concurrence_pure(psi, part, tol)?.value;
            let mut terms = Vec::new();
            for &p in &part.partners {
                let pair = rho.reduced_pair(part.focus, p)?;
                let c = measures::concurrence_two_qubit(&pair, tol)?.value;
                terms.push(TermEntry {
                    partner: p,
                    label: partner_label(part.focus, p),
                    raw: c,
                    value: c * c,
                    weight: 1.0,
                    contribution: c * c,
                });
            }
            let report = PolygamyReport {
                inequality_id: InequalityId::CkwEq1,
                exponent: Some(2.0),
                direction: Direction::LowerBound,
                lhs_raw,
                lhs: lhs_raw * lhs_raw,
                terms,
                rhs: 0.0,
                slack: 0.0,
                holds: false,
                tentative: false,
                permutation: (0..part.partners.len()).collect(),
                condition_status: None,
                mode_flags: ModeFlags {
                    lhs_mode: None,
                    term_measure: "C".into(),
                    term_source: "closed-form".into(),
                    order: TermOrder::Given,
                    escalated: false,
                },
            };
            Ok(report.finish(tol))
        }
        Baseline::DualCaEq2 => {
            // C_a^2(A|rest) <= sum C_a^2(pairs); on a pure state the global
            // assistance equals the concurrence
            let lhs_raw = measures::concurrence_pure(psi, part, tol)?.value;
            let mut terms = Vec::new();
            for &p in &part.partners {
                let pair = rho.reduced_pair(part.focus, p)?;
                let ca = measures::ca_two_qubit(&pair, tol)?.value;
                terms.push(TermEntry {
                    partner: p,
                    label: partner_label(part.focus, p),
                    raw: ca,
                    value: ca * ca,
                    weight: 1.0,
                    contribution: ca * ca,
                });
            }
            let report = PolygamyReport {
                inequality_id: InequalityId::DualCaEq2,
                exponent: Some(2.0),
                direction: Direction::UpperBound,
                lhs_raw,
                lhs: lhs_raw * lhs_raw,
                terms,
                rhs: 0.0,
                slack: 0.0,
                holds: false,
                tentative: false,
                permutation: (0..part.partners.len()).collect(),
                condition_status: None,
                mode_flags: ModeFlags {
                    lhs_mode: None,
                    term_measure: "C_a".into(),
                    term_source: "closed-form".into(),
                    order: TermOrder::Given,
                    escalated: false,
                },
            };
            Ok(report.finish(tol))
        }
        Baseline::TauSqEq4 => {
            let mut report = check_theorem1(psi, part, 2.0, lhs_mode, tol)?;
            // alpha = 2 makes every Hamming weight coefficient 1, so the
            // weighted bound coincides with the squared baseline
            report.inequality_id = InequalityId::TauSqEq4;
            Ok(report)
        }
        Baseline::EaEq18 => {
            let mut report = check_theorem3(psi, part, 1.0, ea_source, tol)?;
            report.inequality_id = InequalityId::EaEq18;
            Ok(report)
        }
    }
}

/// Appending uncorrelated `|0>` subsystems as extra partners must leave the
/// global-cut measures unchanged and contribute vanishing pairwise terms.
pub fn padding_invariance_test(
    psi: &PureState,
    part: &PartitionSpec,
    extra_dims: &[usize],
    tol: &Tolerances,
) -> Result<bool> {
    require_cover(psi, part)?;
    if extra_dims.is_empty() {
        return Ok(true);
    }
    let pad = PureState::ground(extra_dims.to_vec())?;
    let padded = psi.tensor(&pad);
    let n_old = psi.subsystems();
    let mut partners = part.partners.clone();
    partners.extend(n_old..n_old + extra_dims.len());
    let padded_part = PartitionSpec::new(part.focus, partners, padded.subsystems())?;

    let before_bs = measures::tau_a_pure(psi, part, tol)?.value;
    let after_bs = measures::tau_a_pure(&padded, &padded_part, tol)?.value;
    let before_c = measures::concurrence_pure(psi, part, tol)?.value;
    let after_c = measures::concurrence_pure(&padded, &padded_part, tol)?.value;
    if math::abs(before_bs - after_bs) > 1e-9 || math::abs(before_c - after_c) > 1e-9 {
        return Ok(false);
    }
    let rho = padded.density();
    for p in n_old..n_old + extra_dims.len() {
        let pair = rho.reduced_pair(part.focus, p)?;
        if measures::tau_a(&pair, tol)?.value > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::state::haar_random_pure;
    use crate::C64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn gsd_paper() -> PureState {
        let l = 6f64.sqrt() / 6.0;
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0b000] = C64::new(0.5, 0.0);
        amps[0b100] = C64::new(0.5, 0.0);
        amps[0b101] = C64::new(l, 0.0);
        amps[0b110] = C64::new(l, 0.0);
        amps[0b111] = C64::new(l, 0.0);
        PureState::new(amps, vec![2, 2, 2], &tol()).unwrap()
    }

    fn w3() -> PureState {
        let s = 1.0 / 3f64.sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0b100] = C64::new(s, 0.0);
        amps[0b010] = C64::new(s, 0.0);
        amps[0b001] = C64::new(s, 0.0);
        PureState::new(amps, vec![2, 2, 2], &tol()).unwrap()
    }

    fn w4(a: f64, b: f64, c: f64, d: f64) -> PureState {
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        amps[0b1000] = C64::new(a, 0.0);
        amps[0b0100] = C64::new(b, 0.0);
        amps[0b0010] = C64::new(c, 0.0);
        amps[0b0001] = C64::new(d, 0.0);
        PureState::new(amps, vec![2, 2, 2, 2], &tol()).unwrap()
    }

    #[test]
    fn hamming_basics() {
        assert_eq!(hamming_weight(0), 0);
        assert_eq!(hamming_weight(5), 2);
        assert_eq!(hamming_weight(7), 3);
        let v = BinaryIndexVector::new(5);
        assert_eq!(v.bits, vec![1, 0, 1]);
        assert_eq!(v.weight, 2);
        // reconstruction: j == sum bits_i 2^i
        let j: u64 = v
            .bits
            .iter()
            .enumerate()
            .map(|(i, &b)| (b as u64) << i)
            .sum();
        assert_eq!(j, 5);
        assert!(v.weight as u64 <= v.j);
    }

    #[test]
    fn weight_coeff_values() {
        let any_j = 13;
        assert_abs_diff_eq!(
            weight_coeff(1.0, any_j, WeightScheme::Hamming).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            weight_coeff(0.5, 1, WeightScheme::Hamming).unwrap(),
            2f64.sqrt() - 1.0,
            epsilon = 1e-12
        );
        // j = 3: hamming weight 2 < linear 3, base < 1
        let h = weight_coeff(0.5, 3, WeightScheme::Hamming).unwrap();
        let l = weight_coeff(0.5, 3, WeightScheme::Linear).unwrap();
        assert_abs_diff_eq!(h, (2f64.sqrt() - 1.0).powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(l, (2f64.sqrt() - 1.0).powi(3), epsilon = 1e-12);
        assert!(l <= h);
        // j = 0 is always 1, even at x = 0
        assert_eq!(weight_coeff(0.0, 0, WeightScheme::Hamming).unwrap(), 1.0);
        assert_eq!(weight_coeff(0.0, 2, WeightScheme::Linear).unwrap(), 0.0);
        assert!(weight_coeff(1.5, 0, WeightScheme::Hamming).is_err());
    }

    #[test]
    fn weight_monotone_in_x() {
        for j in 1..6u64 {
            let mut prev = 0.0;
            for step in 0..=10 {
                let x = step as f64 / 10.0;
                let w = weight_coeff(x, j, WeightScheme::Hamming).unwrap();
                assert!(w >= prev - 1e-15);
                prev = w;
            }
        }
    }

    #[test]
    fn lemma1_edges_and_domain() {
        let t = tol();
        for v in [0.0, 0.3, 1.0] {
            let at_x1 = lemma1_holds(1.0, v, &t).unwrap();
            assert!(at_x1.holds);
            assert_abs_diff_eq!(at_x1.residual, 0.0, epsilon = 1e-12);
            let at_t1 = lemma1_holds(v, 1.0, &t).unwrap();
            assert!(at_t1.holds);
            assert_abs_diff_eq!(at_t1.residual, 0.0, epsilon = 1e-12);
        }
        assert!(lemma1_holds(-0.1, 0.5, &t).is_err());
        assert!(lemma1_holds(0.5, 1.1, &t).is_err());
    }

    #[test]
    fn lemma1_grid_101() {
        let t = tol();
        let mut min_residual = f64::INFINITY;
        for xi in 0..=100 {
            for ti in 0..=100 {
                let out = lemma1_holds(xi as f64 / 100.0, ti as f64 / 100.0, &t).unwrap();
                assert!(out.holds);
                min_residual = min_residual.min(out.residual);
            }
        }
        assert!(min_residual >= -1e-12);
    }

    #[test]
    fn theorem1_gsd_slacks_match_paper() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let psi = gsd_paper();
        let r1 = check_theorem1(&psi, &part, 1.0, LhsMode::PureConcurrence, &t).unwrap();
        assert!(r1.holds);
        assert_abs_diff_eq!(r1.slack, 0.10938979974117846, epsilon = 1e-9);
        let r2 = check_theorem1(&psi, &part, 2.0, LhsMode::PureConcurrence, &t).unwrap();
        assert_abs_diff_eq!(r2.slack, 1.0 / 6.0, epsilon = 1e-9);
    }

    #[test]
    fn theorem1_product_state_trivial() {
        let t = tol();
        let psi = PureState::ground(vec![2, 2, 2]).unwrap();
        let part = PartitionSpec::global(0, 3).unwrap();
        for alpha in [0.0, 0.7, 2.0] {
            let r = check_theorem1(&psi, &part, alpha, LhsMode::BlockSum, &t).unwrap();
            assert!(r.holds);
            assert_abs_diff_eq!(r.lhs, 0.0, epsilon = 1e-12);
            assert!(r.slack >= 0.0);
            assert_abs_diff_eq!(r.slack, r.rhs, epsilon = 1e-15);
        }
    }

    #[test]
    fn theorem1_rejects_bad_alpha() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        assert!(check_theorem1(&w3(), &part, 2.5, LhsMode::PureConcurrence, &t).is_err());
    }

    #[test]
    fn theorem2_w4_condition_gates() {
        let t = tol();
        let part = PartitionSpec::global(0, 4).unwrap();
        let r6 = 1.0 / 6f64.sqrt();
        let r2 = 1.0 / 2f64.sqrt();
        // b-heavy: condition b^2 >= c^2 + d^2 holds
        let good = check_theorem2(
            &w4(r6, r2, r6, r6),
            &part,
            1.0,
            LhsMode::PureConcurrence,
            TermOrder::Given,
            &t,
        )
        .unwrap();
        assert_eq!(good.condition_status, Some(true));
        assert!(good.holds);
        // c-heavy: fails in the given order
        let bad = check_theorem2(
            &w4(r6, r6, r2, r6),
            &part,
            1.0,
            LhsMode::PureConcurrence,
            TermOrder::Given,
            &t,
        )
        .unwrap();
        assert_eq!(bad.condition_status, Some(false));
    }

    #[test]
    fn theorem2_not_above_theorem1_when_condition_true() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        for seed in 0..40u64 {
            let psi = haar_random_pure(&[2, 2, 2], 9000 + seed).unwrap();
            for &alpha in &[0.5, 1.0, 1.5, 2.0] {
                let r1 =
                    check_theorem1(&psi, &part, alpha, LhsMode::PureConcurrence, &t).unwrap();
                let r2 = check_theorem2(
                    &psi,
                    &part,
                    alpha,
                    LhsMode::PureConcurrence,
                    TermOrder::SortedDescending,
                    &t,
                )
                .unwrap();
                if r2.condition_status == Some(true) {
                    assert!(r2.rhs <= r1.rhs + 1e-12);
                    for (a, b) in r2.terms.iter().zip(&r1.terms) {
                        assert!(a.contribution <= b.contribution + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn theorem3_w3_exact_terms() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![2.0 / 3.0, 2.0 / 3.0]);
        let r = check_theorem3(&w3(), &part, 0.5, &source, &t).unwrap();
        assert!(r.holds);
        assert!(!r.tentative);
        assert_abs_diff_eq!(r.lhs_raw, 3f64.log2() - 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            r.rhs,
            2f64.sqrt() * (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn theorem3_beta1_is_eq18() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![2.0 / 3.0, 2.0 / 3.0]);
        let th3 = check_theorem3(&w3(), &part, 1.0, &source, &t).unwrap();
        let eq18 = check_baseline(
            &w3(),
            &part,
            Baseline::EaEq18,
            LhsMode::PureConcurrence,
            &source,
            &t,
        )
        .unwrap();
        assert_abs_diff_eq!(th3.rhs, eq18.rhs, epsilon = 1e-12);
        assert_abs_diff_eq!(th3.rhs, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn theorem4_two_partner_equals_theorem3() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![0.7, 0.4]);
        let th3 = check_theorem3(&w3(), &part, 0.6, &source, &t).unwrap();
        let th4 = check_theorem4(&w3(), &part, 0.6, &source, TermOrder::Given, &t).unwrap();
        // w_H(0) = 0 and w_H(1) = 1, so both weight sequences agree for N = 2
        assert_abs_diff_eq!(th3.rhs, th4.rhs, epsilon = 1e-12);
        assert_eq!(th4.condition_status, Some(true));
    }

    #[test]
    fn eq19_w3_values() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![2.0 / 3.0, 2.0 / 3.0]);
        let r = check_eq19_prior(&w3(), &part, 0.5, &source, &t).unwrap();
        assert_abs_diff_eq!(r.rhs, 1.5 * (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        // theorem 3 marginal below prior bound strictly inside (0,1)
        let th3 = check_theorem3(&w3(), &part, 0.5, &source, &t).unwrap();
        assert!(th3.rhs < r.rhs);
        for beta in [0.0, 1.0] {
            let a = check_theorem3(&w3(), &part, beta, &source, &t).unwrap();
            let b = check_eq19_prior(&w3(), &part, beta, &source, &t).unwrap();
            assert_abs_diff_eq!(a.rhs, b.rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn baseline_ckw_ghz() {
        let t = tol();
        let s = 1.0 / 2f64.sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0] = C64::new(s, 0.0);
        amps[7] = C64::new(s, 0.0);
        let ghz = PureState::new(amps, vec![2, 2, 2], &t).unwrap();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![]);
        let r = check_baseline(&ghz, &part, Baseline::CkwEq1, LhsMode::PureConcurrence, &source, &t);
        // injected term count mismatch only matters for eq18; CKW ignores it
        let r = r.unwrap();
        assert_eq!(r.direction, Direction::LowerBound);
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rhs, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.slack, 1.0, epsilon = 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn baseline_eq4_gsd_slack() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![0.0, 0.0]);
        let r = check_baseline(
            &gsd_paper(),
            &part,
            Baseline::TauSqEq4,
            LhsMode::PureConcurrence,
            &source,
            &t,
        )
        .unwrap();
        assert_abs_diff_eq!(r.slack, 1.0 / 6.0, epsilon = 1e-9);
        assert_eq!(r.inequality_id, InequalityId::TauSqEq4);
    }

    #[test]
    fn baseline_qubit_only_guard() {
        let t = tol();
        let psi = haar_random_pure(&[2, 2, 3], 4).unwrap();
        let part = PartitionSpec::global(0, 3).unwrap();
        let source = EaSource::Injected(vec![0.0, 0.0]);
        assert!(check_baseline(&psi, &part, Baseline::CkwEq1, LhsMode::PureConcurrence, &source, &t).is_err());
        assert!(check_baseline(&psi, &part, Baseline::DualCaEq2, LhsMode::PureConcurrence, &source, &t).is_err());
        assert!(check_baseline(&psi, &part, Baseline::TauSqEq4, LhsMode::PureConcurrence, &source, &t).is_ok());
    }

    #[test]
    fn sorting_invariance_of_reports() {
        let t = tol();
        let psi = haar_random_pure(&[2, 2, 2, 2], 33).unwrap();
        let base = check_theorem1(
            &psi,
            &PartitionSpec::global(0, 4).unwrap(),
            0.8,
            LhsMode::PureConcurrence,
            &t,
        )
        .unwrap();
        // permuting partner labels must leave lhs, rhs and slack unchanged
        let part = PartitionSpec::new(0, vec![3, 1, 2], 4).unwrap();
        let permuted = check_theorem1(&psi, &part, 0.8, LhsMode::PureConcurrence, &t).unwrap();
        assert_abs_diff_eq!(base.lhs, permuted.lhs, epsilon = 1e-12);
        assert_abs_diff_eq!(base.rhs, permuted.rhs, epsilon = 1e-12);
        assert_abs_diff_eq!(base.slack, permuted.slack, epsilon = 1e-12);
    }

    #[test]
    fn padding_gsd_and_w3() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        assert!(padding_invariance_test(&gsd_paper(), &part, &[2], &t).unwrap());
        assert!(padding_invariance_test(&w3(), &part, &[2, 2], &t).unwrap());
    }

    #[test]
    fn corollary1_weights_do_not_exceed_plain_sum() {
        let t = tol();
        let part = PartitionSpec::global(0, 3).unwrap();
        for seed in 0..20u64 {
            let psi = haar_random_pure(&[2, 2, 2], 700 + seed).unwrap();
            for &alpha in &[0.3, 1.0, 1.7] {
                let r = check_theorem1(&psi, &part, alpha, LhsMode::PureConcurrence, &t).unwrap();
                let plain: f64 = r.terms.iter().map(|term| term.value).sum();
                assert!(r.rhs <= plain + 1e-12);
                for term in &r.terms {
                    assert!((0.0..=1.0 + 1e-12).contains(&term.weight));
                }
            }
        }
    }
}
