//! `polyent check`: run one inequality check and print the report.
//!
//! Exit code contract: 0 when the bound holds, 2 on a confirmed violation,
//! 3 on a tentative one (optimizer-backed right-hand side).

use anyhow::{anyhow, bail, Result};
use clap::Args;

use polyent_core::polygamy::{
    check_baseline, check_eq19_prior, check_theorem1, check_theorem2, check_theorem3,
    check_theorem4, Baseline, EaSource, LhsMode, PolygamyReport, TermOrder,
};
use polyent_core::state::{PartitionSpec, PureState};
use polyent_core::states::{MeasureKind, StateRecipe};
use polyent_core::Tolerances;

use crate::output::Envelope;
use crate::source::{parse_cut, parse_state_source, StateSource};
use crate::CommonArgs;

#[derive(Args)]
pub struct CheckArgs {
    /// State source (see --help for the mini-syntax)
    #[arg(long)]
    pub state: String,
    /// Inequality id: th1 | th2 | th3 | th4 | eq19 | eq1 | eq2 | eq4 | eq18
    #[arg(long)]
    pub ineq: String,
    /// Exponent for th1/th2 (range [0, 2])
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Exponent for th3/th4/eq19 (range [0, 1])
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Left-hand side of the global cut for tau bounds
    #[arg(long, value_enum, default_value_t = LhsModeArg::PureConcurrence)]
    pub lhs_mode: LhsModeArg,
    /// Partner-term order for the condition-gated bounds (th2/th4)
    #[arg(long, value_enum, default_value_t = OrderArg::Given)]
    pub order: OrderArg,
    /// Where EOA partner terms come from (th3/th4/eq19/eq18)
    #[arg(long, value_enum, default_value_t = EaSourceArg::Auto)]
    pub ea_source: EaSourceArg,
    /// Injected EOA terms, comma separated, one per partner
    #[arg(long)]
    pub ea_terms: Option<String>,
    /// Cut like 'A|BC'; defaults to A against everything else
    #[arg(long)]
    pub cut: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LhsModeArg {
    BlockSum,
    PureConcurrence,
}

impl From<LhsModeArg> for LhsMode {
    fn from(v: LhsModeArg) -> Self {
        match v {
            LhsModeArg::BlockSum => LhsMode::BlockSum,
            LhsModeArg::PureConcurrence => LhsMode::PureConcurrence,
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderArg {
    Given,
    Sorted,
}

impl From<OrderArg> for TermOrder {
    fn from(v: OrderArg) -> Self {
        match v {
            OrderArg::Given => TermOrder::Given,
            OrderArg::Sorted => TermOrder::SortedDescending,
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EaSourceArg {
    /// Closed-form recipe values when the family has them, optimizer
    /// otherwise
    Auto,
    Optimizer,
    /// Values passed via --ea-terms
    Values,
}

pub fn run(args: &CheckArgs) -> Result<i32> {
    let tol = args.common.tolerances()?;
    let source = parse_state_source(&args.state, args.common.seed)?;
    let psi = source.build(&tol)?;
    let cut = parse_cut(args.cut.as_deref(), psi.subsystems())?;
    let report = dispatch(args, &source, &psi, &cut, &tol)?;
    let code = exit_code(&report);
    let envelope = Envelope::new(args.common.seed, &tol, report);
    println!("{}", serde_json::to_string_pretty(&envelope)?);
    Ok(code)
}

pub fn exit_code(report: &PolygamyReport) -> i32 {
    if report.holds {
        0
    } else if report.tentative {
        3
    } else {
        2
    }
}

fn dispatch(
    args: &CheckArgs,
    source: &StateSource,
    psi: &PureState,
    cut: &PartitionSpec,
    tol: &Tolerances,
) -> Result<PolygamyReport> {
    let lhs_mode: LhsMode = args.lhs_mode.into();
    let order: TermOrder = args.order.into();
    let ea = resolve_ea_source(
        args.ea_source,
        args.ea_terms.as_deref(),
        source.recipe(),
        cut,
        &args.common,
    )?;
    let report = match args.ineq.as_str() {
        "th1" => check_theorem1(psi, cut, args.alpha, lhs_mode, tol),
        "th2" => check_theorem2(psi, cut, args.alpha, lhs_mode, order, tol),
        "th3" => check_theorem3(psi, cut, args.beta, &ea, tol),
        "th4" => check_theorem4(psi, cut, args.beta, &ea, order, tol),
        "eq19" => check_eq19_prior(psi, cut, args.beta, &ea, tol),
        "eq1" | "ckw" => check_baseline(psi, cut, Baseline::CkwEq1, lhs_mode, &ea, tol),
        "eq2" | "dual-ca" => check_baseline(psi, cut, Baseline::DualCaEq2, lhs_mode, &ea, tol),
        "eq4" | "tau-sq" => check_baseline(psi, cut, Baseline::TauSqEq4, lhs_mode, &ea, tol),
        "eq18" | "ea18" => check_baseline(psi, cut, Baseline::EaEq18, lhs_mode, &ea, tol),
        other => bail!("unknown inequality '{other}'"),
    };
    report.map_err(|e| anyhow!("{e}"))
}

/// Resolve the EOA term source. `Auto` prefers closed-form recipe values
/// when the family provides one for every partner of the cut.
pub fn resolve_ea_source(
    choice: EaSourceArg,
    terms: Option<&str>,
    recipe: Option<&StateRecipe>,
    cut: &PartitionSpec,
    common: &CommonArgs,
) -> Result<EaSource> {
    match choice {
        EaSourceArg::Values => {
            let text = terms.ok_or_else(|| anyhow!("--ea-source values needs --ea-terms"))?;
            let vals: Vec<f64> = text
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| anyhow!("cannot parse EOA term '{t}'"))
                })
                .collect::<Result<_>>()?;
            Ok(EaSource::Injected(vals))
        }
        EaSourceArg::Optimizer => Ok(EaSource::Optimizer(common.optimizer_settings())),
        EaSourceArg::Auto => {
            if let Some(recipe) = recipe {
                if let Some(vals) = recipe_ea_terms(recipe, cut) {
                    return Ok(EaSource::Injected(vals));
                }
            }
            Ok(EaSource::Optimizer(common.optimizer_settings()))
        }
    }
}

/// Closed-form EOA pair values of a recipe, in partner order of the cut,
/// when the recipe covers the cut completely (focus 0 only).
pub fn recipe_ea_terms(recipe: &StateRecipe, cut: &PartitionSpec) -> Option<Vec<f64>> {
    if cut.focus != 0 {
        return None;
    }
    let expected = recipe.expected_values();
    cut.partners
        .iter()
        .map(|&p| {
            expected
                .iter()
                .find(|e| e.kind == MeasureKind::EaPair && e.partner == p)
                .map(|e| e.value)
        })
        .collect()
}
