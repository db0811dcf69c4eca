//! `polyent measure`: one measure of one state, printed as JSON.

use anyhow::{anyhow, bail, Result};
use clap::Args;

use polyent_core::measures::{self, MeasureMode, MeasureResult};
use polyent_core::roof::{maximize_assistance, Objective};
use polyent_core::state::{PartitionSpec, PureState};
use polyent_core::Tolerances;

use crate::output::Envelope;
use crate::source::{parse_cut, parse_state_source};
use crate::CommonArgs;

#[derive(Args)]
pub struct MeasureArgs {
    /// State source (see --help for the mini-syntax)
    #[arg(long)]
    pub state: String,
    /// Measure id: entropy | concurrence | tau-a | ca | wootters | ea
    #[arg(long)]
    pub measure: String,
    /// Cut like 'A|BC'; defaults to A against everything else
    #[arg(long)]
    pub cut: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn run(args: &MeasureArgs) -> Result<i32> {
    let tol = args.common.tolerances()?;
    let source = parse_state_source(&args.state, args.common.seed)?;
    let psi = source.build(&tol)?;
    let cut = parse_cut(args.cut.as_deref(), psi.subsystems())?;
    let result = evaluate(&psi, &cut, &args.measure, &args.common, &tol)?;
    let envelope = Envelope::new(args.common.seed, &tol, result);
    println!("{}", serde_json::to_string_pretty(&envelope)?);
    Ok(0)
}

/// Evaluate a measure id on `psi` across `cut`. Pair measures reduce to the
/// focus plus the single partner; `tau-a` and `ea` merge all partners into
/// one side.
pub fn evaluate(
    psi: &PureState,
    cut: &PartitionSpec,
    measure: &str,
    common: &CommonArgs,
    tol: &Tolerances,
) -> Result<MeasureResult> {
    let covers = cut.covers_all(psi.subsystems());
    match measure {
        "entropy" => {
            let value =
                measures::von_neumann_entropy(&psi.marginal(&[cut.focus]).map_err(err)?, tol)
                    .map_err(err)?;
            Ok(plain(value))
        }
        "concurrence" => {
            if !covers {
                bail!("concurrence needs a cut covering the whole state");
            }
            measures::concurrence_pure(psi, cut, tol).map_err(err)
        }
        "tau-a" | "tau_a" => {
            if covers {
                // exact pure-state route
                measures::tau_a_pure(psi, cut, tol).map_err(err)
            } else {
                let rho = reduced_cut(psi, cut)?;
                measures::tau_a(&rho, tol).map_err(err)
            }
        }
        "ca" => {
            let rho = reduced_cut(psi, cut)?;
            measures::ca_two_qubit(&rho, tol).map_err(err)
        }
        "wootters" => {
            let rho = reduced_cut(psi, cut)?;
            measures::concurrence_two_qubit(&rho, tol).map_err(err)
        }
        "ea" => {
            if covers {
                let value = measures::entanglement_pure(psi, cut, tol).map_err(err)?;
                return Ok(plain(value));
            }
            let rho = reduced_cut(psi, cut)?;
            let settings = common.optimizer_settings();
            let r = maximize_assistance(&rho, Objective::EntropyOfMarginal, &settings, tol)
                .map_err(err)?;
            Ok(MeasureResult {
                value: r.value,
                mode: MeasureMode::OptimizerLowerBound,
                diagnostics: vec![
                    polyent_core::measures::Diagnostic {
                        label: "restarts".into(),
                        value: settings.restarts as f64,
                    },
                    polyent_core::measures::Diagnostic {
                        label: "hit-iteration-cap".into(),
                        value: r.hit_iteration_cap as u8 as f64,
                    },
                ],
            })
        }
        other => bail!("unknown measure '{other}'"),
    }
}

/// Reduced state on focus + partners, focus first, partners merged.
fn reduced_cut(
    psi: &PureState,
    cut: &PartitionSpec,
) -> Result<polyent_core::state::DensityMatrix> {
    if cut.partners.len() == 1 {
        return psi
            .density()
            .reduced_pair(cut.focus, cut.partners[0])
            .map_err(err);
    }
    let mut keep = vec![cut.focus];
    keep.extend_from_slice(&cut.partners);
    keep.sort_unstable();
    let reduced = psi.density().partial_trace(&keep).map_err(err)?;
    // place the focus first, then merge all partners into one factor
    let focus_pos = keep.iter().position(|&i| i == cut.focus).unwrap();
    reduced.as_bipartition(focus_pos).map_err(err)
}

fn plain(value: f64) -> MeasureResult {
    MeasureResult {
        value,
        mode: MeasureMode::ExactClosedForm,
        diagnostics: vec![],
    }
}

fn err(e: polyent_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}
