//! `polyent campaign`: randomized verification over Haar ensembles.
//!
//! Deterministic given the master seed: state i uses the derived seed
//! `(master, i)`. Items run on a small thread pool (capped by
//! POLYENT_THREADS); results are collected per index, so the summary and the
//! report log never depend on completion order.

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use polyent_core::polygamy::{
    check_baseline, check_theorem1, check_theorem2, Baseline, EaSource, LhsMode, PolygamyReport,
    TermOrder,
};
use polyent_core::state::{derive_seed, haar_random_pure, PartitionSpec};
use polyent_core::Tolerances;

use crate::check::LhsModeArg;
use crate::output::{version, TOOL};
use crate::source::parse_dims;
use crate::CommonArgs;

#[derive(Args)]
pub struct CampaignArgs {
    /// Subsystem dimensions, e.g. 2,2,2
    #[arg(long)]
    pub dims: String,
    /// Number of Haar states
    #[arg(long)]
    pub count: usize,
    /// Exponent grid for th1/th2
    #[arg(long, default_value = "0.5,1,1.5,2")]
    pub alphas: String,
    /// Inequalities to run: any of th1, th2, eq1, eq2, eq4
    #[arg(long, default_value = "th1,eq2,eq4")]
    pub ineqs: String,
    /// Left-hand side of the global cut for tau bounds
    #[arg(long, value_enum, default_value_t = LhsModeArg::PureConcurrence)]
    pub lhs_mode: LhsModeArg,
    /// Summary JSON output path
    #[arg(long)]
    pub out: PathBuf,
    /// Optional JSONL log with one report per check
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityStats {
    pub checked: usize,
    pub held: usize,
    pub tentative_violations: usize,
    pub confirmed_violations: usize,
    pub min_slack: f64,
    pub mean_slack: f64,
}

#[derive(Debug, Serialize)]
pub struct CampaignEnvironment {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub count: usize,
    pub exponents: Vec<f64>,
    pub lhs_mode: LhsMode,
    pub inequalities: Vec<String>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Serialize)]
pub struct CampaignSummary {
    pub environment: CampaignEnvironment,
    pub inequalities: BTreeMap<String, InequalityStats>,
}

#[derive(Debug, Serialize)]
struct LogLine<'a> {
    index: usize,
    seed: u64,
    inequality: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    report: &'a PolygamyReport,
}

pub struct CheckOutcome {
    pub inequality: &'static str,
    pub exponent: Option<f64>,
    pub report: PolygamyReport,
}

pub struct StateResult {
    pub index: usize,
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

pub fn run(args: &CampaignArgs) -> Result<i32> {
    let tol = args.common.tolerances()?;
    let dims = parse_dims(&args.dims)?;
    if args.count == 0 {
        bail!("count must be >= 1");
    }
    let alphas: Vec<f64> = args
        .alphas
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("cannot parse alpha '{t}'"))
        })
        .collect::<Result<_>>()?;
    if alphas.iter().any(|&a| !(0.0..=2.0).contains(&a)) {
        bail!("alphas must lie in [0, 2]");
    }
    let ineqs: Vec<String> = args.ineqs.split(',').map(|s| s.trim().to_string()).collect();
    for ineq in &ineqs {
        if !["th1", "th2", "eq1", "eq2", "eq4"].contains(&ineq.as_str()) {
            bail!("campaign inequality must be one of th1, th2, eq1, eq2, eq4 (got '{ineq}')");
        }
    }
    let lhs_mode: LhsMode = args.lhs_mode.into();

    let results = run_states(
        &dims,
        args.count,
        args.common.seed,
        &alphas,
        &ineqs,
        lhs_mode,
        &tol,
    )?;

    let summary = summarize(args, &dims, &alphas, &ineqs, lhs_mode, &tol, &results);
    fs::write(&args.out, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("cannot write {}", args.out.display()))?;

    if let Some(log_path) = &args.log {
        let mut log = String::new();
        for state in &results {
            for outcome in &state.outcomes {
                let line = LogLine {
                    index: state.index,
                    seed: state.seed,
                    inequality: outcome.inequality,
                    exponent: outcome.exponent,
                    report: &outcome.report,
                };
                log.push_str(&serde_json::to_string(&line)?);
                log.push('\n');
            }
        }
        fs::write(log_path, log).with_context(|| format!("cannot write {}", log_path.display()))?;
    }
    Ok(0)
}

/// Run every check for every sampled state, in parallel over disjoint index
/// ranges.
pub fn run_states(
    dims: &[usize],
    count: usize,
    master_seed: u64,
    alphas: &[f64],
    ineqs: &[String],
    lhs_mode: LhsMode,
    tol: &Tolerances,
) -> Result<Vec<StateResult>> {
    let threads = thread_count(count);
    let chunk = count.div_ceil(threads);
    let mut results = std::thread::scope(|scope| -> Result<Vec<StateResult>> {
        let mut handles = Vec::new();
        for t in 0..threads {
            let start = t * chunk;
            let end = ((t + 1) * chunk).min(count);
            if start >= end {
                break;
            }
            handles.push(scope.spawn(move || -> Result<Vec<StateResult>> {
                (start..end)
                    .map(|i| run_one_state(dims, master_seed, i, alphas, ineqs, lhs_mode, tol))
                    .collect()
            }));
        }
        let mut all = Vec::with_capacity(count);
        for h in handles {
            all.extend(h.join().map_err(|_| anyhow!("campaign worker panicked"))??);
        }
        Ok(all)
    })?;
    // index order keeps summaries and logs independent of scheduling
    results.sort_by_key(|r| r.index);
    Ok(results)
}

fn run_one_state(
    dims: &[usize],
    master_seed: u64,
    index: usize,
    alphas: &[f64],
    ineqs: &[String],
    lhs_mode: LhsMode,
    tol: &Tolerances,
) -> Result<StateResult> {
    let seed = derive_seed(master_seed, index as u64);
    let psi = haar_random_pure(dims, seed).map_err(|e| anyhow!("{e}"))?;
    let part = PartitionSpec::global(0, dims.len()).map_err(|e| anyhow!("{e}"))?;
    let dummy_ea = EaSource::Injected(vec![0.0; part.partners.len()]);
    let mut outcomes = Vec::new();
    for ineq in ineqs {
        match ineq.as_str() {
            "th1" => {
                for &alpha in alphas {
                    let report = check_theorem1(&psi, &part, alpha, lhs_mode, tol)
                        .map_err(|e| anyhow!("{e}"))?;
                    outcomes.push(CheckOutcome {
                        inequality: "th1",
                        exponent: Some(alpha),
                        report,
                    });
                }
            }
            "th2" => {
                for &alpha in alphas {
                    let report =
                        check_theorem2(&psi, &part, alpha, lhs_mode, TermOrder::Given, tol)
                            .map_err(|e| anyhow!("{e}"))?;
                    outcomes.push(CheckOutcome {
                        inequality: "th2",
                        exponent: Some(alpha),
                        report,
                    });
                }
            }
            "eq1" => {
                let report =
                    check_baseline(&psi, &part, Baseline::CkwEq1, lhs_mode, &dummy_ea, tol)
                        .map_err(|e| anyhow!("{e}"))?;
                outcomes.push(CheckOutcome {
                    inequality: "eq1",
                    exponent: None,
                    report,
                });
            }
            "eq2" => {
                let report =
                    check_baseline(&psi, &part, Baseline::DualCaEq2, lhs_mode, &dummy_ea, tol)
                        .map_err(|e| anyhow!("{e}"))?;
                outcomes.push(CheckOutcome {
                    inequality: "eq2",
                    exponent: None,
                    report,
                });
            }
            "eq4" => {
                let report =
                    check_baseline(&psi, &part, Baseline::TauSqEq4, lhs_mode, &dummy_ea, tol)
                        .map_err(|e| anyhow!("{e}"))?;
                outcomes.push(CheckOutcome {
                    inequality: "eq4",
                    exponent: None,
                    report,
                });
            }
            other => bail!("unsupported campaign inequality '{other}'"),
        }
    }
    Ok(StateResult {
        index,
        seed,
        outcomes,
    })
}

fn thread_count(count: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("POLYENT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(available);
    cap.clamp(1, count.max(1))
}

fn summarize(
    args: &CampaignArgs,
    dims: &[usize],
    alphas: &[f64],
    ineqs: &[String],
    lhs_mode: LhsMode,
    tol: &Tolerances,
    results: &[StateResult],
) -> CampaignSummary {
    CampaignSummary {
        environment: CampaignEnvironment {
            tool: TOOL.to_string(),
            version: version().to_string(),
            seed: args.common.seed,
            dims: dims.to_vec(),
            count: args.count,
            exponents: alphas.to_vec(),
            lhs_mode,
            inequalities: ineqs.to_vec(),
            tolerances: tol.clone(),
        },
        inequalities: aggregate(results),
    }
}

/// Reduce all reports into per-inequality statistics.
pub fn aggregate(results: &[StateResult]) -> BTreeMap<String, InequalityStats> {
    let mut map: BTreeMap<String, InequalityStats> = BTreeMap::new();
    for state in results {
        for outcome in &state.outcomes {
            let stats = map
                .entry(outcome.inequality.to_string())
                .or_insert(InequalityStats {
                    checked: 0,
                    held: 0,
                    tentative_violations: 0,
                    confirmed_violations: 0,
                    min_slack: f64::INFINITY,
                    mean_slack: 0.0,
                });
            stats.checked += 1;
            if outcome.report.holds {
                stats.held += 1;
            } else if outcome.report.tentative {
                stats.tentative_violations += 1;
            } else {
                stats.confirmed_violations += 1;
            }
            stats.min_slack = stats.min_slack.min(outcome.report.slack);
            stats.mean_slack += outcome.report.slack;
        }
    }
    for stats in map.values_mut() {
        if stats.checked > 0 {
            stats.mean_slack /= stats.checked as f64;
        }
    }
    map
}
