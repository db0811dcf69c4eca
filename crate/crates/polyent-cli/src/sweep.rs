//! `polyent sweep-beta`: sweep the EOA exponent and write the marginal
//! bounds of the weighted inequality and the prior bound as CSV.
//!
//! Columns: `beta, lhs_ea, rhs_th3, rhs_eq19, marginal_th3, marginal_eq19`
//! where the marginals subtract the unpowered EOA of the global cut
//! (the quantity the comparison figure plots).

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use std::fs;
use std::path::PathBuf;

use polyent_core::polygamy::{check_eq19_prior, check_theorem3};

use crate::check::{resolve_ea_source, EaSourceArg};
use crate::source::{parse_cut, parse_state_source};
use crate::output::format_sig9;
use crate::CommonArgs;

#[derive(Args)]
pub struct SweepArgs {
    /// State source (see --help for the mini-syntax)
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    /// Number of grid intervals (steps + 1 rows)
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Cut like 'A|BC'; defaults to A against everything else
    #[arg(long)]
    pub cut: Option<String>,
    #[arg(long, value_enum, default_value_t = EaSourceArg::Auto)]
    pub ea_source: EaSourceArg,
    /// Injected EOA terms, comma separated, one per partner
    #[arg(long)]
    pub ea_terms: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn run(args: &SweepArgs) -> Result<i32> {
    let csv = render(args)?;
    fs::write(&args.out, csv).with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(0)
}

pub fn render(args: &SweepArgs) -> Result<String> {
    if !(0.0..=1.0).contains(&args.from) || !(0.0..=1.0).contains(&args.to) || args.from >= args.to
    {
        bail!("need 0 <= from < to <= 1");
    }
    if args.steps == 0 {
        bail!("steps must be positive");
    }
    let tol = args.common.tolerances()?;
    let source = parse_state_source(&args.state, args.common.seed)?;
    let psi = source.build(&tol)?;
    let cut = parse_cut(args.cut.as_deref(), psi.subsystems())?;
    let ea = resolve_ea_source(
        args.ea_source,
        args.ea_terms.as_deref(),
        source.recipe(),
        &cut,
        &args.common,
    )?;

    let mut csv = String::from("beta,lhs_ea,rhs_th3,rhs_eq19,marginal_th3,marginal_eq19\n");
    for i in 0..=args.steps {
        let beta = args.from + (args.to - args.from) * i as f64 / args.steps as f64;
        let th3 = check_theorem3(&psi, &cut, beta, &ea, &tol).map_err(|e| anyhow!("{e}"))?;
        let eq19 = check_eq19_prior(&psi, &cut, beta, &ea, &tol).map_err(|e| anyhow!("{e}"))?;
        let lhs_ea = th3.lhs_raw;
        let row = [
            beta,
            lhs_ea,
            th3.rhs,
            eq19.rhs,
            th3.rhs - lhs_ea,
            eq19.rhs - lhs_ea,
        ];
        let rendered: Vec<String> = row.iter().map(|&v| format_sig9(v)).collect();
        csv.push_str(&rendered.join(","));
        csv.push('\n');
    }
    Ok(csv)
}
