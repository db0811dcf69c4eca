//! Parsers for the `family:params` state mini-syntax, the `A|BC` cut
//! syntax and the state JSON file format.

use anyhow::{anyhow, bail, Context, Result};
use std::fs;
use std::path::Path;

use polyent_core::state::{PartitionSpec, PureState};
use polyent_core::states::StateRecipe;
use polyent_core::{Tolerances, C64};

/// A state source: a builtin recipe or an amplitude file.
#[derive(Debug, Clone)]
pub enum StateSource {
    Recipe(StateRecipe),
    File(String),
}

/// Parse `family:params`. Values accept `rN` sugar for `1/sqrt(N)`.
///
/// Families: `w3`, `gsd3:l0,l1,l2,l3,l4[,phase]`, `w4:a,b,c,d`,
/// `ghz:parties[,dim]`, `haar:d0,d1,...`, `product:d0,d1,...`,
/// `file:path.json`.
pub fn parse_state_source(spec: &str, seed: u64) -> Result<StateSource> {
    let (family, params) = match spec.split_once(':') {
        Some((f, p)) => (f, p),
        None => (spec, ""),
    };
    let recipe = match family {
        "w3" => {
            if !params.is_empty() {
                bail!("w3 takes no parameters");
            }
            StateRecipe::W3
        }
        "gsd3" => {
            let vals = parse_reals(params)?;
            if vals.len() != 5 && vals.len() != 6 {
                bail!("gsd3 needs 5 coefficients plus an optional phase");
            }
            StateRecipe::Gsd3 {
                lambdas: [vals[0], vals[1], vals[2], vals[3], vals[4]],
                phase: vals.get(5).copied().unwrap_or(0.0),
            }
        }
        "w4" => {
            let vals = parse_reals(params)?;
            if vals.len() != 4 {
                bail!("w4 needs exactly a,b,c,d");
            }
            StateRecipe::W4 {
                a: vals[0],
                b: vals[1],
                c: vals[2],
                d: vals[3],
            }
        }
        "ghz" => {
            let vals = parse_dims(params)?;
            match vals.as_slice() {
                [parties] => StateRecipe::Ghz {
                    parties: *parties,
                    dim: 2,
                },
                [parties, dim] => StateRecipe::Ghz {
                    parties: *parties,
                    dim: *dim,
                },
                _ => bail!("ghz takes parties[,dim]"),
            }
        }
        "haar" => StateRecipe::Haar {
            dims: parse_dims(params)?,
            seed,
        },
        "product" => StateRecipe::Product {
            dims: parse_dims(params)?,
        },
        "file" => return Ok(StateSource::File(params.to_string())),
        other => bail!("unknown state family '{other}'"),
    };
    Ok(StateSource::Recipe(recipe))
}

impl StateSource {
    pub fn build(&self, tol: &Tolerances) -> Result<PureState> {
        match self {
            StateSource::Recipe(recipe) => recipe
                .build(tol)
                .map_err(|e| anyhow!("cannot build state: {e}")),
            StateSource::File(path) => load_state_file(Path::new(path), tol),
        }
    }

    pub fn recipe(&self) -> Option<&StateRecipe> {
        match self {
            StateSource::Recipe(r) => Some(r),
            StateSource::File(_) => None,
        }
    }
}

/// `rN` sugar (`r2` = 1/sqrt(2), `r6` = 1/sqrt(6), ...) or a plain float.
fn parse_value(token: &str) -> Result<f64> {
    let token = token.trim();
    if let Some(n) = token.strip_prefix('r') {
        if let Ok(k) = n.parse::<u32>() {
            if k == 0 {
                bail!("r0 is not a value");
            }
            return Ok(1.0 / (k as f64).sqrt());
        }
    }
    token
        .parse::<f64>()
        .with_context(|| format!("cannot parse value '{token}'"))
}

fn parse_reals(params: &str) -> Result<Vec<f64>> {
    if params.trim().is_empty() {
        bail!("missing parameters");
    }
    params.split(',').map(parse_value).collect()
}

pub fn parse_dims(params: &str) -> Result<Vec<usize>> {
    if params.trim().is_empty() {
        bail!("missing dimension list");
    }
    params
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("cannot parse dimension '{t}'"))
        })
        .collect()
}

/// Parse cut syntax `A|BC`: focus letter left, partner letters right.
/// Letters map A -> subsystem 0, B -> 1, ...; when `None`, the global cut
/// `A | rest` is used.
pub fn parse_cut(cut: Option<&str>, subsystems: usize) -> Result<PartitionSpec> {
    let Some(cut) = cut else {
        return PartitionSpec::global(0, subsystems)
            .map_err(|e| anyhow!("cannot build default cut: {e}"));
    };
    let (left, right) = cut
        .split_once('|')
        .ok_or_else(|| anyhow!("cut must look like 'A|BC'"))?;
    let letter_index = |ch: char| -> Result<usize> {
        if ch.is_ascii_uppercase() {
            Ok((ch as u8 - b'A') as usize)
        } else {
            bail!("cut labels are uppercase letters, got '{ch}'")
        }
    };
    let left: Vec<usize> = left.chars().map(letter_index).collect::<Result<_>>()?;
    if left.len() != 1 {
        bail!("exactly one focus subsystem expected left of '|'");
    }
    let partners: Vec<usize> = right.chars().map(letter_index).collect::<Result<_>>()?;
    PartitionSpec::new(left[0], partners, subsystems).map_err(|e| anyhow!("invalid cut: {e}"))
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

/// Load `{"dims": [...], "amps": [[re, im], ...]}`. Amplitudes within 1e-6
/// of unit norm are renormalized; anything further off is rejected.
pub fn load_state_file(path: &Path, tol: &Tolerances) -> Result<PureState> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read state file {}", path.display()))?;
    let parsed: StateFile =
        serde_json::from_str(&text).with_context(|| format!("bad state JSON in {}", path.display()))?;
    let amps: Vec<C64> = parsed.amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        bail!("state file norm {norm} deviates from 1 by more than 1e-6");
    }
    let _ = tol;
    PureState::normalized(amps, parsed.dims).map_err(|e| anyhow!("invalid state file: {e}"))
}

/// Write a state in the interchange format.
#[cfg(test)]
pub fn save_state_file(path: &Path, psi: &PureState) -> Result<()> {
    let file = StateFile {
        dims: psi.dims().to_vec(),
        amps: psi.amps().iter().map(|z| [z.re, z.im]).collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
