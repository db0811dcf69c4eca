//! Report envelopes and numeric formatting.
//!
//! Every JSON document embeds the tool version, the active tolerances and
//! the seed, so a report alone is enough to rerun the computation.

use polyent_core::Tolerances;
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "polyent";

pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Envelope wrapping a payload with reproducibility metadata.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(seed: u64, tol: &Tolerances, payload: T) -> Self {
        Envelope {
            tool: TOOL.to_string(),
            version: version().to_string(),
            seed,
            tolerances: tol.clone(),
            payload,
        }
    }
}

/// Format with 9 significant digits, plain decimal where reasonable,
/// scientific for extreme magnitudes; locale-independent.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..9).contains(&exp) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}
