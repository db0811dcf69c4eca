//! Centralized numeric policy.
//!
//! Every tolerance used by constructors, kernels and inequality checkers is a
//! field of [`Tolerances`], so tests and campaigns run under one explicit,
//! reproducible policy. The CLI exposes overrides for all of them.

/// Numeric tolerances shared by all modules.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Max-abs entrywise deviation allowed from Hermitian symmetry.
    pub hermiticity: f64,
    /// Allowed deviation of a density-matrix trace from 1.
    pub trace: f64,
    /// Allowed deviation of a pure-state norm from 1.
    pub norm: f64,
    /// Eigenvalues of nominally PSD operators may dip this far below zero.
    pub psd_floor: f64,
    /// Below `-psd_strict` an eigenvalue is a hard numeric error, not noise.
    pub psd_strict: f64,
    /// Eigenvalues smaller than this are clamped to zero before logs/roots.
    pub eig_clamp: f64,
    /// Frobenius residual allowed for eigendecomposition reconstruction.
    pub eig_reconstruction: f64,
    /// Frobenius residual allowed for `psd_sqrt(m)^2 - m`.
    pub sqrt_reconstruction: f64,
    /// Column-orthonormality tolerance for decomposition isometries.
    pub isometry: f64,
    /// Frobenius residual allowed for ensemble reconstruction of a target.
    pub ensemble_reconstruction: f64,
    /// Agreement required between the two pure-concurrence formulas.
    pub dual_form: f64,
    /// Slack below which an inequality report flips to "violated".
    pub slack: f64,
    /// Cushion for the ordering conditions of Theorems 2 and 4.
    pub condition: f64,
    /// Residual floor for the Lemma 1 grid.
    pub lemma_residual: f64,
    /// Measure values at or below this count as zero for the `x^0` rules.
    pub zero_measure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            trace: 1e-10,
            norm: 1e-10,
            psd_floor: 1e-9,
            psd_strict: 1e-6,
            eig_clamp: 1e-12,
            eig_reconstruction: 1e-9,
            sqrt_reconstruction: 1e-8,
            isometry: 1e-9,
            ensemble_reconstruction: 1e-8,
            dual_form: 1e-9,
            slack: 1e-8,
            condition: 1e-12,
            lemma_residual: 1e-12,
            zero_measure: 1e-12,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by field name; used by the CLI `--tol key=value` flag.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), crate::Error> {
        match key {
            "hermiticity" => self.hermiticity = value,
            "trace" => self.trace = value,
            "norm" => self.norm = value,
            "psd-floor" => self.psd_floor = value,
            "psd-strict" => self.psd_strict = value,
            "eig-clamp" => self.eig_clamp = value,
            "eig-reconstruction" => self.eig_reconstruction = value,
            "sqrt-reconstruction" => self.sqrt_reconstruction = value,
            "isometry" => self.isometry = value,
            "ensemble-reconstruction" => self.ensemble_reconstruction = value,
            "dual-form" => self.dual_form = value,
            "slack" => self.slack = value,
            "condition" => self.condition = value,
            "lemma-residual" => self.lemma_residual = value,
            "zero-measure" => self.zero_measure = value,
            other => {
                return Err(crate::Error::invalid_argument(alloc::format!(
                    "unknown tolerance key '{other}'"
                )))
            }
        }
        Ok(())
    }
}
