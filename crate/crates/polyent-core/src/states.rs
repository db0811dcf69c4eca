//! Factory for the named state families used by the worked examples, with
//! closed-form expected measure values attached for golden tests.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::policy::Tolerances;
use crate::state::{haar_random_pure, PureState};
use crate::C64;

/// Recipes for the state families with known closed forms, plus generic
/// Haar and product states.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StateRecipe {
    /// Three-qubit generalized Schmidt decomposition
    /// `l0|000> + l1 e^{i phase}|100> + l2|101> + l3|110> + l4|111>`.
    Gsd3 { lambdas: [f64; 5], phase: f64 },
    /// `(|100> + |010> + |001>)/sqrt(3)`.
    W3,
    /// `a|1000> + b|0100> + c|0010> + d|0001>`; party A carries the
    /// excitation of the first amplitude.
    W4 { a: f64, b: f64, c: f64, d: f64 },
    /// `sum_i |i...i> / sqrt(dim)` over `parties` subsystems.
    Ghz { parties: usize, dim: usize },
    Haar { dims: Vec<usize>, seed: u64 },
    /// `|0...0>` over `dims`.
    Product { dims: Vec<usize> },
}

/// Measures with closed-form values for a recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MeasureKind {
    /// Pure concurrence of the global cut `A | rest`.
    ConcurrencePureGlobal,
    /// Literal block-sum of the global cut.
    TauBlockSumGlobal,
    /// Two-qubit concurrence of assistance of the pair `(0, partner)`.
    CaPair,
    /// Entanglement of assistance of the pair `(0, partner)`.
    EaPair,
    /// Entanglement of assistance of the global cut (= marginal entropy).
    EaGlobal,
    /// Wootters concurrence of the pair `(0, partner)`.
    WoottersPair,
}

/// One closed-form golden value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpectedValue {
    pub kind: MeasureKind,
    /// Partner subsystem for pair measures; ignored for global cuts.
    pub partner: usize,
    pub value: f64,
}

impl StateRecipe {
    /// Build the normalized state; recipe invariants are enforced.
    pub fn build(&self, tol: &Tolerances) -> Result<PureState> {
        match self {
            StateRecipe::Gsd3 { lambdas, phase } => {
                if lambdas.iter().any(|&l| l < 0.0) {
                    return Err(Error::invalid_argument(
                        "gsd3 coefficients must be nonnegative",
                    ));
                }
                let norm: f64 = lambdas.iter().map(|l| l * l).sum();
                if math::abs(norm - 1.0) > tol.norm {
                    return Err(Error::invalid_argument(alloc::format!(
                        "gsd3 coefficients are not normalized (sum of squares {norm})"
                    )));
                }
                let mut amps = vec![C64::new(0.0, 0.0); 8];
                amps[0b000] = C64::new(lambdas[0], 0.0);
                amps[0b100] =
                    C64::new(math::cos(*phase), math::sin(*phase)) * lambdas[1];
                amps[0b101] = C64::new(lambdas[2], 0.0);
                amps[0b110] = C64::new(lambdas[3], 0.0);
                amps[0b111] = C64::new(lambdas[4], 0.0);
                PureState::new(amps, vec![2, 2, 2], tol)
            }
            StateRecipe::W3 => {
                let s = 1.0 / math::sqrt(3.0);
                let mut amps = vec![C64::new(0.0, 0.0); 8];
                amps[0b100] = C64::new(s, 0.0);
                amps[0b010] = C64::new(s, 0.0);
                amps[0b001] = C64::new(s, 0.0);
                PureState::new(amps, vec![2, 2, 2], tol)
            }
            StateRecipe::W4 { a, b, c, d } => {
                let norm = a * a + b * b + c * c + d * d;
                if math::abs(norm - 1.0) > tol.norm {
                    return Err(Error::invalid_argument(alloc::format!(
                        "w4 coefficients are not normalized (sum of squares {norm})"
                    )));
                }
                let mut amps = vec![C64::new(0.0, 0.0); 16];
                amps[0b1000] = C64::new(*a, 0.0);
                amps[0b0100] = C64::new(*b, 0.0);
                amps[0b0010] = C64::new(*c, 0.0);
                amps[0b0001] = C64::new(*d, 0.0);
                PureState::new(amps, vec![2, 2, 2, 2], tol)
            }
            StateRecipe::Ghz { parties, dim } => {
                if *parties < 2 || *dim < 2 {
                    return Err(Error::invalid_argument(
                        "ghz needs at least 2 parties of dimension 2",
                    ));
                }
                let dims = vec![*dim; *parties];
                let total: usize = dims.iter().product();
                let mut amps = vec![C64::new(0.0, 0.0); total];
                let s = 1.0 / math::sqrt(*dim as f64);
                let mut stride = 0usize;
                let mut factor = 1usize;
                for _ in 0..*parties {
                    stride = stride * *dim + 1;
                    factor *= *dim;
                }
                let _ = factor;
                for i in 0..*dim {
                    amps[i * stride] = C64::new(s, 0.0);
                }
                PureState::new(amps, dims, tol)
            }
            StateRecipe::Haar { dims, seed } => haar_random_pure(dims, *seed),
            StateRecipe::Product { dims } => PureState::ground(dims.clone()),
        }
    }

    /// Closed-form golden values; empty for families without them.
    pub fn expected_values(&self) -> Vec<ExpectedValue> {
        match self {
            StateRecipe::Gsd3 { lambdas, .. } => {
                let [l0, _, l2, l3, l4] = *lambdas;
                vec![
                    ExpectedValue {
                        kind: MeasureKind::ConcurrencePureGlobal,
                        partner: 0,
                        value: 2.0 * l0 * math::sqrt(l2 * l2 + l3 * l3 + l4 * l4),
                    },
                    ExpectedValue {
                        kind: MeasureKind::TauBlockSumGlobal,
                        partner: 0,
                        value: 2.0 * l0 * (l2 + l3 + l4),
                    },
                    ExpectedValue {
                        kind: MeasureKind::CaPair,
                        partner: 1,
                        value: 2.0 * l0 * math::sqrt(l2 * l2 + l4 * l4),
                    },
                    ExpectedValue {
                        kind: MeasureKind::CaPair,
                        partner: 2,
                        value: 2.0 * l0 * math::sqrt(l3 * l3 + l4 * l4),
                    },
                ]
            }
            StateRecipe::W3 => {
                let third = 1.0 / 3.0;
                vec![
                    ExpectedValue {
                        kind: MeasureKind::EaGlobal,
                        partner: 0,
                        value: math::log2(3.0) - 2.0 * third,
                    },
                    ExpectedValue {
                        kind: MeasureKind::EaPair,
                        partner: 1,
                        value: 2.0 * third,
                    },
                    ExpectedValue {
                        kind: MeasureKind::EaPair,
                        partner: 2,
                        value: 2.0 * third,
                    },
                    ExpectedValue {
                        kind: MeasureKind::CaPair,
                        partner: 1,
                        value: 2.0 * third,
                    },
                    ExpectedValue {
                        kind: MeasureKind::CaPair,
                        partner: 2,
                        value: 2.0 * third,
                    },
                ]
            }
            StateRecipe::W4 { a, b, c, d } => vec![
                ExpectedValue {
                    kind: MeasureKind::ConcurrencePureGlobal,
                    partner: 0,
                    value: 2.0 * a * math::sqrt((1.0 - a * a).max(0.0)),
                },
                ExpectedValue {
                    kind: MeasureKind::CaPair,
                    partner: 1,
                    value: 2.0 * a * b,
                },
                ExpectedValue {
                    kind: MeasureKind::CaPair,
                    partner: 2,
                    value: 2.0 * a * c,
                },
                ExpectedValue {
                    kind: MeasureKind::CaPair,
                    partner: 3,
                    value: 2.0 * a * d,
                },
            ],
            StateRecipe::Ghz { parties, dim } => {
                let d = *dim as f64;
                let mut out = vec![ExpectedValue {
                    kind: MeasureKind::ConcurrencePureGlobal,
                    partner: 0,
                    value: math::sqrt(2.0 * (d - 1.0) / d),
                }];
                if *dim == 2 {
                    for partner in 1..*parties {
                        out.push(ExpectedValue {
                            kind: MeasureKind::WoottersPair,
                            partner,
                            value: 0.0,
                        });
                    }
                }
                out
            }
            StateRecipe::Product { .. } => vec![
                ExpectedValue {
                    kind: MeasureKind::ConcurrencePureGlobal,
                    partner: 0,
                    value: 0.0,
                },
                ExpectedValue {
                    kind: MeasureKind::TauBlockSumGlobal,
                    partner: 0,
                    value: 0.0,
                },
            ],
            StateRecipe::Haar { .. } => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures;
    use crate::state::PartitionSpec;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn paper_gsd() -> StateRecipe {
        let l = 6f64.sqrt() / 6.0;
        StateRecipe::Gsd3 {
            lambdas: [0.5, 0.5, l, l, l],
            phase: 0.0,
        }
    }

    #[test]
    fn w3_amplitudes() {
        let psi = StateRecipe::W3.build(&tol()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(psi.amps()[0b100].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amps()[0b010].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amps()[0b001].re, s, epsilon = 1e-15);
    }

    #[test]
    fn gsd_degenerate_single_term() {
        let psi = StateRecipe::Gsd3 {
            lambdas: [1.0, 0.0, 0.0, 0.0, 0.0],
            phase: 0.0,
        }
        .build(&tol())
        .unwrap();
        assert_abs_diff_eq!(psi.amps()[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gsd_rejects_unnormalized() {
        let bad = StateRecipe::Gsd3 {
            lambdas: [0.9, 0.9, 0.0, 0.0, 0.0],
            phase: 0.0,
        };
        assert!(bad.build(&tol()).is_err());
    }

    #[test]
    fn ghz3_layout() {
        let psi = StateRecipe::Ghz { parties: 3, dim: 2 }.build(&tol()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(psi.amps()[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amps()[7].re, s, epsilon = 1e-15);
        // qutrit GHZ pins the diagonal
        let q = StateRecipe::Ghz { parties: 2, dim: 3 }.build(&tol()).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert_abs_diff_eq!(q.amps()[i * 3 + i].re, t, epsilon = 1e-15);
        }
    }

    #[test]
    fn gsd_paper_expected_values() {
        let recipe = paper_gsd();
        let expect = recipe.expected_values();
        let by_kind = |k: MeasureKind, p: usize| {
            expect
                .iter()
                .find(|e| e.kind == k && e.partner == p)
                .unwrap()
                .value
        };
        assert_abs_diff_eq!(
            by_kind(MeasureKind::ConcurrencePureGlobal, 0),
            2f64.sqrt() / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            by_kind(MeasureKind::CaPair, 1),
            3f64.sqrt() / 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            by_kind(MeasureKind::CaPair, 2),
            3f64.sqrt() / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn w4_paper_expected_values() {
        let r6 = 1.0 / 6f64.sqrt();
        let r2 = 1.0 / 2f64.sqrt();
        let recipe = StateRecipe::W4 {
            a: r6,
            b: r2,
            c: r6,
            d: r6,
        };
        let expect = recipe.expected_values();
        let ab = expect
            .iter()
            .find(|e| e.kind == MeasureKind::CaPair && e.partner == 1)
            .unwrap()
            .value;
        assert_abs_diff_eq!(ab, 2.0 * r6 * r2, epsilon = 1e-12);
    }

    #[test]
    fn computed_measures_match_closed_forms() {
        let t = tol();
        let recipes = [
            paper_gsd(),
            StateRecipe::W3,
            StateRecipe::W4 {
                a: 1.0 / 6f64.sqrt(),
                b: 1.0 / 2f64.sqrt(),
                c: 1.0 / 6f64.sqrt(),
                d: 1.0 / 6f64.sqrt(),
            },
            StateRecipe::Ghz { parties: 3, dim: 2 },
            StateRecipe::Product { dims: vec![2, 2] },
        ];
        for recipe in recipes {
            let psi = recipe.build(&t).unwrap();
            let n = psi.subsystems();
            let part = PartitionSpec::global(0, n).unwrap();
            let rho = psi.density();
            for e in recipe.expected_values() {
                let got = match e.kind {
                    MeasureKind::ConcurrencePureGlobal => {
                        measures::concurrence_pure(&psi, &part, &t).unwrap().value
                    }
                    MeasureKind::TauBlockSumGlobal => {
                        measures::tau_a_pure(&psi, &part, &t).unwrap().value
                    }
                    MeasureKind::CaPair => {
                        let pair = rho.reduced_pair(0, e.partner).unwrap();
                        measures::ca_two_qubit(&pair, &t).unwrap().value
                    }
                    MeasureKind::WoottersPair => {
                        let pair = rho.reduced_pair(0, e.partner).unwrap();
                        measures::concurrence_two_qubit(&pair, &t).unwrap().value
                    }
                    MeasureKind::EaGlobal => {
                        measures::entanglement_pure(&psi, &part, &t).unwrap()
                    }
                    MeasureKind::EaPair => continue, // optimizer path, tested in roof
                };
                assert_abs_diff_eq!(got, e.value, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn haar_recipe_deterministic() {
        let r = StateRecipe::Haar {
            dims: vec![2, 2, 2],
            seed: 99,
        };
        assert_eq!(r.build(&tol()).unwrap(), r.build(&tol()).unwrap());
        assert!(r.expected_values().is_empty());
    }
}
