//! Campaign-style invariants over Haar ensembles and the named state
//! families: formula cross-checks, bound dominations, ordering relations
//! and optimizer sanity.

use polyent_core::measures;
use polyent_core::polygamy::{
    self, check_eq19_prior, check_theorem1, check_theorem3, check_theorem4, EaSource, LhsMode,
    TermOrder,
};
use polyent_core::roof::{grid_oracle, maximize_assistance, Objective, OptimizerSettings};
use polyent_core::state::{derive_seed, haar_random_pure, DensityMatrix, PartitionSpec};
use polyent_core::states::StateRecipe;
use polyent_core::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn dual_form_agreement_on_haar_states() {
    // concurrence_pure errors out internally if the trace and determinant
    // routes disagree beyond the dual-form tolerance
    let t = tol();
    for dims in [[2usize, 2], [2, 3], [3, 3]] {
        for i in 0..1000u64 {
            let psi = haar_random_pure(&dims, derive_seed(101, i)).unwrap();
            let cut = PartitionSpec::global(0, 2).unwrap();
            measures::concurrence_pure(&psi, &cut, &t).unwrap();
        }
    }
}

#[test]
fn assistance_equals_concurrence_on_pure_two_qubit() {
    let t = tol();
    let cut = PartitionSpec::global(0, 2).unwrap();
    for i in 0..200u64 {
        let psi = haar_random_pure(&[2, 2], derive_seed(11, i)).unwrap();
        let c = measures::concurrence_pure(&psi, &cut, &t).unwrap().value;
        let ca = measures::ca_two_qubit(&psi.density(), &t).unwrap().value;
        assert!((c - ca).abs() < 1e-9, "C {c} vs Ca {ca}");
    }
}

#[test]
fn block_sum_dominates_concurrence() {
    let t = tol();
    for dims in [vec![2usize, 2, 2], vec![2, 2, 3], vec![2, 4]] {
        let cut = PartitionSpec::global(0, dims.len()).unwrap();
        for i in 0..200u64 {
            let psi = haar_random_pure(&dims, derive_seed(23, i)).unwrap();
            let c = measures::concurrence_pure(&psi, &cut, &t).unwrap().value;
            let bs = measures::tau_a_pure(&psi, &cut, &t).unwrap().value;
            assert!(bs >= c - 1e-9, "block sum {bs} below concurrence {c}");
        }
    }
}

#[test]
fn padding_leaves_global_cut_unchanged() {
    let t = tol();
    let part = PartitionSpec::global(0, 3).unwrap();
    for i in 0..50u64 {
        let psi = haar_random_pure(&[2, 2, 2], derive_seed(37, i)).unwrap();
        assert!(polygamy::padding_invariance_test(&psi, &part, &[3], &t).unwrap());
    }
}

#[test]
fn theorem1_pure_concurrence_mode_haar_campaign() {
    // the proven form of the weighted bound: assistance of the pure global
    // cut (= concurrence) against closed-form pair terms
    let t = tol();
    let alphas = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];
    for dims in [vec![2usize, 2, 2], vec![2, 2, 3]] {
        let part = PartitionSpec::global(0, dims.len()).unwrap();
        let mut min_slack = f64::INFINITY;
        for i in 0..500u64 {
            let psi = haar_random_pure(&dims, derive_seed(59, i)).unwrap();
            for &alpha in &alphas {
                let r = check_theorem1(&psi, &part, alpha, LhsMode::PureConcurrence, &t).unwrap();
                assert!(
                    r.slack >= -1e-8,
                    "violation at dims {dims:?} alpha {alpha}: slack {}",
                    r.slack
                );
                min_slack = min_slack.min(r.slack);
            }
        }
        assert!(min_slack.is_finite());
    }
}

#[test]
fn theorem3_dominates_theorem4_and_eq19_orders() {
    let t = tol();
    let part = PartitionSpec::global(0, 3).unwrap();
    for i in 0..100u64 {
        let psi = haar_random_pure(&[2, 2, 2], derive_seed(71, i)).unwrap();
        // same injected terms on all three bounds isolates the coefficients
        let terms = vec![
            0.1 + 0.8 * ((i % 7) as f64 / 7.0),
            0.05 + 0.6 * ((i % 5) as f64 / 5.0),
        ];
        let source = EaSource::Injected(terms);
        for &beta in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let th3 = check_theorem3(&psi, &part, beta, &source, &t).unwrap();
            let th4 =
                check_theorem4(&psi, &part, beta, &source, TermOrder::SortedDescending, &t)
                    .unwrap();
            let eq19 = check_eq19_prior(&psi, &part, beta, &source, &t).unwrap();
            assert!(th4.rhs <= th3.rhs + 1e-12);
            assert!(th3.rhs <= eq19.rhs + 1e-12);
        }
    }
}

#[test]
fn optimizer_never_below_eigen_average_and_caps() {
    let t = tol();
    for i in 0..12u64 {
        let psi = haar_random_pure(&[2, 2, 2], derive_seed(83, i)).unwrap();
        let pair = psi.marginal(&[0, 1]).unwrap();
        let settings = OptimizerSettings {
            seed: derive_seed(84, i),
            restarts: 4,
            ..Default::default()
        };
        let r = maximize_assistance(&pair, Objective::EntropyOfMarginal, &settings, &t).unwrap();
        // eigen-ensemble average via the identity isometry
        let eig_avg = {
            let id = polyent_core::matrix::CMat::identity(2);
            let dec = polyent_core::roof::decomposition_from_isometry(&pair, &id, &t).unwrap();
            dec.probs
                .iter()
                .zip(&dec.members)
                .map(|(p, m)| {
                    p * measures::von_neumann_entropy(&m.marginal(&[0]).unwrap(), &t).unwrap()
                })
                .sum::<f64>()
        };
        assert!(r.value >= eig_avg - 1e-9);
        let cap = measures::von_neumann_entropy(&pair.partial_trace(&[0]).unwrap(), &t).unwrap();
        assert!(r.value <= cap + 1e-9, "value {} cap {cap}", r.value);
    }
}

#[test]
fn assistance_superadditive_on_mixtures() {
    let t = tol();
    let settings = OptimizerSettings {
        seed: 7,
        restarts: 6,
        ..Default::default()
    };
    for i in 0..6u64 {
        let rho1 = haar_random_pure(&[2, 2, 2], derive_seed(91, i))
            .unwrap()
            .marginal(&[0, 1])
            .unwrap();
        let rho2 = haar_random_pure(&[2, 2, 2], derive_seed(92, i))
            .unwrap()
            .marginal(&[0, 1])
            .unwrap();
        let lambda = 0.3;
        let mixed_mat = rho1.mat().scale(lambda).add(&rho2.mat().scale(1.0 - lambda));
        let mixed = DensityMatrix::new(mixed_mat, vec![2, 2], &t).unwrap();
        let a_mixed =
            maximize_assistance(&mixed, Objective::EntropyOfMarginal, &settings, &t).unwrap();
        let a1 = maximize_assistance(&rho1, Objective::EntropyOfMarginal, &settings, &t).unwrap();
        let a2 = maximize_assistance(&rho2, Objective::EntropyOfMarginal, &settings, &t).unwrap();
        let baseline = lambda * a1.value + (1.0 - lambda) * a2.value;
        assert!(
            a_mixed.value >= baseline - 2e-2,
            "mixture {} below {baseline}",
            a_mixed.value
        );
    }
}

#[test]
fn grid_oracle_below_optimizer_on_random_rank2() {
    let t = tol();
    for i in 0..8u64 {
        let pair = haar_random_pure(&[2, 2, 2], derive_seed(97, i))
            .unwrap()
            .marginal(&[0, 1])
            .unwrap();
        let settings = OptimizerSettings {
            seed: derive_seed(98, i),
            restarts: 8,
            ..Default::default()
        };
        for objective in [Objective::Concurrence, Objective::EntropyOfMarginal] {
            let g = grid_oracle(&pair, objective, 48, &t).unwrap();
            let o = maximize_assistance(&pair, objective, &settings, &t).unwrap();
            assert!(g <= o.value + 1e-3, "grid {g} optimizer {}", o.value);
        }
    }
}

#[test]
fn w3_ea_pair_optimizer_close_to_closed_form() {
    let t = tol();
    let psi = StateRecipe::W3.build(&t).unwrap();
    for expected in StateRecipe::W3.expected_values() {
        if expected.kind != polyent_core::states::MeasureKind::EaPair {
            continue;
        }
        let pair = psi.density().reduced_pair(0, expected.partner).unwrap();
        let settings = OptimizerSettings {
            seed: 21,
            restarts: 8,
            ..Default::default()
        };
        let r = maximize_assistance(&pair, Objective::EntropyOfMarginal, &settings, &t).unwrap();
        assert!(
            (r.value - expected.value).abs() < 1e-2,
            "Ea pair {} vs closed {}",
            r.value,
            expected.value
        );
    }
}

#[test]
fn haar_marginal_purity_moments() {
    // Monte Carlo over 10^4 two-qubit Haar states; the plain purity moment
    // is (d_a + d_b)/(d_a d_b + 1) = 4/5, the rescaled one (2 Tr rho^2 - 1)
    // averages 3/5.
    let t = tol();
    let n = 10_000u64;
    let mut purity_sum = 0.0;
    for i in 0..n {
        let psi = haar_random_pure(&[2, 2], derive_seed(103, i)).unwrap();
        purity_sum += psi.marginal(&[0]).unwrap().purity();
    }
    let mean_purity = purity_sum / n as f64;
    assert!((mean_purity - 0.8).abs() < 0.02, "mean purity {mean_purity}");
    let mean_rescaled = 2.0 * mean_purity - 1.0;
    assert!(
        (mean_rescaled - 0.6).abs() < 0.02,
        "mean rescaled purity {mean_rescaled}"
    );
    let _ = t;
}

#[test]
fn haar_overlap_invariant_under_basis_choice() {
    // E|<e|psi>|^2 = 1/D for any fixed reference vector
    let n = 4000u64;
    let reference = haar_random_pure(&[2, 2], 424242).unwrap();
    let mut basis0 = 0.0;
    let mut rotated = 0.0;
    for i in 0..n {
        let psi = haar_random_pure(&[2, 2], derive_seed(107, i)).unwrap();
        basis0 += psi.amps()[0].norm_sqr();
        let overlap: polyent_core::C64 = reference
            .amps()
            .iter()
            .zip(psi.amps())
            .map(|(a, b)| a.conj() * b)
            .sum();
        rotated += overlap.norm_sqr();
    }
    assert!((basis0 / n as f64 - 0.25).abs() < 0.02);
    assert!((rotated / n as f64 - 0.25).abs() < 0.02);
}
