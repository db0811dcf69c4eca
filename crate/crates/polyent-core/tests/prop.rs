//! Property-based invariants for the kernel and the weight machinery.

use proptest::prelude::*;

use polyent_core::matrix::{herm_eig, kron, CMat};
use polyent_core::polygamy::{
    hamming_weight, lemma1_holds, weight_coeff, BinaryIndexVector, WeightScheme,
};
use polyent_core::state::{derive_seed, haar_random_pure};
use polyent_core::Tolerances;

fn random_hermitian(n: usize, seed: u64) -> CMat {
    let psi = haar_random_pure(&[n, n], seed).unwrap();
    let rho = psi.marginal(&[0]).unwrap();
    rho.mat().clone()
}

proptest! {
    #[test]
    fn binary_vector_reconstructs(j in 0u64..1_000_000) {
        let v = BinaryIndexVector::new(j);
        let back: u64 = v.bits.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum();
        prop_assert_eq!(back, j);
        prop_assert_eq!(v.weight, j.count_ones());
        prop_assert!(v.weight as u64 <= j.max(1));
    }

    #[test]
    fn linear_weight_never_exceeds_hamming_weight_coeff(
        x in 0.0f64..=1.0,
        j in 0u64..64,
    ) {
        // w_H(j) <= j and the base lies in [0, 1]
        let h = weight_coeff(x, j, WeightScheme::Hamming).unwrap();
        let l = weight_coeff(x, j, WeightScheme::Linear).unwrap();
        prop_assert!(l <= h + 1e-15);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&h));
    }

    #[test]
    fn prior_vs_new_coefficient_order(x in 0.0f64..=1.0, j in 0u64..32) {
        // 2^x - 1 <= x on [0, 1], so the new coefficients never exceed the
        // prior ones at the same Hamming weight
        let new = weight_coeff(x, j, WeightScheme::Hamming).unwrap();
        let prior = if hamming_weight(j) == 0 {
            1.0
        } else {
            x.powi(hamming_weight(j) as i32)
        };
        prop_assert!(new <= prior + 1e-15);
    }

    #[test]
    fn lemma1_on_random_points(x in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let out = lemma1_holds(x, t, &Tolerances::default()).unwrap();
        prop_assert!(out.holds, "residual {}", out.residual);
    }

    #[test]
    fn partial_trace_composes(seed in 0u64..500) {
        let psi = haar_random_pure(&[2, 2, 3], derive_seed(1009, seed)).unwrap();
        let rho = psi.density();
        let direct = rho.partial_trace(&[0]).unwrap();
        let staged = rho
            .partial_trace(&[0, 2])
            .unwrap()
            .partial_trace(&[0])
            .unwrap();
        prop_assert!(direct.mat().sub(staged.mat()).max_abs() < 1e-12);
    }

    #[test]
    fn purify_round_trip_random(seed in 0u64..300) {
        let tol = Tolerances::default();
        let psi = haar_random_pure(&[3, 2], derive_seed(1013, seed)).unwrap();
        let rho = psi.marginal(&[0]).unwrap();
        let pure = rho.purify(&tol).unwrap();
        let back = pure.marginal(&[0]).unwrap();
        prop_assert!(back.mat().sub(rho.mat()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in 0u64..300, n in 2usize..6) {
        let tol = Tolerances::default();
        let m = random_hermitian(n, derive_seed(1019, seed));
        let (w, v) = herm_eig(&m, &tol).unwrap();
        let recon = v.mul(&CMat::diag(&w)).mul(&v.adjoint());
        prop_assert!(recon.sub(&m).frobenius_norm() < 1e-9);
        for pair in w.windows(2) {
            prop_assert!(pair[0] >= pair[1]);
        }
    }

    #[test]
    fn kron_mixed_product(seed in 0u64..200) {
        // (A (x) B)(C (x) D) = AC (x) BD
        let a = random_hermitian(2, derive_seed(1021, seed));
        let b = random_hermitian(3, derive_seed(1022, seed));
        let c = random_hermitian(2, derive_seed(1023, seed));
        let d = random_hermitian(3, derive_seed(1024, seed));
        let lhs = kron(&a, &b).mul(&kron(&c, &d));
        let rhs = kron(&a.mul(&c), &b.mul(&d));
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }
}
