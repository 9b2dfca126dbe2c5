use proptest::prelude::*;
use resource_weight::linalg::{partial_trace, von_neumann_entropy, Subsystem};
use resource_weight::measures::{
    coherence_weight, l1_coherence, rel_entropy_coherence, robustness_coherence,
};
use resource_weight::states::{dephase, haar_mixed_with, haar_unitary, rep_swap, rng_for};
use resource_weight::DensityMatrix;

fn state(d: usize, seed: u64) -> DensityMatrix {
    haar_mixed_with(d, d, &mut rng_for(seed, 0))
}

fn dist(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dephasing_is_idempotent(d in 2usize..6, seed in any::<u64>()) {
        let once = dephase(&state(d, seed));
        prop_assert!(dist(&dephase(&once), &once) < 1e-12);
    }

    #[test]
    fn twirl_is_idempotent(seed in any::<u64>()) {
        let swap = rep_swap(2).unwrap();
        let rho = state(4, seed);
        let once = swap.twirl(rho.as_hermitian()).unwrap();
        let twice = swap.twirl(&once).unwrap();
        prop_assert!((once.matrix() - twice.matrix()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), first in any::<bool>()) {
        let side = if first { Subsystem::First } else { Subsystem::Second };
        let marginal = partial_trace(&state(6, seed), (2, 3), side).unwrap();
        prop_assert!((marginal.as_hermitian().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_unitarily_invariant(d in 2usize..5, seed in any::<u64>()) {
        let rho = state(d, seed);
        let u = haar_unitary(d, &mut rng_for(seed, 1));
        let rotated = DensityMatrix::new(rho.as_hermitian().conjugate_by(&u)).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&rotated)).abs() < 1e-9);
    }

    #[test]
    fn coherence_weight_lies_in_unit_interval(d in 2usize..5, seed in any::<u64>()) {
        let cw = coherence_weight(&state(d, seed)).unwrap().value;
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&cw));
    }

    #[test]
    fn incoherent_states_cost_nothing(d in 2usize..5, seed in any::<u64>()) {
        let delta = dephase(&state(d, seed));
        prop_assert!(coherence_weight(&delta).unwrap().value < 1e-6);
        prop_assert!(robustness_coherence(&delta).unwrap().value < 1e-6);
        prop_assert!(l1_coherence(&delta) < 1e-12);
        prop_assert!(rel_entropy_coherence(&delta).abs() < 1e-9);
    }

    #[test]
    fn robustness_never_exceeds_l1(d in 2usize..5, seed in any::<u64>()) {
        let rho = state(d, seed);
        prop_assert!(robustness_coherence(&rho).unwrap().value <= l1_coherence(&rho) + 1e-6);
    }
}
