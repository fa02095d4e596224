//! Metric invariants under randomized inputs.

use proptest::prelude::*;

use extplace_sim::metrics::{convergence_stats, jain_index, outage};

proptest! {
    #[test]
    fn jain_stays_in_bounds(rates in prop::collection::vec(0.0..1_000.0f64, 1..30)) {
        let j = jain_index(&rates).unwrap();
        let n = rates.len() as f64;
        prop_assert!(j >= 1.0 / n - 1e-12);
        prop_assert!(j <= 1.0 + 1e-12);
    }

    #[test]
    fn jain_is_permutation_invariant(
        rates in prop::collection::vec(0.0..1_000.0f64, 2..20),
        swap_a in any::<u32>(),
        swap_b in any::<u32>(),
    ) {
        let mut shuffled = rates.clone();
        let a = swap_a as usize % rates.len();
        let b = swap_b as usize % rates.len();
        shuffled.swap(a, b);
        let base = jain_index(&rates).unwrap();
        let permuted = jain_index(&shuffled).unwrap();
        prop_assert!((base - permuted).abs() < 1e-12);
    }

    #[test]
    fn jain_is_scale_invariant(
        rates in prop::collection::vec(0.1..1_000.0f64, 1..20),
        scale in 0.001..1_000.0f64,
    ) {
        let scaled: Vec<f64> = rates.iter().map(|r| r * scale).collect();
        let base = jain_index(&rates).unwrap();
        let after = jain_index(&scaled).unwrap();
        prop_assert!((base - after).abs() < 1e-9);
    }

    #[test]
    fn outage_is_a_fraction(lists in prop::collection::vec(
        prop::collection::vec(0.0..100.0f64, 1..5), 1..10))
    {
        let f = outage(&lists);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn convergence_cdf_is_monotone_and_complete(reps in prop::collection::vec(0usize..25, 1..40)) {
        let stats = convergence_stats(&reps).unwrap();
        prop_assert!(stats.cdf.windows(2).all(|w| w[1].1 >= w[0].1));
        prop_assert_eq!(stats.cdf.last().unwrap().1, 1.0);
        prop_assert!(stats.stddev >= 0.0);
    }
}
