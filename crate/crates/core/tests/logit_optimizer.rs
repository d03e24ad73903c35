mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>()) {
        let err = gradient_fd_error(seed);
        prop_assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn optimizer_reaches_stationary_point(seed in any::<u64>()) {
        let norm = optimized_gradient_norm(seed);
        prop_assert!(norm < 1e-6, "{norm}");
    }

    #[test]
    fn no_covariate_fit_recovers_block_proportions(seed in any::<u64>()) {
        let gap = no_covariate_gap(seed);
        prop_assert!(gap < 1e-8, "{gap}");
    }
}
