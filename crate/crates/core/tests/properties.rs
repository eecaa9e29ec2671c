//! Randomized invariants of the certification machinery. Grids are kept
//! small here; the goal is structural truth over many configurations, not
//! tight numbers (the closed-form suite covers those).

use frameweave::frame_core::{
    admissible_b, analytic_bounds, cross_term_sum, frame_bounds, multiplier, SystemParams,
    WeavingPattern,
};
use frameweave::generators::WaveletGenerator;
use frameweave::weaving::{
    enumerate_patterns, sample_patterns, weakest_lower, weave_certificate,
};
use frameweave::frame_core::SweepSettings;
use proptest::prelude::*;

fn admissible_system() -> impl Strategy<Value = (WaveletGenerator, SystemParams)> {
    (
        0.1f64..1.5,
        0.4f64..2.5,
        1.15f64..3.0,
        1u32..=3,
        0.3f64..0.95,
    )
        .prop_map(|(alpha, cutoff, a, n, frac)| {
            let gen = WaveletGenerator::power_law(alpha, cutoff).unwrap();
            let b = frac * admissible_b(&gen);
            let params = SystemParams::new(a, b, n).unwrap();
            (gen, params)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_law_constructors_always_satisfy_their_envelope(
        alpha in 0.05f64..2.0,
        cutoff in 0.1f64..5.0,
    ) {
        let gen = WaveletGenerator::power_law(alpha, cutoff).unwrap();
        prop_assert!(gen.envelope_ok());
    }

    #[test]
    fn multiplier_is_log_periodic((gen, params) in admissible_system(), gamma in 0.05f64..20.0) {
        let zero = WeavingPattern::constant(0);
        let block = params.block_ratio();
        let m0 = multiplier(&gen, &params, &zero, gamma).unwrap();
        let m1 = multiplier(&gen, &params, &zero, gamma * block).unwrap();
        prop_assert!((m0 - m1).abs() <= 1e-8 * m0.max(1e-300), "{m0} vs {m1}");

        // A periodic pattern of length p repeats every p blocks.
        let pat = WeavingPattern::periodic(0, vec![0, params.weaving_order() - 1]).unwrap();
        let mp0 = multiplier(&gen, &params, &pat, gamma).unwrap();
        let mp1 = multiplier(&gen, &params, &pat, gamma * block * block).unwrap();
        prop_assert!((mp0 - mp1).abs() <= 1e-8 * mp0.max(1e-300));
    }

    #[test]
    fn splitting_one_family_into_n_preserves_the_system(
        a in 1.15f64..2.2,
        n in 2u32..=3,
        gamma in 0.1f64..10.0,
    ) {
        // The N-family lattice at dilation a, all choices 0, is the one-
        // family lattice at dilation a^N.
        let gen = WaveletGenerator::power_law(0.5, 1.0).unwrap();
        let split = SystemParams::new(a, 0.4, n).unwrap();
        let merged = SystemParams::new(a.powi(n as i32), 0.4, 1).unwrap();
        let zero = WeavingPattern::constant(0);
        let ms = multiplier(&gen, &split, &zero, gamma).unwrap();
        let mm = multiplier(&gen, &merged, &zero, gamma).unwrap();
        prop_assert!((ms - mm).abs() <= 1e-10 * ms.max(1e-300));
    }

    #[test]
    fn analytic_bounds_bracket_numeric_bounds((gen, params) in admissible_system()) {
        let cert = frame_bounds(&gen, &params, &WeavingPattern::constant(0), 512).unwrap();
        let anal = analytic_bounds(&gen, &params).unwrap();
        prop_assert!(anal.lower <= cert.a_num + 1e-9 * anal.lower.abs().max(1.0));
        prop_assert!(cert.b_num <= anal.upper + 1e-9 * anal.upper.abs().max(1.0));
        prop_assert!(cert.a_num <= cert.b_num);
    }

    #[test]
    fn finer_grids_only_tighten_bounds((gen, params) in admissible_system()) {
        let zero = WeavingPattern::constant(0);
        let coarse = frame_bounds(&gen, &params, &zero, 256).unwrap();
        let fine = frame_bounds(&gen, &params, &zero, 512).unwrap();
        // The coarse grid is nested in the fine one; the refinement pass
        // inserts its own nodes on both, which wobbles the comparison by
        // the refined resolution.
        let slack = 1e-4 * coarse.b_num.max(1.0);
        prop_assert!(fine.a_num <= coarse.a_num + slack);
        prop_assert!(fine.b_num >= coarse.b_num - slack);
    }

    #[test]
    fn cross_terms_vanish_in_the_painless_regime(
        (gen, params) in admissible_system(),
        gamma in 0.05f64..20.0,
    ) {
        let sum = cross_term_sum(&gen, &params, &WeavingPattern::constant(0), gamma, 10);
        prop_assert_eq!(sum, 0.0);
    }
}

proptest! {
    // Pattern scans sweep many grids; keep the case count low.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampled_patterns_stay_inside_the_weave_certificate(
        (gen, params) in admissible_system(),
        seed in 0u64..1_000_000,
    ) {
        let settings = SweepSettings::with_grid(256);
        let cert = weave_certificate(&gen, &params, 256).unwrap();
        let scans = sample_patterns(&gen, &params, 6, seed, (-2, 5), &settings).unwrap();
        // Pattern sweeps refine around their own extrema, so containment
        // holds up to the refined resolution of the coarse grid used here.
        let slack = 1e-4 * cert.u_weave.max(1.0);
        for s in &scans {
            prop_assert!(s.bounds.a_num >= cert.l_weave - slack,
                "a_num {} below L {}", s.bounds.a_num, cert.l_weave);
            prop_assert!(s.bounds.b_num <= cert.u_weave + slack,
                "b_num {} above U {}", s.bounds.b_num, cert.u_weave);
        }
    }

    #[test]
    fn exhaustive_enumeration_confirms_the_weakest_pattern(
        alpha in 0.2f64..1.2,
        window_len in 2usize..=4,
    ) {
        let gen = WaveletGenerator::power_law(alpha, 1.0).unwrap();
        let params = SystemParams::new(2.0, 0.4, 2).unwrap();
        let settings = SweepSettings::with_grid(128);
        let scans = enumerate_patterns(&gen, &params, (0, window_len), &settings).unwrap();
        prop_assert_eq!(scans.len(), 1usize << window_len);
        let weakest = weakest_lower(&scans).unwrap();
        for s in &scans {
            prop_assert!(scans[weakest].bounds.a_num <= s.bounds.a_num);
        }
    }
}
