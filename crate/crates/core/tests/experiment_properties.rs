mod common;

use std::f64::consts::PI;

use common::{fringe_grid, random_geometry, random_source};
use delayed_choice::eraser::{
    analyzed_pattern, eraser_patterns, source_state_with_tags, tagged_source_state, AnalyzerSetting,
    Polarization,
};
use delayed_choice::experiment::{
    closed_form_screen_probability, fringe_visibility, path_difference, screen_pattern, source_state,
    telescope_pattern, Geometry, Slit, SourceParams,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn operator_path_matches_closed_form_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let grid = delayed_choice::experiment::linspace(-0.02, 0.02, 1000);
        let pat = screen_pattern(&g, &sp, &grid).unwrap();
        for pt in pat.points() {
            let want = closed_form_screen_probability(&g, &sp, pt.x);
            assert!((pt.p - want).abs() < 1e-12, "{g:?} {sp:?} x={} {} vs {}", pt.x, pt.p, want);
        }
    }
}

#[test]
fn telescope_is_uniform_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let grid = fringe_grid(&g, 200);
        for slit in [Slit::A, Slit::B] {
            let pat = telescope_pattern(&g, &sp, slit, &grid).unwrap();
            for p in pat.values() {
                assert!((p - 0.5 * sp.epsilon * sp.epsilon).abs() < 1e-12);
            }
            assert!(fringe_visibility(&pat).unwrap() < 1e-12);
        }
    }
}

#[test]
fn complementarity_screen_vs_telescope() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let g = random_geometry(&mut rng);
        let phi = rand::Rng::random_range(&mut rng, -PI..PI);
        let sp = SourceParams::new(0.3, phi, phi).unwrap();
        let grid = fringe_grid(&g, 2001);
        let screen = fringe_visibility(&screen_pattern(&g, &sp, &grid).unwrap()).unwrap();
        let tel = fringe_visibility(&telescope_pattern(&g, &sp, Slit::A, &grid).unwrap()).unwrap();
        assert!(screen > 0.999, "screen visibility {screen}");
        assert!(tel < 1e-12);
    }
}

#[test]
fn phase_shift_of_pi_swaps_bright_and_dark() {
    let g = Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9).unwrap();
    let base = SourceParams::new(0.1, 0.0, 0.0).unwrap();
    let shifted = SourceParams::new(0.1, 0.0, PI).unwrap();
    let grid = fringe_grid(&g, 501);
    let a = screen_pattern(&g, &base, &grid).unwrap();
    let b = screen_pattern(&g, &shifted, &grid).unwrap();
    for (p, q) in a.values().zip(b.values()) {
        assert!((p + q - 0.02).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_covariance(seed in any::<u64>(), delta in -3.0f64..3.0, x in -0.01f64..0.01) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let shifted = SourceParams { phi_a: sp.phi_a + delta, ..sp };
        let arg = g.wavenumber * path_difference(&g, x) + sp.phi_a - sp.phi_b + delta;
        let want = sp.epsilon * sp.epsilon * (1.0 + arg.cos());
        prop_assert!((closed_form_screen_probability(&g, &shifted, x) - want).abs() < 1e-12);
    }

    #[test]
    fn global_phase_invariance(seed in any::<u64>(), shift in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let moved = SourceParams { phi_a: sp.phi_a + shift, phi_b: sp.phi_b + shift, ..sp };
        let grid = delayed_choice::experiment::linspace(-5e-3, 5e-3, 50);
        let a = screen_pattern(&g, &sp, &grid).unwrap();
        let b = screen_pattern(&g, &moved, &grid).unwrap();
        for (p, q) in a.values().zip(b.values()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn pattern_is_nonnegative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let pat = screen_pattern(&g, &sp, &fringe_grid(&g, 300)).unwrap();
        prop_assert!(pat.values().all(|p| p >= -1e-12));
    }

    #[test]
    fn marking_destroys_and_erasure_restores(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let grid = fringe_grid(&g, 2001);
        let pats = eraser_patterns(&g, &sp, &grid).unwrap();
        prop_assert!(fringe_visibility(&pats.marked).unwrap() < 1e-12);
        prop_assert!(fringe_visibility(&pats.erased_diag).unwrap() > 0.999);
        prop_assert!(fringe_visibility(&pats.erased_antidiag).unwrap() > 0.999);
        for ((m, d), a) in pats.marked.values().zip(pats.erased_diag.values()).zip(pats.erased_antidiag.values()) {
            prop_assert!((d + a - m).abs() < 1e-12);
        }
    }

    #[test]
    fn marking_is_unitary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = random_source(&mut rng);
        let tagged = tagged_source_state(&sp).unwrap();
        let plain = source_state(&sp).unwrap();
        prop_assert!((tagged.norm_sqr() - plain.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn identical_tags_reduce_to_plain_screen(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_geometry(&mut rng);
        let sp = random_source(&mut rng);
        let grid = fringe_grid(&g, 200);
        let same = source_state_with_tags(&sp, Polarization::H, Polarization::H).unwrap();
        let through = analyzed_pattern(&g, &same, AnalyzerSetting::Absent, &grid).unwrap();
        let plain = screen_pattern(&g, &sp, &grid).unwrap();
        for (p, q) in through.values().zip(plain.values()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }
}
