mod common;

use common::*;
use proptest::prelude::*;
use sitcalc_core::engine::{bel, initial_belief, know, progress};
use sitcalc_core::gaussian::{discretize_normal, kalman_correct, kalman_predict, GaussianBelief};
use sitcalc_core::model::NumericMode;
use sitcalc_core::theory::{parse_formula, parse_theory, parse_theory_unvalidated, pretty_theory};

proptest! {
    #[test]
    fn correct_never_widens_and_predict_never_narrows(
        mean in -100.0f64..100.0,
        var in 0.01f64..100.0,
        x in -10.0f64..10.0,
        noise in 0.0f64..50.0,
        z in -100.0f64..100.0,
        sensor in 0.01f64..50.0,
    ) {
        let b = GaussianBelief::new(mean, var).unwrap();
        let p = kalman_predict(b, x, noise).unwrap();
        prop_assert!(p.variance() >= b.variance());
        let c = kalman_correct(b, z, sensor).unwrap();
        prop_assert!(c.variance() <= b.variance());
        let lo = mean.min(z) - 1e-9;
        let hi = mean.max(z) + 1e-9;
        prop_assert!(lo <= c.mean() && c.mean() <= hi);
    }

    #[test]
    fn discretized_normals_are_symmetric_pmfs(sigma in 0.1f64..10.0, cells in 1u32..60, width in 1.0f64..8.0) {
        let step = sigma * width / cells as f64;
        let pmf = discretize_normal(sigma, step, sigma * width).unwrap();
        let total: f64 = pmf.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for &k in pmf.offsets() {
            prop_assert_eq!(pmf.prob(k), pmf.prob(-k));
        }
    }

    #[test]
    fn sensing_keeps_bel_normalized_and_know_implies_certainty(
        weights in proptest::collection::vec(0u32..5, 5),
        reading in -3i64..14,
    ) {
        prop_assume!(weights.iter().any(|w| *w > 0));
        let src = theory_file("robot.sitc");
        let head = &src[..src.find("init {").unwrap()];
        let init: String = weights
            .iter()
            .enumerate()
            .map(|(i, w)| format!("world {{position = {}}} weight {w}\n", i as i64 + 5))
            .collect();
        let t = parse_theory_unvalidated(&format!("{head}init {{\n{init}}}\n")).unwrap().0;
        let b = initial_belief(&t, NumericMode::Exact).unwrap();
        let Ok(b) = progress(&t, &b, &sig(&t, &format!("sense-position({reading})"))) else {
            return Ok(());
        };
        let Ok(one) = bel(&t, &b, &parse_formula("true", &t).unwrap()) else {
            return Ok(());
        };
        prop_assert_eq!(one, exact(1, 1));
        for p in 3..12 {
            let f = parse_formula(&format!("position != {p}"), &t).unwrap();
            if know(&t, &b, &f).unwrap() {
                prop_assert_eq!(bel(&t, &b, &f).unwrap(), exact(1, 1));
            }
        }
    }

    #[test]
    fn random_theories_survive_pretty_printing(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let st = common::gen::small_theory(&mut rng);
        let t = parse_theory(&st.text).unwrap();
        let again = parse_theory(&pretty_theory(&t)).unwrap();
        prop_assert_eq!(again, t);
    }
}
