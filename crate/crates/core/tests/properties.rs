//! Randomised algebraic properties of the automorphism layer and reports.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orbitlens::automorphism::BallMoebius;
use orbitlens::job::{self, Command};
use orbitlens::samplers::{draw, random_ball_point, random_unitary, Family};

const FAMILIES: [Family; 7] = [
    Family::DiscHyperbolic,
    Family::DiscParabolic,
    Family::SiegelI1,
    Family::SiegelI21,
    Family::SiegelI22,
    Family::SiegelI24,
    Family::BidiscSwap,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn powers_add(seed in any::<u64>(), f in 0..FAMILIES.len(), j in -30i64..=30, k in -30i64..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = draw(&mut rng, FAMILIES[f]).unwrap();
        let z = random_ball_point(&mut rng, gen.dim(), 0.5);
        let plan = gen.powers().unwrap();
        let t = gen.track(&z).unwrap();
        let mid = plan.apply(j, &t).unwrap();
        prop_assume!(mid.defect() >= 1e-8);
        let two_step = plan.apply(k, &mid).unwrap();
        let one_step = plan.apply(j + k, &t).unwrap();
        // rounding in `mid` is amplified by up to 1 / defect on the way back
        let tol = 1e-9f64.max(1e-13 / mid.defect());
        let d = two_step.point.distance(&one_step.point);
        prop_assert!(d <= tol, "d = {d:e}, defect after j = {:e}", mid.defect());
    }

    #[test]
    fn ball_inverse_round_trips(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = BallMoebius::new(random_unitary(&mut rng, n), random_ball_point(&mut rng, n, 0.9)).unwrap();
        let z = random_ball_point(&mut rng, n, 0.9);
        let back = m.inverse().apply(&m.apply(&z).unwrap()).unwrap();
        prop_assert!(back.distance(&z) <= 1e-10);
    }

    #[test]
    fn classify_reports_round_trip(p_re in 1.0f64..3.0, p_im in -1.0f64..1.0, arg in 0.0f64..std::f64::consts::TAU) {
        let q = (p_re * p_re + p_im * p_im - 1.0).sqrt();
        let text = format!(
            r#"{{"generator": {{"type": "disc", "p": ["{p_re:?}", "{p_im:?}"], "q": ["{:?}", "{:?}"]}}}}"#,
            q * arg.cos(),
            q * arg.sin()
        );
        let config = job::parse_config(&text).unwrap();
        let report = job::run(Command::Classify, &config).unwrap();
        let json = job::to_json(&report);
        let back: job::JobReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, report);
    }
}
