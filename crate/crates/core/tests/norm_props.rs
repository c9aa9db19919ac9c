mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use tlseq::geometry::McConfig;
use tlseq::norms::*;
use tlseq::orbit::SpaceParams;

const EXPONENTS: [&str; 4] = ["1/2", "1", "2", "inf"];

fn exact() -> NormConfig {
    NormConfig::default()
}

fn setup(seed: u64, d: usize, atoms: usize) -> (ChaCha8Rng, SpaceParams, ExplicitSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ms = matrices(d);
    let a = &ms[rng.gen_range(0..ms.len())];
    let s = space(
        a,
        rng.gen_range(-1.0..1.0),
        EXPONENTS[rng.gen_range(0..4)],
        EXPONENTS[rng.gen_range(0..4)],
    );
    let e = random_sequence(&mut rng, d, -2, 2, atoms);
    (rng, s, e)
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous(seed in any::<u64>(), d in 1usize..=2, lam in -5.0f64..5.0) {
        let (_, s, e) = setup(seed, d, 8);
        let n = norm(&e.clone().into(), &s, &exact()).unwrap().value;
        let m = norm(&e.scaled(lam.into()).into(), &s, &exact()).unwrap().value;
        prop_assert!(close(m, lam.abs() * n), "{} vs {}", m, lam.abs() * n);
    }

    #[test]
    fn solid(seed in any::<u64>(), d in 1usize..=2) {
        let (mut rng, s, e) = setup(seed, d, 8);
        let n = norm(&e.clone().into(), &s, &exact()).unwrap().value;
        let mut smaller = ExplicitSequence::new(d);
        for (j, k, v) in e.iter() {
            if rng.gen_bool(0.7) {
                smaller.insert(j, k.clone(), v * rng.gen_range(0.0..=1.0)).unwrap();
            }
        }
        let m = norm(&smaller.into(), &s, &exact()).unwrap().value;
        prop_assert!(m <= n * (1.0 + 1e-9) + 1e-12, "{} > {}", m, n);
    }

    #[test]
    fn quasi_triangle(seed in any::<u64>(), d in 1usize..=2) {
        let (mut rng, s, a) = setup(seed, d, 5);
        let b = random_sequence(&mut rng, d, -2, 2, 5);
        let defect = r_triangle_defect(&a.into(), &b.into(), &s, &exact()).unwrap();
        prop_assert!(defect <= 1e-9, "defect {}", defect);
    }

    #[test]
    fn nonzero_sequences_have_positive_norm(seed in any::<u64>(), d in 1usize..=2) {
        let (_, s, e) = setup(seed, d, 6);
        prop_assert!(norm(&e.into(), &s, &exact()).unwrap().value > 0.0);
    }

    /// With `p = q` the norm is a weighted `ℓ^p` sum.
    #[test]
    fn diagonal_exponents_match_closed_form(seed in any::<u64>(), d in 1usize..=2, pi in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ms = matrices(d);
        let a = &ms[rng.gen_range(0..ms.len())];
        let s = space(a, rng.gen_range(-1.0..1.0), EXPONENTS[pi], EXPONENTS[pi]);
        let c: CoefficientSequence = random_sequence(&mut rng, d, -2, 2, 8).into();
        let closed = norm_closed_form_pq(&c, &s).unwrap().value;
        let general = norm_lp(&c, &s, &exact()).unwrap().value;
        prop_assert!(close(closed, general), "{} vs {}", closed, general);
    }

    /// Pointwise `ℓ^q ≥ ℓ^∞`, so the sup-sup norm sits below every finite `q`.
    #[test]
    fn sup_sup_is_below_finite_q(seed in any::<u64>(), d in 1usize..=2, qi in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ms = matrices(d);
        let a = &ms[rng.gen_range(0..ms.len())];
        let alpha = rng.gen_range(-1.0..1.0);
        let c: CoefficientSequence = random_sequence(&mut rng, d, -2, 2, 8).into();
        let sup = norm_sup_sup(&c, &space(a, alpha, "inf", "inf")).unwrap().value;
        let finite = norm_infty_q(&c, &space(a, alpha, "inf", EXPONENTS[qi]), &exact()).unwrap().value;
        prop_assert!(sup <= finite * (1.0 + 1e-12), "{} > {}", sup, finite);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), d in 1usize..=2) {
        let (_, _, e) = setup(seed, d, 10);
        let back = ExplicitSequence::from_json(&e.to_json()).unwrap();
        prop_assert_eq!(back, e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_agrees_with_monte_carlo(seed in any::<u64>(), d in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ms = matrices(d);
        let a = &ms[rng.gen_range(0..ms.len())];
        let s = space(a, rng.gen_range(-0.5..0.5), EXPONENTS[rng.gen_range(0..3)], EXPONENTS[rng.gen_range(0..4)]);
        let c: CoefficientSequence = random_sequence(&mut rng, d, -1, 1, 6).into();
        let ex = norm_lp(&c, &s, &exact()).unwrap();
        let cfg = NormConfig { method: Method::Mc, mc: McConfig { samples: 100_000, seed }, ..Default::default() };
        let mc = norm_lp(&c, &s, &cfg).unwrap();
        prop_assert_eq!(ex.error_bound, 0.0);
        prop_assert!(
            (ex.value - mc.value).abs() <= 5.0 * mc.error_bound.max(1e-12 * ex.value),
            "{} vs {} ± {}", ex.value, mc.value, mc.error_bound
        );
    }
}
