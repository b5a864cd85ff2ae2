//! Property suites: norm axioms and equivalence soundness on large random
//! rational samples (exact comparisons throughout), plus proptest
//! round-trip invariants for the exact number formats.

use std::cmp::Ordering;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use avoidset::exact::{
    format_rat, parse_rat, parse_scale, rat, sign_one_radical, ScaleValue,
};
use avoidset::norms::NormSpec;
use avoidset::Rat;

fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rat> {
    (0..d)
        .map(|_| rat(rng.gen_range(-100..=100), rng.gen_range(1..=16)))
        .collect()
}

fn built_in_norms() -> Vec<NormSpec> {
    vec![
        NormSpec::l1(2).unwrap(),
        NormSpec::l2(2).unwrap(),
        NormSpec::linf(3).unwrap(),
        NormSpec::l2(3).unwrap(),
        NormSpec::polytope(
            2,
            vec![
                vec![rat(1, 1), rat(0, 1)],
                vec![rat(0, 1), rat(1, 1)],
                vec![rat(1, 1), rat(1, 1)],
            ],
        )
        .unwrap(),
    ]
}

/// u + v >= w for nonnegative scales, decided exactly by squaring once:
/// (u+v)^2 = u^2 + v^2 + 2 sqrt(u^2 v^2).
fn sum_geq(u: &ScaleValue, v: &ScaleValue, w: &ScaleValue) -> bool {
    let (u2, v2, w2) = (u.squared(), v.squared(), w.squared());
    let a = &u2 + &v2 - &w2;
    let two = rat(2, 1);
    sign_one_radical(&a, &two, &(&u2 * &v2)) != Ordering::Less
}

#[test]
fn norm_axioms_hold_exactly_on_10k_vectors() {
    for norm in built_in_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa210e5);
        let d = norm.dim();
        for i in 0..10_000 {
            let x = random_vec(&mut rng, d);
            let vx = norm.eval(&x).unwrap();
            // Positivity off zero.
            let zero = x.iter().all(|c| c == &Rat::from_integer(0.into()));
            assert_eq!(vx.is_zero(), zero, "{norm} positivity at iter {i}");
            // Absolute homogeneity, compared through squares.
            let lam = rat(rng.gen_range(-12..=12), rng.gen_range(1..=8));
            let lx: Vec<Rat> = x.iter().map(|c| c * &lam).collect();
            let vlx = norm.eval(&lx).unwrap();
            assert_eq!(
                vlx.squared(),
                &lam * &lam * vx.squared(),
                "{norm} homogeneity at iter {i}"
            );
            // Triangle inequality.
            let y = random_vec(&mut rng, d);
            let vy = norm.eval(&y).unwrap();
            let s: Vec<Rat> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let vs = norm.eval(&s).unwrap();
            assert!(sum_geq(&vx, &vy, &vs), "{norm} triangle at iter {i}");
        }
    }
}

#[test]
fn equivalence_constants_sound_on_10k_vectors() {
    for norm in built_in_norms() {
        let consts = norm.equivalence_constants().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x50fd);
        let d = norm.dim();
        for i in 0..10_000 {
            let x = random_vec(&mut rng, d);
            let rho_sq = norm.eval(&x).unwrap().squared();
            let eucl_sq: Rat = x.iter().map(|c| c * c).sum();
            assert!(
                &consts.c_lo * &consts.c_lo * &eucl_sq <= rho_sq,
                "{norm} lower bound at iter {i}"
            );
            assert!(
                rho_sq <= &consts.c_hi * &consts.c_hi * &eucl_sq,
                "{norm} upper bound at iter {i}"
            );
        }
    }
}

#[test]
fn compare_agrees_with_eval_then_cmp() {
    for norm in built_in_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let x = random_vec(&mut rng, norm.dim());
            let t = if rng.gen_bool(0.5) {
                ScaleValue::from_rat(rat(rng.gen_range(0..=200), rng.gen_range(1..=8)))
            } else {
                ScaleValue::sqrt_of(rat(rng.gen_range(0..=500), 1))
            };
            let via_compare = norm.compare_to(&x, &t).unwrap();
            let via_eval = norm.eval(&x).unwrap().cmp(&t);
            assert_eq!(via_compare, via_eval);
        }
    }
}

#[test]
fn statistical_volume_for_l2_d2_brackets_pi() {
    let l2 = NormSpec::l2(2).unwrap();
    let n = 200_000u64;
    match l2.sample_unit_ball_volume(n, 0.95, 0xc1c1e).unwrap() {
        avoidset::VolumeEstimate::Statistical { estimate, lower_bound, .. } => {
            // Box volume 4, p = pi/4: se of the volume estimate is
            // 4 sqrt(p(1-p)/n).
            let p = std::f64::consts::PI / 4.0;
            let se = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (estimate - std::f64::consts::PI).abs() <= 4.0 * se,
                "estimate {estimate} vs pi, se {se}"
            );
            assert!(lower_bound <= std::f64::consts::PI);
        }
        other => panic!("expected statistical estimate, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn rational_text_round_trips(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = rat(p, q);
        let s = format_rat(&r);
        prop_assert_eq!(parse_rat(&s).unwrap(), r);
    }

    #[test]
    fn scale_text_round_trips(p in 0i64..100_000, q in 1i64..1000, root in proptest::bool::ANY) {
        let v = if root {
            ScaleValue::sqrt_of(rat(p, q))
        } else {
            ScaleValue::from_rat(rat(p, q))
        };
        let s = v.to_string();
        prop_assert_eq!(parse_scale(&s).unwrap(), v);
    }

    #[test]
    fn scale_ordering_matches_floats(a in 0i64..40_000, b in 0i64..40_000, q in 1i64..32) {
        let u = ScaleValue::sqrt_of(rat(a, q));
        let v = ScaleValue::from_rat(rat(b, 2 * q));
        let uf = (a as f64 / q as f64).sqrt();
        let vf = b as f64 / (2 * q) as f64;
        if (uf - vf).abs() > 1e-9 {
            let expect = if uf < vf { Ordering::Less } else { Ordering::Greater };
            prop_assert_eq!(u.cmp(&v), expect);
        }
    }
}
