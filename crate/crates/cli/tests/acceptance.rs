//! Acceptance suite: one test per criterion, each printing a pass line
//! (run with `--nocapture` to see them). Criteria cover the worked
//! d=1 example, end-to-end certification in d=2, mutation soundness of the
//! verifier binary, the sampled margin law, Monte Carlo density agreement,
//! the thickened-lattice demo, spectrum oracle equivalence, and gap
//! certificate round-trips.

use num_traits::ToPrimitive;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use avoidset::builder::{build, Budgets, ConstructionManifest, FSpec};
use avoidset::certify::{certify_manifest, VerifyDepth};
use avoidset::exact::{rat, rat_int, ScaleValue};
use avoidset::manifest::{save_manifest, serialize_manifest};
use avoidset::norms::{NormSpec, VolumeEstimate};
use avoidset::oracle::{mc_density, pair_margin, thickened_lattice_demo};
use avoidset::spectrum::{
    find_gap, representable, spectrum_window, verify_gap, verify_gap_at_width, VerifyDepth as GapDepth,
};
use avoidset::{Int, Rat, SamplerConfig};

/// Criteria run one at a time so the stated runtime bounds are meaningful.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn manifest_d1() -> &'static ConstructionManifest {
    static M: OnceLock<ConstructionManifest> = OnceLock::new();
    M.get_or_init(|| {
        build(
            &NormSpec::l2(1).unwrap(),
            &FSpec::InvPoly { alpha: rat_int(1) },
            2,
            &Budgets::default(),
        )
        .unwrap()
    })
}

fn manifest_d2() -> &'static ConstructionManifest {
    static M: OnceLock<ConstructionManifest> = OnceLock::new();
    M.get_or_init(|| {
        build(
            &NormSpec::l2(2).unwrap(),
            &FSpec::InvPoly { alpha: rat_int(1) },
            3,
            &Budgets::default(),
        )
        .unwrap()
    })
}

#[test]
fn criterion_1_worked_example_d1() {
    let _guard = serial();
    let t0 = Instant::now();
    let m = build(
        &NormSpec::l2(1).unwrap(),
        &FSpec::InvPoly { alpha: rat_int(1) },
        2,
        &Budgets::default(),
    )
    .unwrap();
    let s1 = &m.stages[0];
    assert_eq!(s1.r, ScaleValue::from_rat(rat(201, 2)), "R_1");
    assert_eq!(s1.eps, rat(1, 4), "eps_1");
    assert_eq!(s1.anchor, vec![Int::from(11)], "anchor");
    assert_eq!(s1.ball_count, Int::from(26), "N_1");
    // mu(P_1) = N_1 * omega * r^d with omega the exact unit-ball length 2.
    let VolumeEstimate::Exact { coeff, pi_pow } =
        m.norm.unit_ball_volume(0, 0.9, 0).unwrap()
    else {
        panic!("l2 d=1 must have a closed-form volume");
    };
    assert_eq!(pi_pow, 0);
    let mu_p1 = Rat::from_integer(s1.ball_count.clone()) * coeff * s1.ball_radius.pow(1);
    assert_eq!(mu_p1, rat_int(13), "mu(P_1)");
    assert_eq!(m.stages[1].r, ScaleValue::from_rat(rat(20101, 2)), "R_2");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "runtime {dt:?} exceeds 1 s");
    println!("criterion 1 PASS: worked d=1 example reproduced exactly ({dt:?})");
}

#[test]
fn criterion_2_end_to_end_certification_d2() {
    let _guard = serial();
    let t0 = Instant::now();
    let m = manifest_d2();
    // R_1 in [256, 300] and R_1^2 a non-representable integer per the oracle.
    let r1 = &m.stages[0].r;
    assert!(*r1 >= ScaleValue::from_int(256) && *r1 <= ScaleValue::from_int(300));
    let r1_sq = r1.squared();
    assert!(r1_sq.is_integer(), "R_1^2 must be an integer");
    assert!(
        !representable(2, &r1_sq.to_integer(), 1 << 24).unwrap(),
        "R_1^2 must not be a sum of two squares"
    );
    // Deep verification through the binary must exit 0.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d2.json");
    save_manifest(m, &path).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_avoidset"))
        .args(["verify", path.to_str().unwrap(), "--deep"])
        .output()
        .unwrap();
    assert!(out.status.success(), "deep verify failed: {}", String::from_utf8_lossy(&out.stdout));
    // And the in-process deep certification agrees.
    let report = certify_manifest(m, VerifyDepth::Deep, &Budgets::default()).unwrap();
    assert!(report.certified(), "{}", report.summary());
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "runtime {dt:?} exceeds 30 s");
    println!("criterion 2 PASS: d=2 3-stage build deep-certifies, R_1 = {r1} ({dt:?})");
}

#[test]
fn criterion_3_mutation_soundness() {
    let _guard = serial();
    let t0 = Instant::now();
    let base = manifest_d1();
    let mut corpus: Vec<(&str, ConstructionManifest)> = Vec::new();

    let mut m = base.clone();
    m.stages[0].r = ScaleValue::from_int(100);
    m.stages[0].gap.r = ScaleValue::from_int(100);
    corpus.push(("R_1 onto a lattice value", m));

    let mut m = base.clone();
    m.stages[1].r = ScaleValue::from_rat(rat(201, 2) * rat_int(99));
    m.stages[1].gap.r = m.stages[1].r.clone();
    corpus.push(("growth only 99x", m));

    let mut m = base.clone();
    m.stages[0].side = Int::from(10_000);
    m.stages[0].ball_count = Int::from(10_001);
    corpus.push(("inflated side", m));

    let mut m = base.clone();
    m.stages[1].anchor = vec![Int::from(100)];
    corpus.push(("anchor inside the inner ball", m));

    let mut m = base.clone();
    m.stages[1].eps = rat(1, 2);
    m.stages[1].gap.eps = rat(1, 2);
    corpus.push(("eps above the gap", m));

    let mut m = base.clone();
    m.s_min = ScaleValue::from_rat(rat(1, 4));
    corpus.push(("ball radius above half the lattice spacing", m));

    assert!(corpus.len() >= 6);
    let dir = tempfile::tempdir().unwrap();
    for (i, (name, m)) in corpus.iter().enumerate() {
        let path = dir.path().join(format!("tampered-{i}.json"));
        std::fs::write(&path, serialize_manifest(m)).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_avoidset"))
            .args(["verify", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(
            out.status.code(),
            Some(1),
            "'{name}': expected exit 1, got {:?}\n{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "runtime {dt:?} exceeds 10 s");
    println!("criterion 3 PASS: {} tamperings all rejected with exit 1 ({dt:?})", corpus.len());
}

#[test]
fn criterion_4_margin_law() {
    let _guard = serial();
    let t0 = Instant::now();
    for (label, m) in [("d=1", manifest_d1()), ("d=2", manifest_d2())] {
        let stages = m.stages.len() as u64;
        let per_stage = 100_000u64 / stages;
        for st in &m.stages {
            let cfg = SamplerConfig {
                seed: 0x4a11 + st.n as u64,
                samples: per_stage,
                stage: Some(st.n),
            };
            let rep = pair_margin(m, &cfg).unwrap();
            let bound = st.eps_prev.to_f64().unwrap() / 2.0 - 1e-9;
            assert!(
                rep.min_margin >= bound,
                "{label} stage {}: margin {} below eps_prev/2 = {}",
                st.n,
                rep.min_margin,
                bound + 1e-9
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "runtime {dt:?} exceeds 30 s");
    println!("criterion 4 PASS: sampled margins respect eps_prev/2 on every stage ({dt:?})");
}

#[test]
fn criterion_5_density_consistency() {
    let _guard = serial();
    let t0 = Instant::now();
    let m = manifest_d1();
    let cfg = SamplerConfig { seed: 0xd2175, samples: 1_000_000, stage: Some(1) };
    let est = mc_density(m, 1, &cfg).unwrap();
    let exact = 13.0 / 201.0;
    assert!((est.analytic - exact).abs() < 1e-12);
    assert!(
        (est.estimate - exact).abs() <= 4.0 * est.std_error,
        "estimate {} vs exact {exact}, se {}",
        est.estimate,
        est.std_error
    );
    let f_bound = 2.0 / 201.0;
    assert!((est.bound_f - f_bound).abs() < 1e-12);
    assert!(est.estimate > f_bound, "density must exceed f(R_1)");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "runtime {dt:?} exceeds 30 s");
    println!(
        "criterion 5 PASS: 10^6-sample density {:.5} within 4 se of 13/201 and above 2/201 ({dt:?})",
        est.estimate
    );
}

#[test]
fn criterion_6_thickened_lattice_demo() {
    let _guard = serial();
    let t0 = Instant::now();
    let linf = NormSpec::linf(2).unwrap();
    let cfg = SamplerConfig::new(0xde30, 10_000);
    let rep = thickened_lattice_demo(&linf, &rat(1, 8), &cfg).unwrap();
    assert!(rep.all_near_integers);
    assert!(
        rep.min_half_distance_f64() >= 0.25 - 1e-12,
        "min distance {} below 1/4",
        rep.min_half_distance_f64()
    );
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "runtime {dt:?} exceeds 5 s");
    println!(
        "criterion 6 PASS: 10^4 thickened-lattice pairs stay >= 1/4 from half-integers ({dt:?})"
    );
}

#[test]
fn criterion_7_spectrum_oracle_equivalence() {
    let _guard = serial();
    let t0 = Instant::now();
    fn brute_representable(d: usize, k: u64) -> bool {
        fn rec(d: usize, k: u64) -> bool {
            if d == 1 {
                let r = (k as f64).sqrt() as u64;
                return (r.saturating_sub(1)..=r + 1).any(|x| x * x == k);
            }
            let top = (k as f64).sqrt() as u64 + 1;
            (0..=top).filter(|x| x * x <= k).any(|x| rec(d - 1, k - x * x))
        }
        rec(d, k)
    }
    for d in 1..=3usize {
        let norm = NormSpec::l2(d).unwrap();
        let win = spectrum_window(
            &norm,
            &ScaleValue::zero(),
            &ScaleValue::from_int(50),
            10_000_000,
        )
        .unwrap();
        let got: Vec<ScaleValue> = win.values.iter().map(|v| v.value.clone()).collect();
        let expect: Vec<ScaleValue> = (0..=2500u64)
            .filter(|&k| brute_representable(d, k))
            .map(|k| ScaleValue::sqrt_of(rat(k as i64, 1)))
            .collect();
        assert_eq!(got, expect, "spectrum mismatch at d={d}");
    }
    assert!(!representable(2, &Int::from(99), 1 << 24).unwrap());
    assert!(!representable(3, &Int::from(7), 1 << 24).unwrap());
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "runtime {dt:?} exceeds 10 s");
    println!("criterion 7 PASS: spectra match exhaustive decomposition search ({dt:?})");
}

#[test]
fn criterion_8_gap_round_trip() {
    let _guard = serial();
    let t0 = Instant::now();
    let budgets = Budgets { enum_points: 2_000_000_000, ..Budgets::default() };
    let tri = NormSpec::polytope(
        2,
        vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ],
    )
    .unwrap();
    // 100 invocations across six norms, lower bounds up to 10^4. The
    // enumeration-backed norms carry the large lowers sparingly (their
    // verified annuli contain ~3*10^8 lattice points at 10^4).
    let mut cases: Vec<(NormSpec, Rat)> = Vec::new();
    let spread =
        |lo: &[i64]| -> Vec<Rat> { lo.iter().map(|&v| rat(v, 1) + rat(1, 7)).collect() };
    for l in spread(&[1, 3, 9, 27, 81, 200, 500, 900, 1500, 2500, 4000, 5500, 7000, 8500, 9000,
        9300, 9600, 9800, 9900, 9999])
    {
        cases.push((NormSpec::l2(1).unwrap(), l));
    }
    for l in spread(&[2, 5, 11, 29, 83, 210, 520, 950, 1600, 2600, 4100, 5700, 7200, 8600, 9100,
        9400, 9650, 9850, 9925, 9999])
    {
        cases.push((NormSpec::l2(2).unwrap(), l));
    }
    for l in spread(&[1, 4, 10, 31, 90, 250, 600, 1100, 1900, 2900, 4300, 6000, 7500, 8800, 9200,
        9500, 9700, 9875, 9950, 9999])
    {
        cases.push((NormSpec::l2(3).unwrap(), l));
    }
    for l in spread(&[5, 26, 120, 700, 1900, 2400, 3000, 3600, 4200, 5000, 6500, 8000, 9000,
        10_000])
    {
        cases.push((NormSpec::linf(2).unwrap(), l));
    }
    for l in spread(&[7, 33, 150, 800, 2100, 2700, 3300, 3900, 4600, 5400, 7000, 8500, 9500,
        10_000])
    {
        cases.push((NormSpec::l1(2).unwrap(), l));
    }
    for l in spread(&[3, 17, 60, 90, 140, 260, 420, 600, 800, 1000, 1100, 1200]) {
        cases.push((tri.clone(), l));
    }
    assert_eq!(cases.len(), 100);
    for (norm, lower) in &cases {
        let lw = ScaleValue::from_rat(lower.clone());
        let gap = find_gap(norm, &lw, &budgets)
            .unwrap_or_else(|e| panic!("find_gap({norm}, {lower}) failed: {e}"));
        assert!(gap.r >= lw, "{norm}: R must be >= lower");
        assert!(
            verify_gap(norm, &gap, &budgets).unwrap(),
            "{norm} at lower {lower}: round trip failed"
        );
    }
    // Widened-eps negatives: tripling eps must break known-tight gaps.
    let l2 = NormSpec::l2(2).unwrap();
    let g = find_gap(&l2, &ScaleValue::from_rat(rat(6, 5)), &budgets).unwrap();
    let out = verify_gap_at_width(&l2, &g, &(&g.eps * rat_int(3)), GapDepth::Deep, &budgets)
        .unwrap();
    assert!(!out.ok, "3x widened l2 gap must fail");
    let linf = NormSpec::linf(2).unwrap();
    let g = find_gap(&linf, &ScaleValue::from_rat(rat(26, 5)), &budgets).unwrap();
    let out =
        verify_gap_at_width(&linf, &g, &(&g.eps * rat_int(3)), GapDepth::Shallow, &budgets)
            .unwrap();
    assert!(!out.ok, "3x widened linf gap must fail");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "runtime {dt:?} exceeds 60 s");
    println!(
        "criterion 8 PASS: {} gap certificates round-trip; widened negatives fail ({dt:?})",
        cases.len()
    );
}
