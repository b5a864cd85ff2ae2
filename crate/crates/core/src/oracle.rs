//! Randomized, construction-independent evidence: membership, uniform
//! sampling, pairwise distance margins, Monte Carlo density, the thickened
//! lattice counterexample, and a small-scale exhaustive pair check.
//!
//! Sampling is seeded and replayable. Verdict-feeding quantities are
//! computed exactly (sampled coordinates are dyadic rationals, so converting
//! them is lossless); floats appear only in reported estimates.

use std::cmp::Ordering;

use num_bigint::RandBigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::ConstructionManifest;
use crate::exact::{ceil_rat, floor_rat, format_rat, ScaleValue};
use crate::norms::{LpExp, NormKind, NormSpec};
use crate::{Error, Int, Point, Rat, Result};

/// Deterministic sampler configuration: identical configs replay the same
/// stream.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: u64,
    pub stage: Option<usize>,
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        SamplerConfig { seed, samples, stage: None }
    }

    pub fn with_stage(mut self, n: usize) -> Self {
        self.stage = Some(n);
        self
    }
}

/// The seeded stream for a config.
pub fn rng_for(cfg: &SamplerConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

/// Exact membership: y lies within ball_radius of some cube lattice point
/// of some stage.
pub fn contains(m: &ConstructionManifest, y: &[Rat]) -> Result<bool> {
    if y.len() != m.dim {
        return Err(Error::DimensionMismatch { expected: m.dim, got: y.len() });
    }
    for st in &m.stages {
        let radius = ScaleValue::from_rat(st.ball_radius.clone());
        // Candidate centers lie within Euclidean distance r/c_lo of y.
        let w = &st.ball_radius / &m.constants.c_lo;
        let mut ranges: Vec<(Int, Int)> = Vec::with_capacity(m.dim);
        let mut empty = false;
        for i in 0..m.dim {
            let lo = ceil_rat(&(&y[i] - &w)).max(st.anchor[i].clone());
            let hi = floor_rat(&(&y[i] + &w)).min(&st.anchor[i] + &st.side);
            if lo > hi {
                empty = true;
                break;
            }
            ranges.push((lo, hi));
        }
        if empty {
            continue;
        }
        let mut center = vec![Int::zero(); m.dim];
        if probe_centers(m, &ranges, y, &radius, 0, &mut center)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn probe_centers(
    m: &ConstructionManifest,
    ranges: &[(Int, Int)],
    y: &[Rat],
    radius: &ScaleValue,
    level: usize,
    center: &mut Vec<Int>,
) -> Result<bool> {
    if level == ranges.len() {
        let diff: Vec<Rat> = (0..m.dim)
            .map(|i| Rat::from_integer(center[i].clone()) - &y[i])
            .collect();
        return Ok(m.norm.eval(&diff)?.cmp(radius) == Ordering::Less);
    }
    let (lo, hi) = &ranges[level];
    let mut c = lo.clone();
    while &c <= hi {
        center[level] = c.clone();
        if probe_centers(m, ranges, y, radius, level + 1, center)? {
            return Ok(true);
        }
        c += 1;
    }
    Ok(false)
}

/// One uniform sample from the stage-n block: a uniform lattice center in
/// the cube, plus a rejection-sampled offset in the rho-ball.
pub fn sample_point(
    m: &ConstructionManifest,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Point> {
    let st = m.stage(n)?;
    let upper = &st.side + 1u32;
    let mut point: Point = (0..m.dim)
        .map(|i| {
            let off = rng.gen_bigint_range(&Int::zero(), &upper);
            Rat::from_integer(&st.anchor[i] + off)
        })
        .collect();
    let offset = sample_ball_offset(&m.norm, &m.constants.c_lo, &st.ball_radius, rng)?;
    for (p, o) in point.iter_mut().zip(offset) {
        *p += o;
    }
    Ok(point)
}

/// Uniform offset in the open rho-ball of the given radius, by rejection
/// from its Euclidean bounding box.
fn sample_ball_offset(
    norm: &NormSpec,
    c_lo: &Rat,
    radius: &Rat,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Rat>> {
    let h = (radius / c_lo).to_f64().unwrap();
    let bound = ScaleValue::from_rat(radius.clone());
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..norm.dim()).map(|_| rng.gen_range(-h..h)).collect();
        let xr: Vec<Rat> = x.iter().map(|f| Rat::from_float(*f).unwrap()).collect();
        if norm.eval(&xr)?.cmp(&bound) == Ordering::Less {
            return Ok(xr);
        }
    }
    Err(Error::RejectionBudget)
}

/// Margin evidence over sampled pairs.
#[derive(Clone, Debug)]
pub struct PairMarginReport {
    /// Certified lower bound on min over pairs and j of |rho(x-y) - R_j|.
    pub min_margin: f64,
    pub pairs: u64,
}

/// Sample pairs (within a stage, or across random stages) and bound the
/// distance margin to every avoided radius from below.
pub fn pair_margin(m: &ConstructionManifest, cfg: &SamplerConfig) -> Result<PairMarginReport> {
    if m.stages.is_empty() {
        return Err(Error::InvalidParam("manifest has no stages".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radii: Vec<&ScaleValue> = m.stages.iter().map(|s| &s.r).collect();
    let enclosures: Vec<(Rat, Rat)> = radii.iter().map(|r| r.enclosure(80)).collect();
    let mut min_margin = f64::INFINITY;
    for _ in 0..cfg.samples {
        let (sa, sb) = match cfg.stage {
            Some(n) => (n, n),
            None => (
                rng.gen_range(1..=m.stages.len()),
                rng.gen_range(1..=m.stages.len()),
            ),
        };
        let x = sample_point(m, sa, &mut rng)?;
        let y = sample_point(m, sb, &mut rng)?;
        let diff: Vec<Rat> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let v = m.norm.eval(&diff)?;
        let (vlo, vhi) = v.enclosure(80);
        for (j, r) in radii.iter().enumerate() {
            let (rlo, rhi) = &enclosures[j];
            // Certified |v - R_j| >= max(vlo - rhi, rlo - vhi) (exact sign
            // via the scale ordering, enclosure width 2^-80).
            let lb = if v >= **r { &vlo - rhi } else { rlo - &vhi };
            let lbf = lb.to_f64().unwrap_or(0.0);
            if lbf < min_margin {
                min_margin = lbf;
            }
        }
    }
    Ok(PairMarginReport { min_margin, pairs: cfg.samples })
}

/// Monte Carlo density estimate at scale R_n.
#[derive(Clone, Debug)]
pub struct DensityEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Exact analytic density of the first n blocks inside the R_n ball
    /// (disjoint-ball volumes; the unit-ball volume cancels).
    pub analytic: f64,
    /// The decay bound f(R_n) the density must exceed.
    pub bound_f: f64,
    pub samples: u64,
}

/// Uniform sampling of the rho-ball of radius R_n, scored by exact
/// membership.
pub fn mc_density(
    m: &ConstructionManifest,
    n: usize,
    cfg: &SamplerConfig,
) -> Result<DensityEstimate> {
    if cfg.samples == 0 {
        return Err(Error::InvalidParam("zero samples".into()));
    }
    let st = m.stage(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rf = st.r.to_f64();
    let h = rf / m.constants.c_lo.to_f64().unwrap();
    let mut hits = 0u64;
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    let max_attempts = cfg.samples.saturating_mul(1000);
    let mut x = vec![0f64; m.dim];
    while accepted < cfg.samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::RejectionBudget);
        }
        for c in x.iter_mut() {
            *c = rng.gen_range(-h..h);
        }
        let xr: Vec<Rat> = x.iter().map(|f| Rat::from_float(*f).unwrap()).collect();
        if m.norm.eval(&xr)?.cmp(&st.r) != Ordering::Less {
            continue;
        }
        accepted += 1;
        if contains(m, &xr)? {
            hits += 1;
        }
    }
    let p = hits as f64 / cfg.samples as f64;
    let std_error = (p * (1.0 - p) / cfg.samples as f64).sqrt();
    // Analytic: sum over k <= n of N_k r_k^d, divided by R_n^d; every block
    // k <= n lies inside the R_n ball, later blocks lie outside.
    let mut blocks = Rat::zero();
    for k in 1..=n {
        let sk = &m.stages[k - 1];
        blocks += Rat::from_integer(sk.ball_count.clone()) * sk.ball_radius.pow(m.dim as i32);
    }
    let rd = st.r.squared().pow(m.dim as i32);
    // blocks / R^d = blocks / sqrt(rd): report as float.
    let analytic = blocks.to_f64().unwrap_or(f64::NAN) / rd.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(DensityEstimate {
        estimate: p,
        std_error,
        analytic,
        bound_f: m.f.value_f64(rf),
        samples: cfg.samples,
    })
}

/// Report for the thickened-lattice counterexample.
#[derive(Clone, Debug)]
pub struct DemoReport {
    /// Exact minimum observed distance from a sampled pair distance to the
    /// nearest half-integer.
    pub min_half_distance: Rat,
    /// Every sampled distance stayed within 2*thickening of an integer.
    pub all_near_integers: bool,
    /// Exact density of the thickened lattice per unit cell.
    pub cell_density: Rat,
    pub pairs: u64,
}

impl DemoReport {
    pub fn min_half_distance_f64(&self) -> f64 {
        self.min_half_distance.to_f64().unwrap_or(f64::NAN)
    }
}

/// The polytope-norm counterexample: the full integer lattice thickened by
/// `thickening` in l1 or linf has positive density but misses every
/// half-integer distance.
pub fn thickened_lattice_demo(
    norm: &NormSpec,
    thickening: &Rat,
    cfg: &SamplerConfig,
) -> Result<DemoReport> {
    let quarter = Rat::new(Int::one(), Int::from(4));
    if thickening >= &quarter {
        return Err(Error::InvalidParam(
            "thickening must be < 1/4 for the half-integer claim".into(),
        ));
    }
    if !thickening.is_positive() {
        return Err(Error::InvalidParam("thickening must be positive".into()));
    }
    let d = norm.dim();
    let cell_density = match norm.kind() {
        NormKind::Lp(LpExp::Infinity) => {
            (thickening * Rat::from_integer(Int::from(2))).pow(d as i32)
        }
        NormKind::Lp(LpExp::Finite(p)) if p.is_one() => {
            let mut fact = Rat::one();
            for k in 2..=d {
                fact *= Rat::from_integer(Int::from(k as u64));
            }
            (thickening * Rat::from_integer(Int::from(2))).pow(d as i32) / fact
        }
        _ => {
            return Err(Error::InvalidParam(
                "demo supports the l1 and linf norms only".into(),
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let two_thick = thickening * Rat::from_integer(Int::from(2));
    let half = Rat::new(Int::one(), Int::from(2));
    let mut min_half_distance: Option<Rat> = None;
    let mut all_near = true;
    for _ in 0..cfg.samples {
        let mut pts: Vec<Vec<Rat>> = Vec::with_capacity(2);
        for _ in 0..2 {
            let center: Vec<Rat> = (0..d)
                .map(|_| Rat::from_integer(Int::from(rng.gen_range(-1000i64..=1000))))
                .collect();
            let offset = sample_ball_offset(norm, &Rat::one(), thickening, &mut rng)?;
            pts.push(center.iter().zip(&offset).map(|(c, o)| c + o).collect());
        }
        let diff: Vec<Rat> = pts[0].iter().zip(&pts[1]).map(|(a, b)| a - b).collect();
        let ScaleValue::Rat(dist) = norm.eval(&diff)? else {
            return Err(Error::InvalidParam("demo norm must have rational values".into()));
        };
        // Distance to the nearest integer must be at most 2*thickening.
        let frac = &dist - Rat::from_integer(dist.floor().to_integer());
        let to_int = frac.clone().min(Rat::one() - &frac);
        if to_int > two_thick {
            all_near = false;
        }
        // Distance to the nearest half-integer.
        let to_half = if frac >= half {
            &frac - &half
        } else {
            &half - &frac
        };
        if min_half_distance.as_ref().map_or(true, |m| to_half < *m) {
            min_half_distance = Some(to_half);
        }
    }
    Ok(DemoReport {
        min_half_distance: min_half_distance.unwrap_or_else(|| half.clone()),
        all_near_integers: all_near,
        cell_density,
        pairs: cfg.samples,
    })
}

/// Exhaustive center-pair check at stage n: for every difference of cube
/// lattice points and every avoided radius, the eps_{n-1}/2-widened
/// distance interval must exclude the radius. Together with the triangle
/// inequality this covers all of P_n x P_n.
pub fn brute_pair_check(
    m: &ConstructionManifest,
    n: usize,
    budget: u64,
) -> Result<Option<String>> {
    let st = m.stage(n)?;
    let side = st
        .side
        .to_i64()
        .ok_or_else(|| Error::BudgetExceeded("stage side exceeds i64".into()))?;
    let diffs = (2 * side + 1).checked_pow(m.dim as u32).and_then(|v| v.try_into().ok());
    let Some(diff_count): Option<u64> = diffs else {
        return Err(Error::BudgetExceeded("difference grid too large".into()));
    };
    if diff_count > budget {
        return Err(Error::BudgetExceeded(format!(
            "difference grid {diff_count} exceeds budget {budget}"
        )));
    }
    let half_eps = &st.eps_prev / Rat::from_integer(Int::from(2));
    let mut delta = vec![0i64; m.dim];
    let violation = scan_diffs(m, side, &half_eps, 0, &mut delta)?;
    Ok(violation)
}

fn scan_diffs(
    m: &ConstructionManifest,
    side: i64,
    half_eps: &Rat,
    level: usize,
    delta: &mut Vec<i64>,
) -> Result<Option<String>> {
    if level == m.dim {
        let x: Vec<Rat> = delta.iter().map(|&c| Rat::from_integer(Int::from(c))).collect();
        let v = m.norm.eval(&x)?;
        for st in &m.stages {
            if v.abs_diff_cmp(&st.r, half_eps) != Ordering::Greater {
                return Ok(Some(format!(
                    "center difference {delta:?} has rho {} within {} of R_{}",
                    v,
                    format_rat(half_eps),
                    st.n
                )));
            }
        }
        return Ok(None);
    }
    for c in -side..=side {
        delta[level] = c;
        if let Some(w) = scan_diffs(m, side, half_eps, level + 1, delta)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, Budgets, FSpec};
    use crate::exact::{rat, rat_int};

    fn worked() -> ConstructionManifest {
        build(
            &NormSpec::l2(1).unwrap(),
            &FSpec::InvPoly { alpha: rat_int(1) },
            2,
            &Budgets::default(),
        )
        .unwrap()
    }

    #[test]
    fn contains_examples() {
        let m = worked();
        assert!(contains(&m, &[rat(111, 10)]).unwrap());
        assert!(!contains(&m, &[rat(23, 2)]).unwrap());
        assert!(!contains(&m, &[Rat::zero()]).unwrap());
        // Stage-2 block membership.
        assert!(contains(&m, &[rat(1006, 1)]).unwrap());
    }

    #[test]
    fn samples_are_members() {
        let m = worked();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = sample_point(&m, 1, &mut rng).unwrap();
            assert!(contains(&m, &p).unwrap());
            // Within 1/4 of an integer in [11, 36].
            let v = &p[0];
            assert!(*v > rat(43, 4) && *v < rat(145, 4));
        }
        // Stage 2 points sit outside 10 R_1.
        for _ in 0..100 {
            let p = sample_point(&m, 2, &mut rng).unwrap();
            assert!(p[0].abs() > rat_int(1005));
        }
        assert!(matches!(
            sample_point(&m, 3, &mut rng),
            Err(Error::StageNotFound(3))
        ));
    }

    #[test]
    fn margins_respect_the_half_eps_law() {
        let m = worked();
        for n in [1usize, 2] {
            let cfg = SamplerConfig::new(11, 3000).with_stage(n);
            let rep = pair_margin(&m, &cfg).unwrap();
            let bound = m.stages[n - 1].eps_prev.to_f64().unwrap() / 2.0;
            assert!(
                rep.min_margin >= bound - 1e-9,
                "stage {n}: {} < {}",
                rep.min_margin,
                bound
            );
        }
        let cfg = SamplerConfig::new(12, 2000);
        let rep = pair_margin(&m, &cfg).unwrap();
        assert!(rep.min_margin >= 0.125 - 1e-9);
    }

    #[test]
    fn density_estimate_matches_exact_value() {
        let m = worked();
        let cfg = SamplerConfig::new(5, 40_000);
        let est = mc_density(&m, 1, &cfg).unwrap();
        let exact = 13.0 / 201.0;
        assert!((est.analytic - exact).abs() < 1e-12);
        assert!(
            (est.estimate - exact).abs() <= 4.0 * est.std_error,
            "{} vs {exact} (se {})",
            est.estimate,
            est.std_error
        );
        assert!(est.estimate > est.bound_f);
        assert!(mc_density(&m, 1, &SamplerConfig::new(5, 0)).is_err());
    }

    #[test]
    fn demo_misses_half_integers() {
        let linf = NormSpec::linf(2).unwrap();
        let t = rat(1, 8);
        let rep = thickened_lattice_demo(&linf, &t, &SamplerConfig::new(3, 2000)).unwrap();
        assert!(rep.all_near_integers);
        assert!(rep.min_half_distance >= rat(1, 4));
        assert_eq!(rep.cell_density, rat(1, 16));
        let l1 = NormSpec::l1(2).unwrap();
        let rep = thickened_lattice_demo(&l1, &t, &SamplerConfig::new(3, 2000)).unwrap();
        assert!(rep.min_half_distance >= rat(1, 4));
        assert_eq!(rep.cell_density, rat(1, 32));
        // Boundary rejection.
        assert!(thickened_lattice_demo(&linf, &rat(1, 4), &SamplerConfig::new(3, 10)).is_err());
    }

    #[test]
    fn brute_pairs_pass_and_fail() {
        let m = worked();
        assert_eq!(brute_pair_check(&m, 1, 1 << 20).unwrap(), None);
        assert_eq!(brute_pair_check(&m, 2, 1 << 20).unwrap(), None);
        // Tamper R_1 onto an integer reachable as a stage-2 center distance.
        let mut bad = m.clone();
        bad.stages[0].r = ScaleValue::from_int(100);
        let hit = brute_pair_check(&bad, 2, 1 << 20).unwrap();
        assert!(hit.is_some());
        // Budget surfaces as an error.
        assert!(matches!(
            brute_pair_check(&m, 2, 10),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
