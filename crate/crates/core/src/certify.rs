//! Exact re-verification of a construction manifest: every inequality the
//! avoidance and density arguments rely on is re-checked from the manifest
//! alone, with exact arithmetic and outward-rounded interval endpoints.
//!
//! Certification deliberately avoids the builder's planning and search
//! code: cube containment, densities, and separations are re-derived here
//! from the stored fields, and gap certificates are re-verified by the
//! certificate checker, never re-found.

use std::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::builder::{Budgets, ConstructionManifest};
use crate::exact::{format_rat, sign_two_radicals, ScaleValue};
use crate::spectrum::{verify_gap_at_width, GapCertificate};
use crate::{Error, Int, Rat, Result};

pub use crate::spectrum::VerifyDepth;

/// One named check outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl NamedCheck {
    fn ok(name: &str, detail: impl Into<String>) -> Self {
        NamedCheck { name: name.into(), pass: true, detail: detail.into() }
    }
    fn fail(name: &str, detail: impl Into<String>) -> Self {
        NamedCheck { name: name.into(), pass: false, detail: detail.into() }
    }
}

/// All checks for one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageChecks {
    pub n: usize,
    pub checks: Vec<NamedCheck>,
}

/// The machine-checkable certification report.
#[derive(Clone, Debug, PartialEq)]
pub struct CertReport {
    pub overall: String,
    pub depth: String,
    pub global: Vec<NamedCheck>,
    pub stages: Vec<StageChecks>,
}

impl CertReport {
    pub fn certified(&self) -> bool {
        self.overall == "certified"
    }

    pub fn summary(&self) -> String {
        let mut lines = Vec::new();
        for c in &self.global {
            if !c.pass {
                lines.push(format!("global/{}: {}", c.name, c.detail));
            }
        }
        for st in &self.stages {
            for c in &st.checks {
                if !c.pass {
                    lines.push(format!("stage {}/{}: {}", st.n, c.name, c.detail));
                }
            }
        }
        if lines.is_empty() {
            "all checks passed".into()
        } else {
            lines.join("; ")
        }
    }
}

/// Per-stage density result with the exact cancelled-volume left-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityStage {
    pub n: usize,
    pub pass: bool,
    /// N_n * (eps_{n-1}/4)^d, exact.
    pub lhs: Rat,
    /// Approximate f(R_n) * R_n^d and slack ratio, for human consumption
    /// only (the pass verdict never reads these).
    pub rhs_approx: f64,
    pub slack_approx: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub pass: bool,
    pub stages: Vec<DensityStage>,
}

/// Avoidance margins per (stage, avoided index) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceReport {
    pub pass: bool,
    pub detail: String,
    /// (n, j, certified margin lower bound) for intra-block pairs at stage
    /// n against R_j, j < n.
    pub margins: Vec<(usize, usize, Rat)>,
}

/// rho at the cube vertex set: the exact maximum over the 2^d corners.
fn max_vertex_norm(m: &ConstructionManifest, n: usize) -> Result<ScaleValue> {
    let st = m.stage(n)?;
    let d = m.dim;
    if d > 20 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut best = ScaleValue::zero();
    for mask in 0u64..(1u64 << d) {
        let vertex: Vec<Rat> = (0..d)
            .map(|i| {
                let mut c = st.anchor[i].clone();
                if (mask >> i) & 1 == 1 {
                    c += &st.side;
                }
                Rat::from_integer(c)
            })
            .collect();
        let val = m.norm.eval(&vertex)?;
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// Manifest-level structural validation (field consistency, chaining).
fn check_structure_global(m: &ConstructionManifest) -> NamedCheck {
    let name = "manifest_structure";
    if m.dim == 0 || m.dim > 20 {
        return NamedCheck::fail(name, format!("unsupported dimension {}", m.dim));
    }
    if m.norm.dim() != m.dim {
        return NamedCheck::fail(name, "norm dimension differs from manifest dimension");
    }
    if !m.norm.is_exact_capable() {
        return NamedCheck::fail(name, "norm is not exact-capable");
    }
    if !m.eps0.is_positive() || m.eps0 > Rat::one() {
        return NamedCheck::fail(name, "eps0 must lie in (0, 1]");
    }
    if !m.constants.c_lo.is_positive() || m.constants.c_lo > m.constants.c_hi {
        return NamedCheck::fail(name, "equivalence constants must satisfy 0 < c_lo <= c_hi");
    }
    if m.stages.is_empty() {
        return NamedCheck::fail(name, "no stages");
    }
    if m.f.validate().is_err() {
        return NamedCheck::fail(name, "invalid decay function");
    }
    NamedCheck::ok(name, format!("{} stages, dim {}", m.stages.len(), m.dim))
}

/// Per-stage structural validation.
fn check_structure_stage(m: &ConstructionManifest, n: usize) -> NamedCheck {
    let name = "structure";
    let st = match m.stage(n) {
        Ok(s) => s,
        Err(_) => return NamedCheck::fail(name, "missing stage"),
    };
    if st.n != n {
        return NamedCheck::fail(name, format!("stage index {} at position {n}", st.n));
    }
    if st.anchor.len() != m.dim {
        return NamedCheck::fail(name, "anchor dimension mismatch");
    }
    if st.side.is_negative() {
        return NamedCheck::fail(name, "negative side");
    }
    if !st.eps.is_positive() {
        return NamedCheck::fail(name, "eps must be positive");
    }
    let expected_prev = if n == 1 { m.eps0.clone() } else { m.stages[n - 2].eps.clone() };
    if st.eps_prev != expected_prev {
        return NamedCheck::fail(
            name,
            format!(
                "eps_prev {} does not chain to {}",
                format_rat(&st.eps_prev),
                format_rat(&expected_prev)
            ),
        );
    }
    if st.eps > st.eps_prev {
        return NamedCheck::fail(name, "eps exceeds eps_prev (sequence must be non-increasing)");
    }
    let four = Rat::from_integer(Int::from(4));
    if st.ball_radius != &st.eps_prev / &four {
        return NamedCheck::fail(name, "ball_radius differs from eps_prev/4");
    }
    let expected_count = (&st.side + 1u32).pow(m.dim as u32);
    if st.ball_count != expected_count {
        return NamedCheck::fail(name, "ball_count differs from (side+1)^d");
    }
    if st.gap.r != st.r {
        return NamedCheck::fail(name, "gap certificate radius differs from stage radius");
    }
    if st.eps > st.gap.eps {
        return NamedCheck::fail(name, "stage eps exceeds the certified gap width");
    }
    NamedCheck::ok(name, "fields consistent")
}

/// Condition (a) at stage n: every avoided radius R_j, j <= n, keeps a
/// certified clearance of eps_n around it.
pub fn check_condition_a(
    m: &ConstructionManifest,
    n: usize,
    depth: VerifyDepth,
    budgets: &Budgets,
) -> Result<NamedCheck> {
    let name = "gap_a";
    let st = m.stage(n)?;
    for j in 1..=n {
        let cert: &GapCertificate = &m.stages[j - 1].gap;
        let out = verify_gap_at_width(&m.norm, cert, &st.eps, depth, budgets)?;
        if !out.ok {
            let witness = out
                .violation
                .map(|v| format!(" witness {v:?}"))
                .unwrap_or_default();
            return Ok(NamedCheck::fail(
                name,
                format!("R_{j} at width {}: {}{witness}", format_rat(&st.eps), out.reason),
            ));
        }
    }
    Ok(NamedCheck::ok(name, format!("clear at width {}", format_rat(&st.eps))))
}

/// Condition (b): R_n >= 100 R_{n-1} for every stage, exactly.
pub fn check_growth(m: &ConstructionManifest) -> NamedCheck {
    let name = "growth_b";
    for st in &m.stages {
        let prev = m.r_prev(st.n);
        let scaled = prev.scale(&Rat::from_integer(Int::from(100)));
        if st.r < scaled {
            return NamedCheck::fail(
                name,
                format!("stage {}: R = {} < 100 * {}", st.n, st.r, prev),
            );
        }
    }
    NamedCheck::ok(name, "hundredfold growth holds")
}

fn growth_at(m: &ConstructionManifest, n: usize) -> NamedCheck {
    let name = "growth_b";
    let st = &m.stages[n - 1];
    let prev = m.r_prev(n);
    let scaled = prev.scale(&Rat::from_integer(Int::from(100)));
    if st.r < scaled {
        NamedCheck::fail(name, format!("R = {} < 100 * {}", st.r, prev))
    } else {
        NamedCheck::ok(name, "R >= 100 R_prev")
    }
}

/// The volume-cancelled density inequality per stage:
/// N_n (eps_{n-1}/4)^d >= f(R_n) R_n^d. The unit-ball volume cancels from
/// both sides, so the verdict never reads it.
pub fn check_density(m: &ConstructionManifest) -> Result<DensityReport> {
    let mut stages = Vec::new();
    let mut pass = true;
    for st in &m.stages {
        let lhs = Rat::from_integer(st.ball_count.clone()) * st.ball_radius.pow(m.dim as i32);
        let ok = m.f.density_ok(&lhs, &st.r, m.dim)?;
        let rf = st.r.to_f64();
        let rhs_approx = m.f.value_f64(rf) * rf.powi(m.dim as i32);
        let slack_approx = if rhs_approx > 0.0 {
            lhs.to_f64().unwrap_or(f64::NAN) / rhs_approx
        } else {
            f64::INFINITY
        };
        pass &= ok;
        stages.push(DensityStage { n: st.n, pass: ok, lhs, rhs_approx, slack_approx });
    }
    Ok(DensityReport { pass, stages })
}

/// Balls within one stage stay disjoint: 2 * ball_radius <= s_min.
pub fn check_ball_disjoint(m: &ConstructionManifest, n: usize) -> Result<NamedCheck> {
    let name = "ball_disjoint";
    let st = m.stage(n)?;
    let double = &st.ball_radius * Rat::from_integer(Int::from(2));
    if ScaleValue::from_rat(double.clone()) <= m.s_min {
        Ok(NamedCheck::ok(
            name,
            format!("2r = {} <= s_min = {}", format_rat(&double), m.s_min),
        ))
    } else {
        Ok(NamedCheck::fail(
            name,
            format!("2r = {} exceeds s_min = {}", format_rat(&double), m.s_min),
        ))
    }
}

/// Outer containment: every thickened cube point stays strictly inside the
/// ball of radius R_n/2. Convexity reduces the cube maximum to its 2^d
/// vertices.
pub fn check_cube_fit(m: &ConstructionManifest, n: usize) -> Result<NamedCheck> {
    let name = "cube_fit";
    let st = m.stage(n)?;
    let half = st.r.scale(&Rat::new(Int::one(), Int::from(2)));
    let vmax = max_vertex_norm(m, n)?;
    if vmax.cmp_offset(&st.ball_radius, &half) == Ordering::Less {
        Ok(NamedCheck::ok(
            name,
            format!("max vertex rho {} + r < R/2", vmax),
        ))
    } else {
        Ok(NamedCheck::fail(
            name,
            format!("vertex rho {} + {} reaches R/2 = {}", vmax, format_rat(&st.ball_radius), half),
        ))
    }
}

/// Inner exclusion: the thickened cube stays strictly outside the ball of
/// radius 10 R_{n-1}. The closest box point q to the origin gives the sound
/// bound rho >= c_lo |q|_2 over the whole cube.
pub fn check_inner_exclusion(m: &ConstructionManifest, n: usize) -> Result<NamedCheck> {
    let name = "inner_exclusion";
    let st = m.stage(n)?;
    let prev = m.r_prev(n);
    // q = clamp of the origin into [anchor, anchor + side] per coordinate.
    let mut q_norm_sq = Rat::zero();
    for i in 0..m.dim {
        let lo = &st.anchor[i];
        let hi = lo + &st.side;
        let c = if lo.is_positive() {
            lo.clone()
        } else if hi.is_negative() {
            hi
        } else {
            Int::zero()
        };
        let cq = Rat::from_integer(c);
        q_norm_sq += &cq * &cq;
    }
    // c_lo * sqrt(q_norm_sq) >= 10 R_prev + ball_radius.
    let (rp, cc, qq) = prev.parts();
    let ten = Rat::from_integer(Int::from(10));
    let a = -(&ten * rp) - &st.ball_radius;
    let sign = sign_two_radicals(&a, &m.constants.c_lo, &q_norm_sq, &(-(ten * cc)), &qq);
    if sign != Ordering::Less {
        Ok(NamedCheck::ok(name, "cube clears the inner ball with margin"))
    } else {
        Ok(NamedCheck::fail(
            name,
            format!("c_lo |q| < 10 R_{} + r (anchor too close to origin)", n - 1),
        ))
    }
}

/// Cross-block separation: distances between stage m and stage n (m < n)
/// points lie in an interval that contains no avoided radius. Endpoints are
/// computed with outward dyadic rounding, then compared exactly.
pub fn check_cross_block(m: &ConstructionManifest, n: usize) -> Result<NamedCheck> {
    let name = "cross_block_separation";
    if n == 1 {
        return Ok(NamedCheck::ok(name, "no earlier blocks"));
    }
    let st = m.stage(n)?;
    let prev = m.r_prev(n);
    let sup_n_parts = max_vertex_norm(m, n)?;
    for earlier in 1..n {
        let st_m = m.stage(earlier)?;
        let sup_m = max_vertex_norm(m, earlier)?;
        for bits in [64u32, 128, 256] {
            // Sound outer bounds: sup rho over a block = vmax + ball_radius.
            let (_, sup_m_hi) = sup_m.enclosure(bits);
            let sup_m_hi = sup_m_hi + &st_m.ball_radius;
            let (_, sup_n_hi) = sup_n_parts.enclosure(bits);
            let sup_n_hi = sup_n_hi + &st.ball_radius;
            let (prev_lo, _) = prev.enclosure(bits);
            // Distances lie in (10 R_{n-1} - sup_m, sup_m + sup_n).
            let lo = Rat::from_integer(Int::from(10)) * prev_lo - &sup_m_hi;
            let hi = &sup_m_hi + &sup_n_hi;
            let mut undecided = false;
            for j in 1..=m.stages.len() {
                let rj = &m.stages[j - 1].r;
                let below = *rj <= ScaleValue::from_rat(lo.clone().max(Rat::zero()));
                let above = !hi.is_negative() && *rj >= ScaleValue::from_rat(hi.clone());
                if !below && !above {
                    undecided = true;
                    break;
                }
            }
            if !undecided {
                break;
            }
            if bits == 256 {
                return Ok(NamedCheck::fail(
                    name,
                    format!(
                        "an avoided radius may fall inside the distance interval for blocks ({earlier}, {n})"
                    ),
                ));
            }
        }
    }
    Ok(NamedCheck::ok(name, "no avoided radius inside any cross-block distance interval"))
}

/// Avoidance margins: replay of the inductive argument as exact assertions.
pub fn check_avoidance(
    m: &ConstructionManifest,
    depth: VerifyDepth,
    budgets: &Budgets,
) -> Result<AvoidanceReport> {
    let mut margins = Vec::new();
    let two = Rat::from_integer(Int::from(2));
    for st in &m.stages {
        let n = st.n;
        // (1) Intra-block pairs at stage n avoid R_j (j < n) with margin
        // eps_{n-1}/2: pair distances sit within eps_{n-1}/2 of lattice
        // distances, and the gap certificates hold at width eps_{n-1}.
        for j in 1..n {
            let cert = &m.stages[j - 1].gap;
            let out = verify_gap_at_width(&m.norm, cert, &st.eps_prev, depth, budgets)?;
            if !out.ok {
                return Ok(AvoidanceReport {
                    pass: false,
                    detail: format!(
                        "stage {n} vs R_{j}: gap fails at width {}: {}",
                        format_rat(&st.eps_prev),
                        out.reason
                    ),
                    margins,
                });
            }
            margins.push((n, j, &st.eps_prev / &two));
        }
        // (2) Intra-block pairs cannot reach R_j for j >= n: the pair
        // diameter is below R_n (both endpoints inside the R_n/2 ball).
        let vmax = max_vertex_norm(m, n)?;
        let diameter_bound = vmax.scale(&two);
        let thick = &st.ball_radius * &two;
        if diameter_bound.cmp_offset(&thick, &st.r) != Ordering::Less {
            return Ok(AvoidanceReport {
                pass: false,
                detail: format!(
                    "stage {n}: pair diameter bound 2(vmax + r) reaches R_{n}"
                ),
                margins,
            });
        }
    }
    // (3) Cross-block pairs are covered by check_cross_block; certified
    // jointly in certify_manifest.
    Ok(AvoidanceReport {
        pass: true,
        detail: "intra-block margins certified".into(),
        margins,
    })
}

/// Run the full suite and assemble the report.
pub fn certify_manifest(
    m: &ConstructionManifest,
    depth: VerifyDepth,
    budgets: &Budgets,
) -> Result<CertReport> {
    let mut global = vec![check_structure_global(m)];
    if !global[0].pass {
        return Ok(CertReport {
            overall: "failed".into(),
            depth: depth_name(depth),
            global,
            stages: vec![],
        });
    }
    if depth == VerifyDepth::Deep {
        global.push(deep_constants_check(m)?);
        global.push(deep_s_min_check(m, budgets)?);
    }
    let avoidance = check_avoidance(m, depth, budgets)?;
    let density = check_density(m)?;
    let mut stages = Vec::new();
    for st in &m.stages {
        let n = st.n;
        let mut checks = Vec::new();
        checks.push(check_structure_stage(m, n));
        checks.push(check_condition_a(m, n, depth, budgets)?);
        checks.push(growth_at(m, n));
        let dens = &density.stages[n - 1];
        checks.push(if dens.pass {
            NamedCheck::ok(
                "density_c",
                format!("lhs = {} (slack ~{:.3})", format_rat(&dens.lhs), dens.slack_approx),
            )
        } else {
            NamedCheck::fail(
                "density_c",
                format!("lhs = {} below the decay requirement", format_rat(&dens.lhs)),
            )
        });
        checks.push(check_cube_fit(m, n)?);
        checks.push(check_inner_exclusion(m, n)?);
        checks.push(check_ball_disjoint(m, n)?);
        checks.push(check_cross_block(m, n)?);
        let av = if avoidance.pass {
            let ms: Vec<String> = avoidance
                .margins
                .iter()
                .filter(|(sn, _, _)| *sn == n)
                .map(|(_, j, mg)| format!("j={j}: {}", format_rat(mg)))
                .collect();
            NamedCheck::ok(
                "avoidance_margin",
                if ms.is_empty() { "no earlier radii".into() } else { ms.join(", ") },
            )
        } else {
            NamedCheck::fail("avoidance_margin", avoidance.detail.clone())
        };
        checks.push(av);
        stages.push(StageChecks { n, checks });
    }
    let all = global.iter().all(|c| c.pass)
        && stages.iter().all(|s| s.checks.iter().all(|c| c.pass));
    Ok(CertReport {
        overall: if all { "certified".into() } else { "failed".into() },
        depth: depth_name(depth),
        global,
        stages,
    })
}

fn depth_name(d: VerifyDepth) -> String {
    match d {
        VerifyDepth::Shallow => "shallow".into(),
        VerifyDepth::Deep => "deep".into(),
    }
}

/// Deep mode: the manifest's equivalence constants must be no tighter than
/// independently recomputed sound ones.
fn deep_constants_check(m: &ConstructionManifest) -> Result<NamedCheck> {
    let name = "constants_sound";
    let ours = m.norm.equivalence_constants()?;
    if m.constants.c_lo <= ours.c_lo && m.constants.c_hi >= ours.c_hi {
        Ok(NamedCheck::ok(name, "within recomputed sound bounds"))
    } else {
        Ok(NamedCheck::fail(
            name,
            format!(
                "manifest ({}, {}) tighter than recomputed sound ({}, {})",
                format_rat(&m.constants.c_lo),
                format_rat(&m.constants.c_hi),
                format_rat(&ours.c_lo),
                format_rat(&ours.c_hi)
            ),
        ))
    }
}

/// Deep mode: the stored minimal lattice norm may not exceed the
/// recomputed one (ball disjointness reads it as a lower bound).
fn deep_s_min_check(m: &ConstructionManifest, budgets: &Budgets) -> Result<NamedCheck> {
    let name = "s_min_recomputed";
    let actual = m.norm.min_lattice_norm(budgets.enum_points)?;
    if m.s_min <= actual {
        Ok(NamedCheck::ok(name, format!("s_min = {actual}")))
    } else {
        Ok(NamedCheck::fail(
            name,
            format!("stored s_min {} exceeds recomputed {}", m.s_min, actual),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, FSpec};
    use crate::exact::{rat, rat_int};
    use crate::norms::NormSpec;

    fn worked_manifest() -> ConstructionManifest {
        let norm = NormSpec::l2(1).unwrap();
        let f = FSpec::InvPoly { alpha: rat_int(1) };
        build(&norm, &f, 2, &Budgets::default()).unwrap()
    }

    #[test]
    fn built_manifest_certifies_both_depths() {
        let m = worked_manifest();
        let b = Budgets::default();
        for depth in [VerifyDepth::Shallow, VerifyDepth::Deep] {
            let rep = certify_manifest(&m, depth, &b).unwrap();
            assert!(rep.certified(), "{}", rep.summary());
        }
    }

    #[test]
    fn condition_a_passes_worked_example() {
        let m = worked_manifest();
        let b = Budgets::default();
        let c = check_condition_a(&m, 1, VerifyDepth::Deep, &b).unwrap();
        assert!(c.pass, "{}", c.detail);
        let c = check_condition_a(&m, 2, VerifyDepth::Deep, &b).unwrap();
        assert!(c.pass, "{}", c.detail);
    }

    #[test]
    fn tampered_radius_on_lattice_value_fails() {
        let mut m = worked_manifest();
        let b = Budgets::default();
        // Move R_1 onto the integer 100: a lattice distance in d=1.
        m.stages[0].r = ScaleValue::from_int(100);
        m.stages[0].gap.r = ScaleValue::from_int(100);
        let c = check_condition_a(&m, 1, VerifyDepth::Shallow, &b).unwrap();
        assert!(!c.pass);
        assert!(c.detail.contains("witness"), "{}", c.detail);
        let rep = certify_manifest(&m, VerifyDepth::Shallow, &b).unwrap();
        assert!(!rep.certified());
    }

    #[test]
    fn tampered_growth_fails() {
        let mut m = worked_manifest();
        // Shrink R_2 to 99 * R_1 (and keep everything else).
        m.stages[1].r = ScaleValue::from_rat(rat(201, 2) * rat_int(99));
        let c = check_growth(&m);
        assert!(!c.pass);
    }

    #[test]
    fn density_exact_values() {
        let m = worked_manifest();
        let rep = check_density(&m).unwrap();
        assert!(rep.pass);
        // Stage 1: 26 * (1/4) = 13/2, slack 6.5 against f(R) R = 1.
        assert_eq!(rep.stages[0].lhs, rat(13, 2));
        assert!((rep.stages[0].slack_approx - 6.5).abs() < 1e-9);
        // Degenerate count formula: forcing N = 1 must fail.
        let mut bad = m.clone();
        bad.stages[0].ball_count = Int::one();
        let rep = check_density(&bad).unwrap();
        assert!(!rep.stages[0].pass);
    }

    #[test]
    fn cube_fit_and_inner_exclusion() {
        let m = worked_manifest();
        assert!(check_cube_fit(&m, 1).unwrap().pass);
        assert!(check_inner_exclusion(&m, 1).unwrap().pass);
        // Anchor dragged inside the inner ball.
        let mut bad = m.clone();
        bad.stages[0].anchor = vec![Int::from(1)];
        assert!(!check_inner_exclusion(&bad, 1).unwrap().pass);
        // Inflated side: the cube outgrows the R/2 ball.
        let mut bad = m.clone();
        bad.stages[0].side = Int::from(10_000);
        bad.stages[0].ball_count = Int::from(10_001);
        assert!(!check_cube_fit(&bad, 1).unwrap().pass);
    }

    #[test]
    fn ball_disjoint_examples() {
        let m = worked_manifest();
        assert!(check_ball_disjoint(&m, 1).unwrap().pass);
        let mut bad = m.clone();
        // Hypothetical: s_min dropped to 1/4 with eps_prev = 1.
        bad.s_min = ScaleValue::from_rat(rat(1, 4));
        assert!(!check_ball_disjoint(&bad, 1).unwrap().pass);
    }

    #[test]
    fn avoidance_margins_match_bound() {
        let m = worked_manifest();
        let rep = check_avoidance(&m, VerifyDepth::Shallow, &Budgets::default()).unwrap();
        assert!(rep.pass);
        // Stage 2 vs R_1: margin eps_1/2 = 1/8.
        assert_eq!(rep.margins, vec![(2, 1, rat(1, 8))]);
    }

    #[test]
    fn weakened_inner_exclusion_breaks_cross_block() {
        let mut m = worked_manifest();
        // Pull stage 2's block far enough in that its distances to block 1
        // can reach R_1. Stage 2 anchor ~1006; move it to ~120 so that the
        // interval (10 R_1 - sup_1, ...) no longer applies. The inner
        // exclusion check must fail on the tampered manifest.
        m.stages[1].anchor = vec![Int::from(120)];
        let inner = check_inner_exclusion(&m, 2).unwrap();
        assert!(!inner.pass);
    }
}
