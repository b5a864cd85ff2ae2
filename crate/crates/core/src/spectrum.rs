//! The lattice distance spectrum rho(Z^d): windowed enumeration, sum-of-
//! squares representability, and certified gaps (R, eps) such that no
//! lattice rho-value lies within eps of R.
//!
//! Two certificate routes exist. For the Euclidean norm in dimension >= 2
//! the spectrum is exactly {sqrt(m) : m a sum of d squares}, so a gap is
//! certified arithmetically (non-representability witnesses). For norms
//! with rational spectra the gap is certified by enumerating an annulus and
//! showing the window empty. Verification never shares search code with
//! gap construction: it re-checks from the certificate alone.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::builder::Budgets;
use crate::exact::{
    ceil_rat, floor_rat, largest_pow2_leq, pow2, rat_int, sign_two_radicals, ScaleValue,
};
use crate::factor::{factor_int, is_prime_int};
use crate::lattice;
use crate::norms::{LpExp, NormKind, NormSpec};
use crate::{Error, Int, Rat, Result};

/// Proof that an integer is not a sum of d squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonRepWitness {
    /// d=2 shortcut: k = 3 (mod 4) is never a sum of two squares.
    ThreeMod4,
    /// d=2: a prime p = 3 (mod 4) divides k to an odd power.
    OddPowerPrime { p: Int, exp: u32 },
    /// d=3: k / 4^pow4 = 7 (mod 8).
    EightBSeven { pow4: u32 },
}

/// Status of one integer under a Euclidean gap certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerStatus {
    /// sqrt(m) lies outside [R - eps, R + eps], proven exactly.
    Outside,
    /// m is not a sum of d squares.
    NonRepresentable(NonRepWitness),
}

/// Evidence backing a gap certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapEvidence {
    /// Euclidean route (l2, d >= 2): every integer whose square root could
    /// fall inside the window, with its status.
    Euclidean { candidates: Vec<(Int, IntegerStatus)> },
    /// Enumeration route: the annulus around the window was exhausted and
    /// contained no lattice value.
    Enumerated { examined: u64 },
}

/// A certified gap: no lattice rho-value lies in [R - eps, R + eps].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    pub r: ScaleValue,
    pub eps: Rat,
    pub evidence: GapEvidence,
}

/// One value of the spectrum with a lattice point attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumValue {
    pub value: ScaleValue,
    pub witness: Vec<i64>,
}

/// A complete window of the lattice distance spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumWindow {
    pub norm: NormSpec,
    pub lo: ScaleValue,
    pub hi: ScaleValue,
    pub values: Vec<SpectrumValue>,
    pub examined: u64,
    pub enum_radius_sq: Rat,
}

/// Outcome of re-verifying a gap certificate.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub reason: String,
    /// A lattice vector whose rho-value violates the gap, when one exists.
    pub violation: Option<Vec<i64>>,
}

/// How thoroughly to re-verify: `Shallow` validates stored witnesses with
/// exact arithmetic; `Deep` re-derives them from scratch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyDepth {
    Shallow,
    Deep,
}

/// Is k a sum of d integer squares?
pub fn representable(d: usize, k: &Int, factor_iters: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    if k.is_negative() {
        return Err(Error::InvalidParam("representable needs k >= 0".into()));
    }
    if k.is_zero() {
        return Ok(true);
    }
    match d {
        1 => Ok(crate::exact::perfect_square(k).is_some()),
        2 => Ok(nonrep_witness_d2(k, factor_iters)?.is_none()),
        3 => Ok(nonrep_witness_d3(k).is_none()),
        _ => Ok(true),
    }
}

/// Witness that k is NOT a sum of d squares (None when representable).
/// Only d in {2, 3} produce witnesses; for d >= 4 every k works.
pub fn nonrep_witness(d: usize, k: &Int, factor_iters: u64) -> Result<Option<NonRepWitness>> {
    match d {
        2 => nonrep_witness_d2(k, factor_iters),
        3 => Ok(nonrep_witness_d3(k)),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn nonrep_witness_d2(k: &Int, factor_iters: u64) -> Result<Option<NonRepWitness>> {
    if k.is_zero() {
        return Ok(None);
    }
    let four = Int::from(4);
    // Cheap sufficient witness first: squares are 0 or 1 mod 4.
    if (k % &four) == Int::from(3) {
        return Ok(Some(NonRepWitness::ThreeMod4));
    }
    let factors = factor_int(k, factor_iters)?;
    for (p, e) in factors {
        if (&p % &four) == Int::from(3) && e % 2 == 1 {
            return Ok(Some(NonRepWitness::OddPowerPrime { p, exp: e }));
        }
    }
    Ok(None)
}

fn nonrep_witness_d3(k: &Int) -> Option<NonRepWitness> {
    if k.is_zero() {
        return None;
    }
    let four = Int::from(4);
    let mut m = k.clone();
    let mut pow4 = 0u32;
    while (&m % &four).is_zero() {
        m /= &four;
        pow4 += 1;
    }
    if (&m % Int::from(8)) == Int::from(7) {
        Some(NonRepWitness::EightBSeven { pow4 })
    } else {
        None
    }
}

/// Exact validation of a stored witness against k: true iff the witness
/// proves k is not a sum of d squares.
pub fn witness_valid(d: usize, k: &Int, w: &NonRepWitness) -> bool {
    match (d, w) {
        (2, NonRepWitness::ThreeMod4) => (k % Int::from(4)) == Int::from(3),
        (2, NonRepWitness::OddPowerPrime { p, exp }) => {
            if exp % 2 == 0 || (p % Int::from(4)) != Int::from(3) || !is_prime_int(p) {
                return false;
            }
            let pe = p.pow(*exp);
            let pe1 = &pe * p;
            (k % &pe).is_zero() && !(k % &pe1).is_zero()
        }
        (3, NonRepWitness::EightBSeven { pow4 }) => {
            if *pow4 > k.bits() as u32 / 2 {
                return false;
            }
            let q = Int::from(4).pow(*pow4);
            if !(k % &q).is_zero() {
                return false;
            }
            (k / &q) % Int::from(8) == Int::from(7)
        }
        _ => false,
    }
}

/// Find x in Z^d with |x|^2 = m by bounded search (witness extraction for
/// failed checks; desk scale only).
pub fn decompose_squares(d: usize, m: &Int, budget: u64) -> Option<Vec<i64>> {
    let m = m.to_i128()?;
    if m < 0 {
        return None;
    }
    fn rec(d: usize, m: i128, budget: &mut u64, acc: &mut Vec<i64>) -> bool {
        if *budget == 0 {
            return false;
        }
        if d == 1 {
            let r = crate::lattice::isqrt_i128(m);
            if r * r == m {
                acc.push(r as i64);
                return true;
            }
            return false;
        }
        let top = crate::lattice::isqrt_i128(m);
        for x in (0..=top).rev() {
            *budget = budget.saturating_sub(1);
            if *budget == 0 {
                return false;
            }
            acc.push(x as i64);
            if rec(d - 1, m - x * x, budget, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    let mut b = budget;
    if rec(d, m, &mut b, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

/// Complete sorted spectrum of rho(Z^d) on [a, b], with witnesses.
pub fn spectrum_window(
    norm: &NormSpec,
    a: &ScaleValue,
    b: &ScaleValue,
    max_points: u64,
) -> Result<SpectrumWindow> {
    if !norm.is_exact_capable() {
        return Err(Error::NotExact(norm.to_string()));
    }
    if a > b {
        return Err(Error::InvalidParam("window needs a <= b".into()));
    }
    let consts = norm.equivalence_constants()?;
    // Every x with rho(x) in [a,b] satisfies |x|_2 in [a/c_hi, b/c_lo].
    let lo_sq = a.squared() / (&consts.c_hi * &consts.c_hi);
    let hi_sq = b.squared() / (&consts.c_lo * &consts.c_lo);
    let mut values: BTreeMap<ScaleValue, Vec<i64>> = BTreeMap::new();

    let plan = EvalPlan::prepare(norm, a, b);
    let examined = lattice::for_each_in_annulus(norm.dim(), &lo_sq, &hi_sq, max_points, |v| {
        if let Some(val) = plan.value_in_window(norm, a, b, v)? {
            values.entry(val).or_insert_with(|| v.to_vec());
        }
        Ok(())
    })?;

    Ok(SpectrumWindow {
        norm: norm.clone(),
        lo: a.clone(),
        hi: b.clone(),
        values: values
            .into_iter()
            .map(|(value, witness)| SpectrumValue { value, witness })
            .collect(),
        examined,
        enum_radius_sq: hi_sq,
    })
}

/// Prepared per-kind fast filter for annulus scans.
enum EvalPlan {
    L2 { lo: i128, hi: i128 },
    L1 { lo: i128, hi: i128 },
    Linf { lo: i128, hi: i128 },
    Poly {
        nums: Vec<Vec<i64>>,
        dens: Vec<i64>,
        lo_f: f64,
        hi_f: f64,
    },
    Exact,
}

impl EvalPlan {
    fn prepare(norm: &NormSpec, a: &ScaleValue, b: &ScaleValue) -> EvalPlan {
        // Integer-valued norms compare through exact integer bounds:
        // for an integer value s, s >= a iff s >= ceil(a), s <= b iff
        // s <= floor(b).
        let int_bounds = |a: &ScaleValue, b: &ScaleValue| -> (i128, i128) {
            let fb = b.floor_int().to_i128().unwrap_or(i128::MAX);
            let fa = a.floor_int();
            let ca = if ScaleValue::from_rat(Rat::from_integer(fa.clone())) == *a {
                fa
            } else {
                fa + 1
            };
            (ca.to_i128().unwrap_or(i128::MAX), fb)
        };
        match norm.kind() {
            NormKind::Lp(LpExp::Finite(p)) if *p == rat_int(2) => {
                let (lo, hi) = (
                    ScaleValue::from_rat(a.squared()),
                    ScaleValue::from_rat(b.squared()),
                );
                let (lo, hi) = int_bounds(&lo, &hi);
                EvalPlan::L2 { lo, hi }
            }
            NormKind::Lp(LpExp::Finite(p)) if p.is_one() => {
                let (lo, hi) = int_bounds(a, b);
                EvalPlan::L1 { lo, hi }
            }
            NormKind::Lp(LpExp::Infinity) => {
                let (lo, hi) = int_bounds(a, b);
                EvalPlan::Linf { lo, hi }
            }
            NormKind::Polytope(rows) => {
                let mut nums = Vec::new();
                let mut dens = Vec::new();
                for row in rows {
                    let mut den = Int::one();
                    for e in row {
                        den = den.lcm(e.denom());
                    }
                    let Some(d64) = den.to_i64() else {
                        return EvalPlan::Exact;
                    };
                    let mut nrow = Vec::new();
                    for e in row {
                        let n = e.numer() * (&den / e.denom());
                        let Some(n64) = n.to_i64() else {
                            return EvalPlan::Exact;
                        };
                        nrow.push(n64);
                    }
                    nums.push(nrow);
                    dens.push(d64);
                }
                EvalPlan::Poly {
                    nums,
                    dens,
                    lo_f: a.to_f64(),
                    hi_f: b.to_f64(),
                }
            }
            _ => EvalPlan::Exact,
        }
    }

    fn value_in_window(
        &self,
        norm: &NormSpec,
        a: &ScaleValue,
        b: &ScaleValue,
        v: &[i64],
    ) -> Result<Option<ScaleValue>> {
        match self {
            EvalPlan::L2 { lo, hi } => {
                let s: i128 = v.iter().map(|&c| (c as i128) * (c as i128)).sum();
                if s < *lo || s > *hi {
                    return Ok(None);
                }
                Ok(Some(ScaleValue::sqrt_of(Rat::from_integer(Int::from(s)))))
            }
            EvalPlan::L1 { lo, hi } => {
                let s: i128 = v.iter().map(|&c| (c as i128).abs()).sum();
                if s < *lo || s > *hi {
                    return Ok(None);
                }
                Ok(Some(ScaleValue::from_rat(Rat::from_integer(Int::from(s)))))
            }
            EvalPlan::Linf { lo, hi } => {
                let s: i128 = v.iter().map(|&c| (c as i128).abs()).max().unwrap_or(0);
                if s < *lo || s > *hi {
                    return Ok(None);
                }
                Ok(Some(ScaleValue::from_rat(Rat::from_integer(Int::from(s)))))
            }
            EvalPlan::Poly { nums, dens, lo_f, hi_f } => {
                // Track the max fraction |num.v|/den exactly in i128.
                let mut bn: i128 = 0;
                let mut bd: i128 = 1;
                for (row, den) in nums.iter().zip(dens) {
                    let mut dot: i128 = 0;
                    for (n, c) in row.iter().zip(v) {
                        dot += (*n as i128) * (*c as i128);
                    }
                    let dot = dot.abs();
                    let d = *den as i128;
                    let bigger = match dot.checked_mul(bd).zip(bn.checked_mul(d)) {
                        Some((l, r)) => l > r,
                        None => {
                            Rat::new(Int::from(dot), Int::from(d))
                                > Rat::new(Int::from(bn), Int::from(bd))
                        }
                    };
                    if bigger {
                        bn = dot;
                        bd = d;
                    }
                }
                // Quick float rejection with a safety margin, exact confirm.
                let vf = bn as f64 / bd as f64;
                let slack = 1e-9 * (1.0 + vf.abs());
                if vf < lo_f - slack - 1e-9 || vf > hi_f + slack + 1e-9 {
                    return Ok(None);
                }
                let val = ScaleValue::from_rat(Rat::new(Int::from(bn), Int::from(bd)));
                if val < *a || val > *b {
                    return Ok(None);
                }
                Ok(Some(val))
            }
            EvalPlan::Exact => {
                let x: Vec<Rat> =
                    v.iter().map(|c| Rat::from_integer(Int::from(*c))).collect();
                let val = norm.eval(&x)?;
                if val < *a || val > *b {
                    return Ok(None);
                }
                Ok(Some(val))
            }
        }
    }
}

/// Deterministic gap search: the smallest admissible gap at or above
/// `lower`, with the largest power-of-two eps below half the certified
/// clearance. See `find_gap_above` for the escalation variant.
pub fn find_gap(norm: &NormSpec, lower: &ScaleValue, budgets: &Budgets) -> Result<GapCertificate> {
    find_gap_above(norm, lower, None, budgets)
}

/// As `find_gap`, additionally requiring R strictly above `strictly_above`.
pub fn find_gap_above(
    norm: &NormSpec,
    lower: &ScaleValue,
    strictly_above: Option<&ScaleValue>,
    budgets: &Budgets,
) -> Result<GapCertificate> {
    if !lower.is_positive() {
        return Err(Error::InvalidParam("find_gap needs lower > 0".into()));
    }
    if !norm.is_exact_capable() {
        return Err(Error::NotExact(norm.to_string()));
    }
    let euclidean = matches!(norm.kind(), NormKind::Lp(LpExp::Finite(p)) if *p == rat_int(2));
    if euclidean && norm.dim() >= 4 {
        return half_integer_gap(norm.dim(), lower, strictly_above, budgets);
    }
    if euclidean && norm.dim() >= 2 {
        return euclidean_gap(norm.dim(), lower, strictly_above, budgets);
    }
    // All remaining exact-capable kinds (including any lp in d=1) have
    // rational spectra at enumerable scale: take the first gap midpoint.
    midpoint_gap(norm, lower, strictly_above, budgets)
}

/// d in {2,3}: R = sqrt(k) for the smallest certifiably non-representable
/// k with sqrt(k) >= lower. Candidates whose factorization exceeds the
/// budget are skipped (the selection stays deterministic for fixed budgets).
fn euclidean_gap(
    dim: usize,
    lower: &ScaleValue,
    strictly_above: Option<&ScaleValue>,
    budgets: &Budgets,
) -> Result<GapCertificate> {
    let mut k = ceil_rat(&lower.squared());
    if k.is_zero() {
        k = Int::one();
    }
    if let Some(above) = strictly_above {
        let next = floor_rat(&above.squared()) + 1;
        if next > k {
            k = next;
        }
    }
    let mut scanned = 0u64;
    let (k, _witness) = loop {
        match nonrep_witness(dim, &k, budgets.factor_iters) {
            Ok(Some(w)) => break (k, w),
            Ok(None) => {}
            Err(Error::FactorBudget(_)) => {} // undecidable within budget: skip
            Err(e) => return Err(e),
        }
        k += 1;
        scanned += 1;
        if scanned > budgets.gap_scan {
            return Err(Error::BudgetExceeded(format!(
                "no certifiable non-representable integer within {} candidates",
                budgets.gap_scan
            )));
        }
    };
    let r = ScaleValue::sqrt_of(Rat::from_integer(k.clone()));
    // Clearance bound from the immediate integer neighbors: the nearest
    // spectrum value can be no closer than min(sqrt(k)-sqrt(k-1),
    // sqrt(k+1)-sqrt(k)). Factor-free and sound.
    let eps = largest_pow2_leq_radical_gap(&k);
    let evidence = euclidean_evidence(dim, &r, &eps, budgets)?;
    Ok(GapCertificate { r, eps, evidence })
}

/// d >= 4: every integer is a sum of four squares, so gaps sit between
/// consecutive roots: R = sqrt(k + 1/2) for k = ceil(lower^2).
fn half_integer_gap(
    _dim: usize,
    lower: &ScaleValue,
    strictly_above: Option<&ScaleValue>,
    budgets: &Budgets,
) -> Result<GapCertificate> {
    let mut k = ceil_rat(&lower.squared());
    if let Some(above) = strictly_above {
        let next = floor_rat(&above.squared()) + 1;
        if next > k {
            k = next;
        }
    }
    let half = Rat::new(Int::one(), Int::from(2));
    let r = ScaleValue::Sqrt(Rat::from_integer(k.clone()) + half);
    let eps = largest_pow2_leq_half_gap(&r, &k);
    let evidence = euclidean_evidence(4, &r, &eps, budgets)?;
    Ok(GapCertificate { r, eps, evidence })
}

/// Largest 2^j with 2^j <= min(sqrt(k)-sqrt(k-1), sqrt(k+1)-sqrt(k))/2,
/// decided by exact two-radical signs.
fn largest_pow2_leq_radical_gap(k: &Int) -> Rat {
    let kq = Rat::from_integer(k.clone());
    let km1 = &kq - Rat::one();
    let kp1 = &kq + Rat::one();
    let holds = |j: i64| -> bool {
        let m = -pow2(j + 1);
        let one = Rat::one();
        let neg = -Rat::one();
        // sqrt(k) - sqrt(k-1) >= 2^(j+1)
        sign_two_radicals(&m, &one, &kq, &neg, &km1) != Ordering::Less
            // sqrt(k+1) - sqrt(k) >= 2^(j+1)
            && sign_two_radicals(&m, &one, &kp1, &neg, &kq) != Ordering::Less
    };
    search_pow2(holds, estimate_gap_log2(&kq))
}

/// Same for the half-integer form: min over sqrt(k+1/2)-sqrt(k) and
/// sqrt(k+1)-sqrt(k+1/2), halved.
fn largest_pow2_leq_half_gap(r: &ScaleValue, k: &Int) -> Rat {
    let r2 = r.squared();
    let kq = Rat::from_integer(k.clone());
    let kp1 = &kq + Rat::one();
    let holds = |j: i64| -> bool {
        let m = -pow2(j + 1);
        let one = Rat::one();
        let neg = -Rat::one();
        sign_two_radicals(&m, &one, &r2, &neg, &kq) != Ordering::Less
            && sign_two_radicals(&m, &one, &kp1, &neg, &r2) != Ordering::Less
    };
    search_pow2(holds, estimate_gap_log2(&kq))
}

/// Estimate log2 of half the neighbor gap ~ 1/(4 sqrt(k)) to seed the
/// exact search.
fn estimate_gap_log2(k: &Rat) -> i64 {
    let bits = k.numer().bits() as i64 - k.denom().bits() as i64;
    -(bits / 2) - 2
}

fn search_pow2(holds: impl Fn(i64) -> bool, seed: i64) -> Rat {
    let mut j = seed;
    while !holds(j) {
        j -= 1;
    }
    while holds(j + 1) {
        j += 1;
    }
    pow2(j)
}

/// Candidate integers whose square root might fall in [R-eps, R+eps],
/// each proven Outside or NonRepresentable.
fn euclidean_evidence(
    dim: usize,
    r: &ScaleValue,
    eps: &Rat,
    budgets: &Budgets,
) -> Result<GapEvidence> {
    let mut candidates = Vec::new();
    for m in euclidean_candidates(r, eps) {
        match integer_status(dim, &m, r, eps, budgets.factor_iters)? {
            Some(st) => candidates.push((m, st)),
            None => {
                return Err(Error::InvalidParam(format!(
                    "internal: representable {m} inside the chosen gap"
                )))
            }
        }
    }
    Ok(GapEvidence::Euclidean { candidates })
}

/// Sound overcover of {m : sqrt(m) in [R-eps, R+eps]}.
fn euclidean_candidates(r: &ScaleValue, eps: &Rat) -> Vec<Int> {
    let (_, r_hi) = r.enclosure(64);
    let r2 = r.squared();
    let e2 = eps * eps;
    let spread = Rat::from_integer(Int::from(2)) * eps * &r_hi;
    let lo = &r2 + &e2 - &spread;
    let hi = &r2 + &e2 + &spread;
    let mut m = ceil_rat(&lo);
    if m.is_negative() {
        m = Int::zero();
    }
    let top = floor_rat(&hi);
    let mut out = Vec::new();
    while m <= top {
        out.push(m.clone());
        m += 1;
    }
    out
}

/// None if m is representable AND inside the window (a genuine violation);
/// otherwise the proven status.
fn integer_status(
    dim: usize,
    m: &Int,
    r: &ScaleValue,
    eps: &Rat,
    factor_iters: u64,
) -> Result<Option<IntegerStatus>> {
    let sm = ScaleValue::sqrt_of(Rat::from_integer(m.clone()));
    if sm.abs_diff_cmp(r, eps) == Ordering::Greater {
        return Ok(Some(IntegerStatus::Outside));
    }
    if dim >= 4 {
        return Ok(None); // every integer is a sum of four squares
    }
    match nonrep_witness(dim, m, factor_iters)? {
        Some(w) => Ok(Some(IntegerStatus::NonRepresentable(w))),
        None => Ok(None),
    }
}

/// Rational-spectrum route: R is the midpoint of the first enumerated
/// spectrum gap with midpoint >= lower; eps is the largest power of two
/// at most a quarter of the gap width.
fn midpoint_gap(
    norm: &NormSpec,
    lower: &ScaleValue,
    strictly_above: Option<&ScaleValue>,
    budgets: &Budgets,
) -> Result<GapCertificate> {
    let mut half_width = Rat::one();
    loop {
        let lo_b = {
            let f = lower.floor_int() - ceil_rat(&half_width);
            if f.is_negative() {
                Int::zero()
            } else {
                f
            }
        };
        let hi_b = lower.floor_int() + Int::one() + ceil_rat(&half_width);
        let win = spectrum_window(
            norm,
            &ScaleValue::from_rat(Rat::from_integer(lo_b)),
            &ScaleValue::from_rat(Rat::from_integer(hi_b)),
            budgets.enum_points,
        )?;
        let vals: Vec<&ScaleValue> = win.values.iter().map(|v| &v.value).collect();
        // Need an anchor value at or below lower inside the window to know
        // pairs are globally consecutive; 0 is always in the spectrum.
        let anchored = vals.first().map_or(false, |v| **v <= *lower)
            || win.lo == ScaleValue::zero();
        if anchored {
            for pair in vals.windows(2) {
                let (s, t) = (pair[0], pair[1]);
                let (ScaleValue::Rat(sr), ScaleValue::Rat(tr)) = (s, t) else {
                    continue; // irrational values: midpoint form unsupported
                };
                if sr == tr {
                    continue;
                }
                let midpoint = (sr + tr) / Rat::from_integer(Int::from(2));
                let mid_sv = ScaleValue::from_rat(midpoint.clone());
                if mid_sv < *lower {
                    continue;
                }
                if let Some(above) = strictly_above {
                    if mid_sv <= *above {
                        continue;
                    }
                }
                let quarter = (tr - sr) / Rat::from_integer(Int::from(4));
                let eps = largest_pow2_leq(&quarter);
                // The enumerated window already covers [R-eps, R+eps]
                // (eps <= quarter gap), and (s, t) are consecutive in it,
                // so the certified subwindow is empty.
                debug_assert!(&midpoint - &eps >= *sr && &midpoint + &eps <= *tr);
                return Ok(GapCertificate {
                    r: mid_sv,
                    eps,
                    evidence: GapEvidence::Enumerated { examined: win.examined },
                });
            }
        }
        half_width *= Rat::from_integer(Int::from(2));
        if half_width > Rat::from_integer(Int::from(1) << 20) {
            return Err(Error::BudgetExceeded(
                "no spectrum gap found within the search window".into(),
            ));
        }
    }
}

/// Re-verify a certificate at its own width.
pub fn verify_gap(norm: &NormSpec, cert: &GapCertificate, budgets: &Budgets) -> Result<bool> {
    Ok(
        verify_gap_at_width(norm, cert, &cert.eps, VerifyDepth::Shallow, budgets)?
            .ok,
    )
}

/// Re-verify that no lattice rho-value lies in [R - width, R + width],
/// from the certificate alone.
pub fn verify_gap_at_width(
    norm: &NormSpec,
    cert: &GapCertificate,
    width: &Rat,
    depth: VerifyDepth,
    budgets: &Budgets,
) -> Result<VerifyOutcome> {
    if !norm.is_exact_capable() {
        return Err(Error::NotExact(norm.to_string()));
    }
    if !width.is_positive() {
        return Ok(fail("gap width must be positive", None));
    }
    // R - width must stay positive: zero is always a lattice value.
    let r_minus = ScaleValue::zero().cmp_offset(width, &cert.r); // sign(width - R)
    if r_minus != Ordering::Less {
        return Ok(fail("window reaches zero, which rho attains", Some(vec![0; norm.dim()])));
    }
    match &cert.evidence {
        GapEvidence::Euclidean { candidates } => {
            let euclid2 =
                matches!(norm.kind(), NormKind::Lp(LpExp::Finite(p)) if *p == rat_int(2));
            if !euclid2 || norm.dim() < 2 {
                return Ok(fail(
                    "euclidean evidence only applies to l2 in dimension >= 2",
                    None,
                ));
            }
            let stored: BTreeMap<Int, &IntegerStatus> =
                candidates.iter().map(|(m, s)| (m.clone(), s)).collect();
            for m in euclidean_candidates(&cert.r, width) {
                let sm = ScaleValue::sqrt_of(Rat::from_integer(m.clone()));
                if sm.abs_diff_cmp(&cert.r, width) == Ordering::Greater {
                    continue; // proven outside, no witness needed
                }
                if norm.dim() >= 4 {
                    // Every integer is a sum of four squares, so none may
                    // fall inside at all.
                    let witness = decompose_squares(norm.dim(), &m, 200_000_000);
                    return Ok(fail(
                        &format!("integer {m} falls inside the window (d >= 4)"),
                        witness,
                    ));
                }
                // Inside the closed window: must be non-representable.
                let d = norm.dim();
                let ok = match depth {
                    VerifyDepth::Deep => match nonrep_witness(d, &m, budgets.factor_iters)? {
                        Some(w) => witness_valid(d, &m, &w),
                        None => false,
                    },
                    VerifyDepth::Shallow => match stored.get(&m) {
                        Some(IntegerStatus::NonRepresentable(w)) => witness_valid(d, &m, w),
                        _ => false,
                    },
                };
                if !ok {
                    let witness = decompose_squares(norm.dim(), &m, 200_000_000);
                    return Ok(fail(
                        &format!("no valid non-representability proof for {m}"),
                        witness,
                    ));
                }
            }
            Ok(VerifyOutcome { ok: true, reason: "window clear".into(), violation: None })
        }
        GapEvidence::Enumerated { .. } => {
            // Re-enumerate a rational cover of [R - width, R + width].
            let (rlo, rhi) = cert.r.enclosure(64);
            let pad = pow2(-60);
            let lo_r = &rlo - width - &pad;
            let lo_b = if lo_r.is_negative() { Rat::zero() } else { lo_r };
            let hi_b = &rhi + width + &pad;
            let win = spectrum_window(
                norm,
                &ScaleValue::from_rat(lo_b),
                &ScaleValue::from_rat(hi_b),
                budgets.enum_points,
            )?;
            for sv in &win.values {
                if sv.value.abs_diff_cmp(&cert.r, width) != Ordering::Greater {
                    return Ok(fail(
                        &format!("lattice value {} lies within the window", sv.value),
                        Some(sv.witness.clone()),
                    ));
                }
            }
            Ok(VerifyOutcome { ok: true, reason: "window clear".into(), violation: None })
        }
    }
}

fn fail(reason: &str, violation: Option<Vec<i64>>) -> VerifyOutcome {
    VerifyOutcome { ok: false, reason: reason.into(), violation }
}
