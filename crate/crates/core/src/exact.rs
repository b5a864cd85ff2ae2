//! Exact scalars: rationals, square roots of rationals, and sign
//! determination for expressions mixing at most two radicals.
//!
//! Every certified comparison in the crate bottoms out here. A value is
//! either a nonnegative rational or sqrt(q) for a nonnegative rational q;
//! comparisons square through the radicals with explicit sign analysis, so
//! no step ever rounds.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Int, Rat, Result};

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Rational p/q from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

/// 2^j for any integer j (negative exponents allowed).
pub fn pow2(j: i64) -> Rat {
    let one = Int::one();
    if j >= 0 {
        Rat::from_integer(one << (j as usize))
    } else {
        Rat::new(one.clone(), one << ((-j) as usize))
    }
}

/// Floor of a nonnegative rational as a BigInt.
pub fn floor_rat(x: &Rat) -> Int {
    x.floor().to_integer()
}

/// Ceiling of a rational as a BigInt.
pub fn ceil_rat(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Exact integer square root check: returns Some(r) iff n = r^2.
pub fn perfect_square(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Sign of `a + b*sqrt(p)` with p >= 0, decided exactly.
pub fn sign_one_radical(a: &Rat, b: &Rat, p: &Rat) -> Ordering {
    debug_assert!(!p.is_negative());
    if b.is_zero() || p.is_zero() {
        return a.cmp(&Rat::zero());
    }
    if a.is_zero() {
        return b.cmp(&Rat::zero());
    }
    let sa = a.cmp(&Rat::zero());
    let sb = b.cmp(&Rat::zero());
    if sa == sb {
        return sa;
    }
    // Opposite strict signs: |a| vs |b|sqrt(p) decides, compare squares.
    match (a * a).cmp(&(b * b * p)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sa,
        Ordering::Less => sb,
    }
}

/// Sign of `a + b*sqrt(p) + c*sqrt(q)` with p, q >= 0, decided exactly.
pub fn sign_two_radicals(a: &Rat, b: &Rat, p: &Rat, c: &Rat, q: &Rat) -> Ordering {
    if c.is_zero() || q.is_zero() {
        return sign_one_radical(a, b, p);
    }
    if b.is_zero() || p.is_zero() {
        return sign_one_radical(a, c, q);
    }
    // Split as L - R with L = a + b*sqrt(p) and R = -c*sqrt(q).
    let left = sign_one_radical(a, b, p);
    let right = (-c).cmp(&Rat::zero());
    if left != right {
        return if left > right {
            Ordering::Greater
        } else {
            Ordering::Less
        };
    }
    if left == Ordering::Equal {
        return Ordering::Equal;
    }
    // Same strict sign: compare L^2 vs R^2; their difference is
    // (a^2 + b^2 p - c^2 q) + 2ab*sqrt(p), one radical again.
    let d0 = a * a + b * b * p - c * c * q;
    let d1 = Rat::from_integer(Int::from(2)) * a * b;
    let s = sign_one_radical(&d0, &d1, p);
    if left == Ordering::Greater {
        s
    } else {
        s.reverse()
    }
}

/// Largest power of two 2^j (j in Z) that is <= x, for x > 0.
pub fn largest_pow2_leq(x: &Rat) -> Rat {
    assert!(x.is_positive(), "largest_pow2_leq needs x > 0");
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    // 2^(nb-db-1) <= x < 2^(nb-db+1), so the answer is one of two candidates.
    let mut j = nb - db;
    while pow2(j) > *x {
        j -= 1;
    }
    while pow2(j + 1) <= *x {
        j += 1;
    }
    pow2(j)
}

/// An exact nonnegative scale: either a rational or the square root of a
/// rational. Values are canonical: sqrt(q) with q a perfect rational square
/// collapses to the rational form, so equal reals have equal representations.
#[derive(Clone, Debug)]
pub enum ScaleValue {
    Rat(Rat),
    Sqrt(Rat),
}

impl ScaleValue {
    /// Exact rational value; panics on negative input.
    pub fn from_rat(r: Rat) -> Self {
        assert!(!r.is_negative(), "ScaleValue must be nonnegative");
        ScaleValue::Rat(r)
    }

    pub fn from_int(n: i64) -> Self {
        ScaleValue::from_rat(rat_int(n))
    }

    /// sqrt(q); collapses to the rational form when q is a perfect square.
    pub fn sqrt_of(q: Rat) -> Self {
        assert!(!q.is_negative(), "sqrt of negative rational");
        if let (Some(rn), Some(rd)) = (perfect_square(q.numer()), perfect_square(q.denom())) {
            ScaleValue::Rat(Rat::new(rn, rd))
        } else {
            ScaleValue::Sqrt(q)
        }
    }

    pub fn zero() -> Self {
        ScaleValue::Rat(Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.squared().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero()
    }

    /// The exact square of the value (always rational).
    pub fn squared(&self) -> Rat {
        match self {
            ScaleValue::Rat(r) => r * r,
            ScaleValue::Sqrt(q) => q.clone(),
        }
    }

    /// Decompose as (rational part, radical coefficient, radicand):
    /// value = r + c*sqrt(q).
    pub fn parts(&self) -> (Rat, Rat, Rat) {
        match self {
            ScaleValue::Rat(r) => (r.clone(), Rat::zero(), Rat::zero()),
            ScaleValue::Sqrt(q) => (Rat::zero(), Rat::one(), q.clone()),
        }
    }

    /// Multiply by a nonnegative rational.
    pub fn scale(&self, lambda: &Rat) -> Self {
        assert!(!lambda.is_negative());
        match self {
            ScaleValue::Rat(r) => ScaleValue::Rat(r * lambda),
            ScaleValue::Sqrt(q) => ScaleValue::sqrt_of(q * lambda * lambda),
        }
    }

    /// Exact sign of `self + t - other` for a rational offset t.
    pub fn cmp_offset(&self, t: &Rat, other: &ScaleValue) -> Ordering {
        let (ra, ca, qa) = self.parts();
        let (rb, cb, qb) = other.parts();
        sign_two_radicals(&(ra + t - rb), &ca, &qa, &(-cb), &qb)
    }

    /// Exact |self - other| compared against a rational m:
    /// Less/Equal/Greater as |self - other| <,=,> m.
    pub fn abs_diff_cmp(&self, other: &ScaleValue, m: &Rat) -> Ordering {
        // |u - v| > m  iff  u > v + m or v > u + m.
        let uv = other.cmp_offset(m, self); // sign(v + m - u)
        if uv == Ordering::Less {
            return Ordering::Greater;
        }
        let vu = self.cmp_offset(m, other); // sign(u + m - v)
        if vu == Ordering::Less {
            return Ordering::Greater;
        }
        if uv == Ordering::Equal || vu == Ordering::Equal {
            return Ordering::Equal;
        }
        Ordering::Less
    }

    /// Floor of the value as a BigInt.
    pub fn floor_int(&self) -> Int {
        match self {
            ScaleValue::Rat(r) => floor_rat(r),
            ScaleValue::Sqrt(q) => {
                // floor(sqrt(a/b)) = floor(sqrt(a*b)/b) computed exactly.
                let t = q.numer() * q.denom();
                let s = t.sqrt();
                let fl = Rat::new(s, q.denom().clone());
                // s/b <= sqrt(q) < (s+1)/b is too coarse; fix up exactly.
                let mut k = floor_rat(&fl);
                loop {
                    let k1: Int = &k + 1;
                    let k1r = Rat::from_integer(k1.clone());
                    if (&k1r * &k1r) <= *q {
                        k = k1;
                    } else {
                        break;
                    }
                }
                while Rat::from_integer(k.clone()).pow(2) > *q {
                    k -= 1;
                }
                k
            }
        }
    }

    /// Dyadic enclosure [lo, hi] with hi - lo <= 2^-bits.
    pub fn enclosure(&self, bits: u32) -> (Rat, Rat) {
        match self {
            ScaleValue::Rat(r) => (r.clone(), r.clone()),
            ScaleValue::Sqrt(q) => {
                // sqrt(a/b) = sqrt(ab)/b; isqrt(ab * 4^bits) gives the bound.
                let ab = q.numer() * q.denom();
                let scaled: BigInt = ab << (2 * bits as usize);
                let s = scaled.sqrt();
                let den = q.denom() << (bits as usize);
                let lo = Rat::new(s.clone(), den.clone());
                let hi = Rat::new(s + 1, den);
                (lo, hi)
            }
        }
    }

    /// Nearest double; for display and sampling only, never certification.
    pub fn to_f64(&self) -> f64 {
        match self {
            ScaleValue::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            ScaleValue::Sqrt(q) => q.to_f64().map(f64::sqrt).unwrap_or(f64::NAN),
        }
    }

    /// Maximum of two values.
    pub fn max(self, other: ScaleValue) -> ScaleValue {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for ScaleValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ScaleValue {}

impl PartialOrd for ScaleValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaleValue {
    fn cmp(&self, other: &Self) -> Ordering {
        // Both values are nonnegative, so comparing squares is exact.
        self.squared().cmp(&other.squared())
    }
}

impl fmt::Display for ScaleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleValue::Rat(r) => write!(f, "{}", format_rat(r)),
            ScaleValue::Sqrt(q) => write!(f, "sqrt:{}", format_rat(q)),
        }
    }
}

/// Canonical text form of a rational: "p" or "p/q", never a float.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse "p" or "p/q". Floating-point literals are rejected.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "floating-point literal '{s}' is not a valid exact number"
        )));
    }
    let parse_int = |t: &str| -> Result<Int> {
        t.parse::<Int>()
            .map_err(|_| Error::Parse(format!("bad integer '{t}'")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
    }
}

/// Parse a ScaleValue: "p/q" or "sqrt:p/q".
pub fn parse_scale(s: &str) -> Result<ScaleValue> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("sqrt:") {
        let q = parse_rat(rest)?;
        if q.is_negative() {
            return Err(Error::Parse(format!("negative radicand in '{s}'")));
        }
        Ok(ScaleValue::sqrt_of(q))
    } else {
        let r = parse_rat(s)?;
        if r.is_negative() {
            return Err(Error::Parse(format!("negative scale '{s}'")));
        }
        Ok(ScaleValue::from_rat(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn sv_rat(p: i64, q: i64) -> ScaleValue {
        ScaleValue::from_rat(rat(p, q))
    }

    fn sv_sqrt(p: i64, q: i64) -> ScaleValue {
        ScaleValue::sqrt_of(rat(p, q))
    }

    #[test]
    fn sqrt_canonicalizes_perfect_squares() {
        assert_eq!(sv_sqrt(4, 1), sv_rat(2, 1));
        assert!(matches!(sv_sqrt(4, 9), ScaleValue::Rat(_)));
        assert!(matches!(sv_sqrt(2, 1), ScaleValue::Sqrt(_)));
        // Round trip of the square.
        assert_eq!(sv_sqrt(2, 1).squared(), rat(2, 1));
    }

    #[test]
    fn ordering_matches_reals() {
        assert!(sv_sqrt(2, 1) < sv_rat(3, 2));
        assert!(sv_rat(5, 1) == ScaleValue::sqrt_of(rat(25, 1)));
        assert!(sv_sqrt(5, 1) > sv_sqrt(3, 1));
        assert!(sv_rat(0, 1) < sv_sqrt(1, 2));
    }

    #[test]
    fn one_radical_sign_cases() {
        // 1 - sqrt(2) < 0
        assert_eq!(
            sign_one_radical(&rat_int(1), &rat_int(-1), &rat_int(2)),
            Ordering::Less
        );
        // 3 - 2*sqrt(2) > 0  (9 > 8)
        assert_eq!(
            sign_one_radical(&rat_int(3), &rat_int(-2), &rat_int(2)),
            Ordering::Greater
        );
        // 2 - sqrt(4) = 0
        assert_eq!(
            sign_one_radical(&rat_int(2), &rat_int(-1), &rat_int(4)),
            Ordering::Equal
        );
    }

    #[test]
    fn two_radical_sign_cases() {
        // sqrt(2) + sqrt(3) - 3 > 0 (3.146 > 3)
        assert_eq!(
            sign_two_radicals(&rat_int(-3), &rat_int(1), &rat_int(2), &rat_int(1), &rat_int(3)),
            Ordering::Greater
        );
        // sqrt(2) + sqrt(3) - 63/20 < 0 (3.1463 < 3.15)
        assert_eq!(
            sign_two_radicals(&rat(-63, 20), &rat_int(1), &rat_int(2), &rat_int(1), &rat_int(3)),
            Ordering::Less
        );
        // sqrt(8) - 2*sqrt(2) = 0
        assert_eq!(
            sign_two_radicals(&Rat::zero(), &rat_int(1), &rat_int(8), &rat_int(-2), &rat_int(2)),
            Ordering::Equal
        );
    }

    #[test]
    fn randomized_signs_agree_with_floats() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5ca1e);
        for _ in 0..20_000 {
            let a = rat(rng.gen_range(-50..=50), rng.gen_range(1..=9));
            let b = rat(rng.gen_range(-50..=50), rng.gen_range(1..=9));
            let c = rat(rng.gen_range(-50..=50), rng.gen_range(1..=9));
            let p = rat(rng.gen_range(0..=60), 1);
            let q = rat(rng.gen_range(0..=60), 1);
            let approx = a.to_f64().unwrap()
                + b.to_f64().unwrap() * p.to_f64().unwrap().sqrt()
                + c.to_f64().unwrap() * q.to_f64().unwrap().sqrt();
            let exact = sign_two_radicals(&a, &b, &p, &c, &q);
            if approx.abs() > 1e-6 {
                let expect = if approx > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
                assert_eq!(exact, expect, "a={a} b={b} p={p} c={c} q={q}");
            }
        }
    }

    #[test]
    fn floor_of_radicals() {
        assert_eq!(sv_sqrt(2, 1).floor_int(), Int::from(1));
        assert_eq!(sv_sqrt(99, 1).floor_int(), Int::from(9));
        assert_eq!(sv_rat(201, 2).floor_int(), Int::from(100));
        assert_eq!(ScaleValue::sqrt_of(rat(65538, 16)).floor_int(), Int::from(64));
    }

    #[test]
    fn enclosure_brackets_value() {
        for (p, q) in [(2i64, 1i64), (99, 1), (65538, 1), (7, 3)] {
            let v = sv_sqrt(p, q);
            let (lo, hi) = v.enclosure(40);
            assert!(&lo * &lo <= rat(p, q));
            assert!(&hi * &hi >= rat(p, q));
            assert!(&hi - &lo <= pow2(-40));
        }
    }

    #[test]
    fn pow2_search() {
        assert_eq!(largest_pow2_leq(&rat(1, 4)), rat(1, 4));
        assert_eq!(largest_pow2_leq(&rat(134, 1000)), rat(1, 8));
        assert_eq!(largest_pow2_leq(&rat(3, 1)), rat_int(2));
        assert_eq!(largest_pow2_leq(&rat(1, 1)), rat_int(1));
        assert_eq!(largest_pow2_leq(&rat(1023, 1024)), rat(1, 2));
    }

    #[test]
    fn number_parsing_round_trips_and_rejects_floats() {
        for s in ["3", "-7/2", "201/2", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert!(parse_rat("0.25").is_err());
        assert!(parse_rat("1e9").is_err());
        assert!(parse_rat("1/0").is_err());
        let v = parse_scale("sqrt:65538").unwrap();
        assert_eq!(v.to_string(), "sqrt:65538");
        assert_eq!(parse_scale("sqrt:4").unwrap().to_string(), "2");
    }

    #[test]
    fn abs_diff_comparison() {
        // |sqrt(99) - 10| vs 1/64: true distance ~0.0501 > 1/64.
        let r = sv_sqrt(99, 1);
        assert_eq!(r.abs_diff_cmp(&sv_rat(10, 1), &rat(1, 64)), Ordering::Greater);
        // |sqrt(99) - 10| < 1/8
        assert_eq!(r.abs_diff_cmp(&sv_rat(10, 1), &rat(1, 8)), Ordering::Less);
        // equality case: |2 - sqrt(2)| vs itself is incomparable rationally,
        // but |3 - 2| = 1 exactly.
        assert_eq!(sv_rat(3, 1).abs_diff_cmp(&sv_rat(2, 1), &rat_int(1)), Ordering::Equal);
    }
}
