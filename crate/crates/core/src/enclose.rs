//! Guaranteed rational enclosures for the few irrational quantities the
//! crate needs outside plain square roots: n-th roots, exp, and ln.
//!
//! Each function returns a pair (lo, hi) with lo <= value <= hi, all
//! arithmetic exact and all rounding directed outward. Enclosures feed
//! either sound outward-rounded constants or pass/fail decisions that
//! refine until the sign separates.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::pow2;
use crate::{Error, Int, Rat, Result};

/// Largest multiple of 2^-bits that is <= x.
pub fn dyadic_floor(x: &Rat, bits: u32) -> Rat {
    let scaled = x * pow2(bits as i64);
    Rat::new(scaled.floor().to_integer(), Int::one() << bits as usize)
}

/// Smallest multiple of 2^-bits that is >= x.
pub fn dyadic_ceil(x: &Rat, bits: u32) -> Rat {
    let scaled = x * pow2(bits as i64);
    Rat::new(scaled.ceil().to_integer(), Int::one() << bits as usize)
}

/// Round x > 0 to `prec` significant bits, directed up or down.
fn round_sig(x: &Rat, prec: u32, up: bool) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    debug_assert!(x.is_positive());
    let e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = e - prec as i64;
    // value = m * 2^shift with m having about `prec` bits.
    let scaled = x / pow2(shift);
    let m = if up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    Rat::from_integer(m) * pow2(shift)
}

/// Enclosure of sqrt(q), q >= 0, with absolute width <= 2^-bits.
pub fn sqrt_enclosure(q: &Rat, bits: u32) -> (Rat, Rat) {
    assert!(!q.is_negative());
    if q.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let ab = q.numer() * q.denom();
    let scaled: BigInt = ab << (2 * bits as usize);
    let s = scaled.sqrt();
    let den = q.denom() << (bits as usize);
    if &s * &s == scaled {
        let exact = Rat::new(s, den);
        return (exact.clone(), exact);
    }
    (Rat::new(s.clone(), den.clone()), Rat::new(s + 1, den))
}

/// Enclosure of t^(1/n) for t >= 0, n >= 1, absolute width <= 2^-bits.
pub fn nth_root_enclosure(t: &Rat, n: u32, bits: u32) -> (Rat, Rat) {
    assert!(!t.is_negative() && n >= 1);
    if t.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    if n == 1 {
        return (t.clone(), t.clone());
    }
    // t^(1/n) = (a * b^(n-1))^(1/n) / b for t = a/b.
    let a = t.numer();
    let b = t.denom();
    let mut scaled = a * b.pow(n - 1);
    scaled <<= (n as usize) * (bits as usize);
    let root = scaled.nth_root(n);
    let den = b << (bits as usize);
    if root.pow(n) == scaled {
        let exact = Rat::new(root, den);
        return (exact.clone(), exact);
    }
    (Rat::new(root.clone(), den.clone()), Rat::new(root + 1, den))
}

/// Enclosure of base^(u/v) for base > 0, v >= 1. Negative u inverts
/// exactly inside Ratio::pow.
pub fn pow_enclosure(base: &Rat, u: i64, v: u32, bits: u32) -> (Rat, Rat) {
    assert!(base.is_positive() && v >= 1);
    nth_root_enclosure(&base.pow(u as i32), v, bits)
}

const EXP_ARG_LIMIT: u32 = 100_000;

/// Enclosure of exp(x) with relative width about 2^-bits.
///
/// Arguments beyond EXP_ARG_LIMIT in absolute value are refused: the result
/// would not fit in memory, which surfaces as a budget error to callers
/// planning with extremely slow decay functions.
pub fn exp_enclosure(x: &Rat, bits: u32) -> Result<(Rat, Rat)> {
    if x.is_negative() {
        let (lo, hi) = exp_enclosure(&-x.clone(), bits)?;
        return Ok((hi.recip(), lo.recip()));
    }
    if x > &Rat::from_integer(Int::from(EXP_ARG_LIMIT)) {
        return Err(Error::BudgetExceeded(format!(
            "exp argument {} exceeds the supported magnitude {EXP_ARG_LIMIT}",
            x.to_f64().unwrap_or(f64::INFINITY)
        )));
    }
    // Argument reduction: exp(x) = exp(x / 2^s)^(2^s) with reduced arg <= 1/2.
    let mut s = 0u32;
    let half = Rat::new(Int::one(), Int::from(2));
    let mut y = x.clone();
    while y > half {
        y /= Rat::from_integer(Int::from(2));
        s += 1;
    }
    let prec = bits + s + 16;
    // Taylor series with certified remainder: for 0 <= y <= 1/2,
    // exp(y) = sum_{k<=N} y^k/k! + R with 0 <= R <= 2 * y^(N+1)/(N+1)!.
    let tol = pow2(-((prec + 4) as i64));
    let mut sum = Rat::one();
    let mut term = Rat::one();
    let mut k = 1u32;
    loop {
        term = term * &y / Rat::from_integer(Int::from(k));
        sum += &term;
        let rem_bound = &term * Rat::from_integer(Int::from(2));
        if rem_bound <= tol || y.is_zero() {
            let mut lo = sum.clone();
            let mut hi = sum + rem_bound;
            // Repeated squaring with directed rounding at `prec` bits.
            for _ in 0..s {
                lo = round_sig(&(&lo * &lo), prec, false);
                hi = round_sig(&(&hi * &hi), prec, true);
            }
            return Ok((lo, hi));
        }
        k += 1;
        if k > 10 * prec {
            return Err(Error::BudgetExceeded("exp series failed to converge".into()));
        }
    }
}

/// Enclosure of ln(2), absolute width <= 2^-bits.
fn ln2_enclosure(bits: u32) -> (Rat, Rat) {
    // ln 2 = 2 * atanh(1/3).
    atanh_enclosure(&Rat::new(Int::one(), Int::from(3)), bits + 2)
}

/// Enclosure of 2*atanh(w) for 0 <= w <= 1/3.
fn atanh_enclosure(w: &Rat, bits: u32) -> (Rat, Rat) {
    debug_assert!(!w.is_negative() && *w <= Rat::new(Int::one(), Int::from(3)));
    if w.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let tol = pow2(-((bits + 4) as i64));
    let w2 = w * w;
    let mut sum = Rat::zero();
    let mut power = w.clone();
    let mut i = 0u32;
    loop {
        sum += &power / Rat::from_integer(Int::from(2 * i + 1));
        let next = &power * &w2;
        // Tail bound: sum_{j>i} w^(2j+1)/(2j+1) <= w^(2i+3)/(2i+3) * 1/(1-w^2)
        // and 1/(1-w^2) <= 9/8 for w <= 1/3.
        let tail = &next * Rat::new(Int::from(9), Int::from(8))
            / Rat::from_integer(Int::from(2 * i + 3));
        if tail <= tol {
            let lo = &sum * Rat::from_integer(Int::from(2));
            let hi = (&sum + tail) * Rat::from_integer(Int::from(2));
            return (lo, hi);
        }
        power = next;
        i += 1;
    }
}

/// Enclosure of ln(y) for y > 0, absolute width <= 2^-bits.
pub fn ln_enclosure(y: &Rat, bits: u32) -> (Rat, Rat) {
    assert!(y.is_positive());
    // Work at slightly higher precision, with y rounded to a thin dyadic
    // interval first so series terms keep bounded denominators.
    let prec = bits + 8;
    let ylo = round_sig(y, prec + 64, false);
    let yhi = round_sig(y, prec + 64, true);
    let lo = ln_dyadic(&ylo, prec, false);
    let hi = ln_dyadic(&yhi, prec, true);
    (lo, hi)
}

fn ln_dyadic(y: &Rat, bits: u32, upper: bool) -> Rat {
    // Reduce y = z * 2^k with z in [1, 2).
    let mut k: i64 = y.numer().bits() as i64 - y.denom().bits() as i64;
    let mut z = y / pow2(k);
    while z >= Rat::from_integer(Int::from(2)) {
        z /= Rat::from_integer(Int::from(2));
        k += 1;
    }
    while z < Rat::one() {
        z *= Rat::from_integer(Int::from(2));
        k -= 1;
    }
    // ln z = 2 atanh((z-1)/(z+1)), argument in [0, 1/3).
    let w = (&z - Rat::one()) / (&z + Rat::one());
    let (alo, ahi) = atanh_enclosure(&w, bits + 4);
    let (l2lo, l2hi) = ln2_enclosure(bits + 4);
    let kq = Rat::from_integer(Int::from(k));
    if upper {
        let kterm = if k >= 0 { &kq * l2hi } else { &kq * l2lo };
        kterm + ahi
    } else {
        let kterm = if k >= 0 { &kq * l2lo } else { &kq * l2hi };
        kterm + alo
    }
}
