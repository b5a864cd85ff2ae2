//! Integer factorization for representability witnesses: deterministic
//! Miller-Rabin plus Brent-cycle Pollard rho, adequate for inputs up to
//! 128 bits. Larger inputs (or a stuck rho) surface as a budget error
//! rather than silently degrading.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Int, Result};

/// Deterministic Miller-Rabin witness set. Proven complete below
/// 3.3 * 10^24; for larger inputs the extended set is the standard
/// adequate-practice choice.
const MR_BASES: [u128; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        (a % m) * (b % m) % m
    } else {
        // Doubling ladder; only reached for moduli above 64 bits.
        let mut a = a % m;
        let mut b = b % m;
        let mut acc: u128 = 0;
        while b > 0 {
            if b & 1 == 1 {
                acc = acc.checked_add(a).map(|v| v % m).unwrap_or_else(|| {
                    let space = m - acc;
                    (a - space) % m
                });
            }
            b >>= 1;
            if b > 0 {
                a = a.checked_add(a).map(|v| v % m).unwrap_or_else(|| {
                    let space = m - a;
                    (a - space) % m
                });
            }
        }
        acc
    }
}

fn powmod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc: u128 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u128.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in &MR_BASES {
        if a % n == 0 {
            continue; // the base is a multiple of n (small prime n)
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin over BigInt, for validating prime witnesses of any size.
pub fn is_prime_int(n: &Int) -> bool {
    if let Some(u) = n.to_u128() {
        return is_prime_u128(u);
    }
    if !n.is_positive() {
        return false;
    }
    let one = Int::one();
    let two = &one + &one;
    if (n % &two).is_zero() {
        return false;
    }
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut s = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        s += 1;
    }
    'bases: for &a in &MR_BASES {
        let a = Int::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent-cycle Pollard rho; deterministic given the polynomial offset c.
fn pollard_brent(n: u128, c: u128, max_iter: u64) -> Option<u128> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut y: u128 = 2;
    let mut r: u64 = 1;
    let mut q: u128 = 1;
    let m: u64 = 128;
    let (mut g, mut x, mut ys) = (1u128, 0u128, 0u128);
    let mut iter = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = (mulmod(y, y, n) + c) % n;
        }
        let mut k: u64 = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = (mulmod(y, y, n) + c) % n;
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u128(q, n);
            k += m;
            iter += m;
            if iter > max_iter {
                return None;
            }
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = (mulmod(ys, ys, n) + c) % n;
            g = gcd_u128(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return None;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn factor_u128_into(n: u128, max_iter: u64, out: &mut Vec<u128>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime_u128(n) {
        out.push(n);
        return Ok(());
    }
    // Trial division keeps rho away from small factors.
    let mut m = n;
    for p in 2u128..1000 {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            out.push(p);
            m /= p;
        }
    }
    if m == 1 {
        return Ok(());
    }
    if is_prime_u128(m) {
        out.push(m);
        return Ok(());
    }
    for c in 1u128..64 {
        if let Some(d) = pollard_brent(m, c, max_iter) {
            factor_u128_into(d, max_iter, out)?;
            factor_u128_into(m / d, max_iter, out)?;
            return Ok(());
        }
    }
    Err(Error::FactorBudget(m.to_string()))
}

/// Full factorization of n >= 1 as sorted (prime, exponent) pairs.
/// Inputs above 128 bits are refused.
pub fn factor_int(n: &Int, max_iter: u64) -> Result<Vec<(Int, u32)>> {
    if !n.is_positive() {
        return Err(Error::InvalidParam("factor_int needs n >= 1".into()));
    }
    let u = n
        .to_u128()
        .ok_or_else(|| Error::FactorBudget(format!("{n} exceeds 128 bits")))?;
    let mut primes = Vec::new();
    factor_u128_into(u, max_iter, &mut primes)?;
    primes.sort_unstable();
    let mut out: Vec<(Int, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == Int::from(p) => *e += 1,
            _ => out.push((Int::from(p), 1)),
        }
    }
    Ok(out)
}
