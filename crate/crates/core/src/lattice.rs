//! Enumeration of integer lattice points inside Euclidean balls and annuli,
//! with explicit budgets.
//!
//! Coordinate-bounded nested loops: at each level the remaining squared
//! radius bounds the coordinate range exactly (squared radii are compared as
//! integers, so no rounding enters the enumeration).

use num_traits::{Signed, ToPrimitive};

use crate::exact::{ceil_rat, floor_rat};
use crate::{Error, Rat, Result};

pub(crate) fn isqrt_i128(n: i128) -> i128 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Visit every v in Z^d with |v|_2^2 <= radius_sq. Errors once more than
/// `budget` points have been visited.
pub fn for_each_in_ball<F>(dim: usize, radius_sq: &Rat, budget: u64, f: F) -> Result<u64>
where
    F: FnMut(&[i64]) -> Result<()>,
{
    for_each_in_annulus(dim, &Rat::from_integer(0.into()), radius_sq, budget, f)
}

/// Visit every v in Z^d with lo_sq <= |v|_2^2 <= hi_sq.
pub fn for_each_in_annulus<F>(
    dim: usize,
    lo_sq: &Rat,
    hi_sq: &Rat,
    budget: u64,
    mut f: F,
) -> Result<u64>
where
    F: FnMut(&[i64]) -> Result<()>,
{
    if hi_sq.is_negative() || hi_sq < lo_sq {
        return Ok(0);
    }
    // Squared norms of lattice points are integers, so integer bounds are
    // exact: |v|^2 <= hi_sq  iff  |v|^2 <= floor(hi_sq), and likewise for
    // the lower bound with a ceiling.
    let hi = floor_rat(hi_sq)
        .to_i128()
        .ok_or_else(|| Error::BudgetExceeded("enumeration radius too large".into()))?;
    let lo = if lo_sq.is_positive() {
        ceil_rat(lo_sq).to_i128().unwrap_or(i128::MAX)
    } else {
        0
    };
    if lo > hi {
        return Ok(0);
    }
    let mut v = vec![0i64; dim];
    let mut count = 0u64;
    walk(0, 0, hi, lo, &mut v, budget, &mut count, &mut f)?;
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    level: usize,
    sum_sq: i128,
    hi: i128,
    lo: i128,
    v: &mut Vec<i64>,
    budget: u64,
    count: &mut u64,
    f: &mut F,
) -> Result<()>
where
    F: FnMut(&[i64]) -> Result<()>,
{
    let dim = v.len();
    let rem = hi - sum_sq;
    if level == dim {
        if sum_sq < lo {
            return Ok(());
        }
        *count += 1;
        if *count > budget {
            return Err(Error::BudgetExceeded(format!(
                "lattice enumeration exceeded {budget} points"
            )));
        }
        return f(v);
    }
    let bound = isqrt_i128(rem);
    let bound_i64 = bound
        .to_i64()
        .ok_or_else(|| Error::BudgetExceeded("coordinate bound too large".into()))?;
    if level + 1 == dim {
        // Last coordinate, handled inline: skip the inner gap
        // |c|^2 < lo - sum_sq, and emit points directly.
        let need = lo - sum_sq;
        let inner = if need > 0 {
            let mut r = isqrt_i128(need);
            if r * r < need {
                r += 1;
            }
            r.to_i64().unwrap_or(i64::MAX)
        } else {
            0
        };
        let emit = |range: std::ops::RangeInclusive<i64>,
                        v: &mut Vec<i64>,
                        count: &mut u64,
                        f: &mut F|
         -> Result<()> {
            let span = range.end().saturating_sub(*range.start()).max(0) as u64 + 1;
            if range.is_empty() {
                return Ok(());
            }
            *count += span;
            if *count > budget {
                return Err(Error::BudgetExceeded(format!(
                    "lattice enumeration exceeded {budget} points"
                )));
            }
            for c in range {
                v[level] = c;
                f(v)?;
            }
            Ok(())
        };
        if inner > 0 {
            emit(-bound_i64..=-inner, v, count, f)?;
            emit(inner..=bound_i64, v, count, f)?;
        } else {
            emit(-bound_i64..=bound_i64, v, count, f)?;
        }
        return Ok(());
    }
    for c in -bound_i64..=bound_i64 {
        v[level] = c;
        walk(level + 1, sum_sq + (c as i128) * (c as i128), hi, lo, v, budget, count, f)?;
    }
    Ok(())
}
