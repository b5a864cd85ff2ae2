//! Norms on R^d: lp norms and polytope norms (maxima of |linear
//! functionals|), with exact evaluation on rational points, certified
//! equivalence constants against the Euclidean norm, minimal nonzero
//! lattice values, and unit-ball volumes.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enclose::{nth_root_enclosure, sqrt_enclosure};
use crate::exact::{parse_rat, format_rat, ScaleValue};
use crate::lattice;
use crate::scalar::{RawNorm, Scalar};
use crate::{Error, Int, Rat, Result};

/// Exponent of an lp norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpExp {
    Finite(Rat),
    Infinity,
}

/// The shape of a norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormKind {
    Lp(LpExp),
    /// rho(x) = max_i |a_i . x| for functionals a_i spanning R^d.
    Polytope(Vec<Vec<Rat>>),
}

/// A symmetric norm on R^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSpec {
    dim: usize,
    kind: NormKind,
}

/// Sound rational constants with c_lo * |x|_2 <= rho(x) <= c_hi * |x|_2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceConstants {
    pub c_lo: Rat,
    pub c_hi: Rat,
}

/// A unit-ball volume: exact coeff * pi^k, or a statistical estimate with a
/// one-sided lower confidence bound.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeEstimate {
    Exact { coeff: Rat, pi_pow: u32 },
    Statistical {
        estimate: f64,
        lower_bound: f64,
        confidence: f64,
        samples: u64,
    },
}

impl VolumeEstimate {
    pub fn to_f64(&self) -> f64 {
        match self {
            VolumeEstimate::Exact { coeff, pi_pow } => {
                coeff.to_f64().unwrap_or(f64::NAN)
                    * std::f64::consts::PI.powi(*pi_pow as i32)
            }
            VolumeEstimate::Statistical { estimate, .. } => *estimate,
        }
    }
}

/// Result of evaluating a norm: exact where the kind supports it, otherwise
/// a guaranteed enclosure (flagged by the variant itself).
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(ScaleValue),
    Enclosure { lo: Rat, hi: Rat },
}

impl NormSpec {
    pub fn lp(dim: usize, p: Rat) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidNorm("dimension must be >= 1".into()));
        }
        if p < Rat::one() {
            return Err(Error::InvalidNorm(format!(
                "lp exponent must satisfy p >= 1, got {}",
                format_rat(&p)
            )));
        }
        if p.numer().bits() > 16 || p.denom().bits() > 16 {
            return Err(Error::InvalidNorm("lp exponent too large".into()));
        }
        Ok(NormSpec { dim, kind: NormKind::Lp(LpExp::Finite(p)) })
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::lp(dim, Rat::one())
    }

    pub fn l2(dim: usize) -> Result<Self> {
        Self::lp(dim, Rat::from_integer(Int::from(2)))
    }

    pub fn linf(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidNorm("dimension must be >= 1".into()));
        }
        Ok(NormSpec { dim, kind: NormKind::Lp(LpExp::Infinity) })
    }

    pub fn polytope(dim: usize, rows: Vec<Vec<Rat>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidNorm("dimension must be >= 1".into()));
        }
        if rows.is_empty() {
            return Err(Error::DegeneratePolytope);
        }
        for r in &rows {
            if r.len() != dim {
                return Err(Error::InvalidNorm(format!(
                    "functional has {} entries, expected {dim}",
                    r.len()
                )));
            }
        }
        if rank(&rows) < dim {
            return Err(Error::DegeneratePolytope);
        }
        Ok(NormSpec { dim, kind: NormKind::Polytope(rows) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// Whether exact evaluation (and hence certification) is available.
    pub fn is_exact_capable(&self) -> bool {
        match &self.kind {
            NormKind::Lp(LpExp::Infinity) => true,
            NormKind::Lp(LpExp::Finite(p)) => {
                *p == Rat::one() || *p == Rat::from_integer(Int::from(2))
            }
            NormKind::Polytope(_) => true,
        }
    }

    fn require_exact(&self) -> Result<()> {
        if self.is_exact_capable() {
            Ok(())
        } else {
            Err(Error::NotExact(self.to_string()))
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: n })
        }
    }

    /// Generic evaluation kernel over exact-capable kinds.
    pub fn eval_raw<T: Scalar>(&self, x: &[T]) -> Result<RawNorm<T>> {
        self.check_dim(x.len())?;
        match &self.kind {
            NormKind::Lp(LpExp::Finite(p)) if p.is_one() => {
                let mut s = T::zero();
                for v in x {
                    s = s + v.abs();
                }
                Ok(RawNorm::Value(s))
            }
            NormKind::Lp(LpExp::Finite(p)) if *p == Rat::from_integer(Int::from(2)) => {
                let mut s = T::zero();
                for v in x {
                    s = s + v.clone() * v.clone();
                }
                Ok(RawNorm::SqrtOf(s))
            }
            NormKind::Lp(LpExp::Infinity) => {
                let mut m = T::zero();
                for v in x {
                    let a = v.abs();
                    if a > m {
                        m = a;
                    }
                }
                Ok(RawNorm::Value(m))
            }
            NormKind::Polytope(rows) => {
                let mut m = T::zero();
                for row in rows {
                    let mut dot = T::zero();
                    for (a, v) in row.iter().zip(x) {
                        dot = dot + T::from_rat(a) * v.clone();
                    }
                    let a = dot.abs();
                    if a > m {
                        m = a;
                    }
                }
                Ok(RawNorm::Value(m))
            }
            NormKind::Lp(LpExp::Finite(p)) => Err(Error::NotExact(format!(
                "lp:{}",
                format_rat(p)
            ))),
        }
    }

    /// Exact evaluation on a rational point (exact-capable kinds only).
    pub fn eval(&self, x: &[Rat]) -> Result<ScaleValue> {
        self.require_exact()?;
        match self.eval_raw::<Rat>(x)? {
            RawNorm::Value(v) => Ok(ScaleValue::from_rat(v)),
            RawNorm::SqrtOf(q) => Ok(ScaleValue::sqrt_of(q)),
        }
    }

    /// Evaluation for every kind: exact where possible, otherwise a
    /// guaranteed enclosure narrowed below `width`.
    pub fn eval_value(&self, x: &[Rat], width: &Rat) -> Result<NormValue> {
        if self.is_exact_capable() {
            return Ok(NormValue::Exact(self.eval(x)?));
        }
        self.check_dim(x.len())?;
        let NormKind::Lp(LpExp::Finite(p)) = &self.kind else {
            unreachable!("only general lp is non-exact")
        };
        let u = p.numer().to_u32().ok_or_else(|| {
            Error::InvalidNorm("lp exponent numerator too large".into())
        })?;
        let v = p.denom().to_u32().ok_or_else(|| {
            Error::InvalidNorm("lp exponent denominator too large".into())
        })?;
        let mut bits = 48u32;
        loop {
            // sum of |x_i|^p = sum of (|x_i|^u)^(1/v)
            let mut lo = Rat::zero();
            let mut hi = Rat::zero();
            for xi in x {
                let powed = xi.abs().pow(u as i32);
                let (tl, th) = nth_root_enclosure(&powed, v, bits);
                lo += tl;
                hi += th;
            }
            // norm = sum^(1/p) = (sum^v)^(1/u), monotone in sum.
            let (nl, _) = nth_root_enclosure(&lo.pow(v as i32), u, bits);
            let (_, nh) = nth_root_enclosure(&hi.pow(v as i32), u, bits);
            if &nh - &nl <= *width {
                return Ok(NormValue::Enclosure { lo: nl, hi: nh });
            }
            bits += 48;
            if bits > 4096 {
                return Err(Error::BudgetExceeded(
                    "norm enclosure failed to narrow".into(),
                ));
            }
        }
    }

    /// Floating-point evaluation (sampling/rendering only).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Lp(LpExp::Finite(p))
                if !p.is_one() && *p != Rat::from_integer(Int::from(2)) =>
            {
                let pf = p.to_f64().unwrap();
                x.iter().map(|v| v.abs().powf(pf)).sum::<f64>().powf(1.0 / pf)
            }
            _ => match self.eval_raw::<f64>(x) {
                Ok(RawNorm::Value(v)) => v,
                Ok(RawNorm::SqrtOf(q)) => q.sqrt(),
                Err(_) => f64::NAN,
            },
        }
    }

    /// Exact three-way comparison of rho(x) with an exact scale t.
    pub fn compare_to(&self, x: &[Rat], t: &ScaleValue) -> Result<Ordering> {
        Ok(self.eval(x)?.cmp(t))
    }

    /// Certified equivalence constants against the Euclidean norm. Sound,
    /// outward-rounded, not necessarily tight.
    pub fn equivalence_constants(&self) -> Result<EquivalenceConstants> {
        let d = Rat::from_integer(Int::from(self.dim as u64));
        let two = Rat::from_integer(Int::from(2));
        match &self.kind {
            NormKind::Lp(LpExp::Finite(p)) if *p == two => Ok(EquivalenceConstants {
                c_lo: Rat::one(),
                c_hi: Rat::one(),
            }),
            NormKind::Lp(LpExp::Finite(p)) if *p <= two => {
                // rho_p >= rho_2, and rho_p <= d^(1/p - 1/2) rho_2.
                let e = (&two - p) / (&two * p);
                let (_, hi) = pow_rat(&d, &e)?;
                Ok(EquivalenceConstants { c_lo: Rat::one(), c_hi: hi })
            }
            NormKind::Lp(LpExp::Finite(p)) => {
                // p > 2: rho_p <= rho_2 and rho_p >= d^(1/p - 1/2) rho_2.
                let e = (p - &two) / (&two * p);
                let (_, hi) = pow_rat(&d, &e)?;
                Ok(EquivalenceConstants { c_lo: hi.recip(), c_hi: Rat::one() })
            }
            NormKind::Lp(LpExp::Infinity) => {
                let (lo, _) = sqrt_enclosure(&d.recip(), 64);
                Ok(EquivalenceConstants { c_lo: lo, c_hi: Rat::one() })
            }
            NormKind::Polytope(rows) => {
                // Upper: rho(x) <= max_i |a_i|_2 |x|_2.
                let mut c_hi = Rat::zero();
                for row in rows {
                    let n2: Rat = row.iter().map(|a| a * a).sum();
                    let (_, hi) = sqrt_enclosure(&n2, 64);
                    if hi > c_hi {
                        c_hi = hi;
                    }
                }
                // Lower: min over the unit sphere of rho equals the
                // reciprocal of the circumradius of {x : |a_i.x| <= 1},
                // attained at a vertex of that polytope.
                let best = max_vertex_norm_sq(self.dim, rows)?;
                let (lo, _) = sqrt_enclosure(&best.recip(), 64);
                if !lo.is_positive() {
                    return Err(Error::DegeneratePolytope);
                }
                Ok(EquivalenceConstants { c_lo: lo, c_hi })
            }
        }
    }

    /// Minimal rho-value over nonzero lattice points, exact.
    pub fn min_lattice_norm(&self, budget: u64) -> Result<ScaleValue> {
        self.require_exact()?;
        let consts = self.equivalence_constants()?;
        // Any nonzero point bounds the minimum: use rho(e_1).
        let mut e1 = vec![Rat::zero(); self.dim];
        e1[0] = Rat::one();
        let upper = self.eval(&e1)?;
        // Candidates lie in |v|_2 <= rho(e_1)/c_lo.
        let radius_sq = upper.squared() / (&consts.c_lo * &consts.c_lo);
        let mut best: Option<ScaleValue> = None;
        lattice::for_each_in_ball(self.dim, &radius_sq, budget, |v| {
            if v.iter().all(|c| *c == 0) {
                return Ok(());
            }
            let x: Vec<Rat> = v.iter().map(|c| Rat::from_integer(Int::from(*c))).collect();
            let val = self.eval(&x)?;
            if best.as_ref().map_or(true, |b| val < *b) {
                best = Some(val);
            }
            Ok(())
        })?;
        best.ok_or_else(|| Error::InvalidNorm("no lattice point in enumeration window".into()))
    }

    /// Unit-ball volume: closed form for l1/l2/linf, otherwise a seeded
    /// Monte Carlo estimate with a distribution-free (Hoeffding) one-sided
    /// lower confidence bound.
    pub fn unit_ball_volume(
        &self,
        budget: u64,
        confidence: f64,
        seed: u64,
    ) -> Result<VolumeEstimate> {
        let d = self.dim;
        let two = Rat::from_integer(Int::from(2));
        match &self.kind {
            NormKind::Lp(LpExp::Finite(p)) if p.is_one() => Ok(VolumeEstimate::Exact {
                coeff: two.pow(d as i32) / Rat::from_integer(factorial(d)),
                pi_pow: 0,
            }),
            NormKind::Lp(LpExp::Infinity) => Ok(VolumeEstimate::Exact {
                coeff: two.pow(d as i32),
                pi_pow: 0,
            }),
            NormKind::Lp(LpExp::Finite(p)) if *p == two => {
                let k = d / 2;
                let coeff = if d % 2 == 0 {
                    Rat::from_integer(factorial(k)).recip()
                } else {
                    two.pow(d as i32) * Rat::from_integer(factorial(k))
                        / Rat::from_integer(factorial(d))
                };
                Ok(VolumeEstimate::Exact { coeff, pi_pow: k as u32 })
            }
            _ => self.sample_unit_ball_volume(budget, confidence, seed),
        }
    }

    /// The Monte Carlo volume estimator itself, available for any norm
    /// (cross-validates the closed forms in tests).
    pub fn sample_unit_ball_volume(
        &self,
        budget: u64,
        confidence: f64,
        seed: u64,
    ) -> Result<VolumeEstimate> {
        if budget == 0 {
            return Err(Error::InvalidParam(
                "zero sample budget for a norm with no closed-form volume".into(),
            ));
        }
        if !(0.0 < confidence && confidence < 1.0) {
            return Err(Error::InvalidParam("confidence must be in (0,1)".into()));
        }
        let d = self.dim;
        let consts = self.equivalence_constants()?;
        let half_side = consts.c_lo.recip().to_f64().unwrap();
        let exact_member = self.is_exact_capable();
        let one = ScaleValue::from_rat(Rat::one());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0u64;
        let mut x = vec![0f64; d];
        for _ in 0..budget {
            for c in x.iter_mut() {
                *c = rng.gen_range(-half_side..half_side);
            }
            let inside = if exact_member {
                let xr: Vec<Rat> = x.iter().map(|f| Rat::from_float(*f).unwrap()).collect();
                self.compare_to(&xr, &one)? == Ordering::Less
            } else {
                self.eval_f64(&x) < 1.0
            };
            if inside {
                hits += 1;
            }
        }
        let box_vol = (2.0 * half_side).powi(d as i32);
        let p_hat = hits as f64 / budget as f64;
        // Hoeffding: P(p_hat - p >= t) <= exp(-2 n t^2).
        let t = ((1.0 / (1.0 - confidence)).ln() / (2.0 * budget as f64)).sqrt();
        Ok(VolumeEstimate::Statistical {
            estimate: box_vol * p_hat,
            lower_bound: box_vol * (p_hat - t).max(0.0),
            confidence,
            samples: budget,
        })
    }

    /// Parse the textual norm form: `l1`, `l2`, `linf`, `lp:<p>`,
    /// `poly:[(a11,a12,...),(...),...]`.
    pub fn parse(dim: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "l1" => return Self::l1(dim),
            "l2" => return Self::l2(dim),
            "linf" => return Self::linf(dim),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("lp:") {
            return Self::lp(dim, parse_rat(p)?);
        }
        if let Some(body) = s.strip_prefix("poly:") {
            let body = body.trim();
            let inner = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("bad polytope spec '{s}'")))?;
            let mut rows = Vec::new();
            let mut rest = inner.trim();
            while !rest.is_empty() {
                let rest2 = rest
                    .strip_prefix('(')
                    .ok_or_else(|| Error::Parse(format!("expected '(' in '{s}'")))?;
                let (tuple, tail) = rest2
                    .split_once(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed '(' in '{s}'")))?;
                let row: Result<Vec<Rat>> = tuple.split(',').map(parse_rat).collect();
                rows.push(row?);
                rest = tail.trim_start_matches(',').trim();
            }
            return Self::polytope(dim, rows);
        }
        Err(Error::Parse(format!("unknown norm '{s}'")))
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NormKind::Lp(LpExp::Finite(p)) if p.is_one() => write!(f, "l1"),
            NormKind::Lp(LpExp::Finite(p)) if *p == Rat::from_integer(Int::from(2)) => {
                write!(f, "l2")
            }
            NormKind::Lp(LpExp::Finite(p)) => write!(f, "lp:{}", format_rat(p)),
            NormKind::Lp(LpExp::Infinity) => write!(f, "linf"),
            NormKind::Polytope(rows) => {
                write!(f, "poly:[")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "(")?;
                    for (j, a) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", format_rat(a))?;
                    }
                    write!(f, ")")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Enclosure of base^e for rational base > 0 and rational exponent e >= 0.
fn pow_rat(base: &Rat, e: &Rat) -> Result<(Rat, Rat)> {
    let u = e.numer().to_i64().ok_or_else(|| {
        Error::InvalidParam("exponent numerator too large".into())
    })?;
    let v = e.denom().to_u32().ok_or_else(|| {
        Error::InvalidParam("exponent denominator too large".into())
    })?;
    if !(-(1 << 16)..(1 << 16)).contains(&u) {
        return Err(Error::InvalidParam("exponent too large".into()));
    }
    Ok(crate::enclose::pow_enclosure(base, u, v, 64))
}

fn factorial(n: usize) -> Int {
    let mut acc = Int::one();
    for k in 2..=n {
        acc *= Int::from(k as u64);
    }
    acc
}

/// Rank of a rational matrix via exact Gaussian elimination.
fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let pv = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] / &pv;
                for c in col..ncols {
                    let sub = &factor * &m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solve a d x d rational system; None if singular.
fn solve_linear(mat: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let d = rhs.len();
    let mut m: Vec<Vec<Rat>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let pv = m[col][col].clone();
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let factor = &m[r][col] / &pv;
                for c in col..=d {
                    let sub = &factor * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some((0..d).map(|r| &m[r][d] / &m[r][r]).collect())
}

/// Largest squared Euclidean norm over the vertices of {x : |a_i.x| <= 1}.
fn max_vertex_norm_sq(dim: usize, rows: &[Vec<Rat>]) -> Result<Rat> {
    let m = rows.len();
    let combos = binomial(m, dim).saturating_mul(1u64 << (dim.saturating_sub(1)));
    if combos > 2_000_000 {
        return Err(Error::BudgetExceeded(
            "polytope vertex enumeration too large".into(),
        ));
    }
    let mut best: Option<Rat> = None;
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        // All sign patterns with the first sign fixed (central symmetry).
        for signs in 0..(1u64 << (dim - 1)) {
            let mat: Vec<Vec<Rat>> = subset.iter().map(|&i| rows[i].clone()).collect();
            let rhs: Vec<Rat> = (0..dim)
                .map(|j| {
                    if j > 0 && (signs >> (j - 1)) & 1 == 1 {
                        -Rat::one()
                    } else {
                        Rat::one()
                    }
                })
                .collect();
            if let Some(x) = solve_linear(&mat, &rhs) {
                let feasible = rows.iter().all(|row| {
                    let dot: Rat = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                    dot.abs() <= Rat::one()
                });
                if feasible {
                    let n2: Rat = x.iter().map(|v| v * v).sum();
                    if best.as_ref().map_or(true, |b| n2 > *b) {
                        best = Some(n2);
                    }
                }
            }
        }
        // Next d-combination of {0..m}.
        let mut i = dim;
        loop {
            if i == 0 {
                return best.ok_or(Error::DegeneratePolytope);
            }
            i -= 1;
            if subset[i] < m - dim + i {
                subset[i] += 1;
                for j in i + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i + 1) as u64;
    }
    acc
}
