//! A tiny scalar abstraction so the closed-form integration kernels run in
//! both `f64` (fast path) and exact `BigRational` (verification path).
//!
//! The only operation the kernels need that rationals cannot supply is the
//! natural logarithm; those terms are therefore collected symbolically as
//! `(coefficient, argument)` pairs and evaluated by the caller.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Convert an `f64` to the exact rational it represents.
pub fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_float(x).expect("finite float")
}

pub fn rat_from_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse a coordinate that is either a decimal literal or an `"n/d"` string.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else if let Ok(n) = s.parse::<BigInt>() {
        Some(BigRational::from_integer(n))
    } else {
        let x: f64 = s.parse().ok()?;
        if !x.is_finite() {
            return None;
        }
        Some(rat_from_f64(x))
    }
}

pub trait Scalar: Clone + PartialOrd + std::fmt::Debug {
    /// Relative series-truncation threshold matching the type's precision.
    /// Exact types ignore it (their `below` tests for exact zero).
    const SERIES_EPS: f64;
    /// Relative threshold below which near-coincident slab levels are merged.
    /// Exact types ignore it (their `below` tests for exact zero).
    const MERGE_EPS: f64;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// True when `self` is negligible against `scale` at relative size `eps`.
    /// Exact types answer `self == 0` so no tolerance ever enters the
    /// rational path.
    fn below(&self, scale: &Self, eps: f64) -> bool;
}

impl Scalar for f64 {
    const SERIES_EPS: f64 = 1e-18;
    const MERGE_EPS: f64 = 1e-14;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn below(&self, scale: &Self, eps: f64) -> bool {
        f64::abs(*self) <= eps * f64::abs(*scale)
    }
}

impl Scalar for Rat {
    const SERIES_EPS: f64 = 0.0;
    const MERGE_EPS: f64 = 0.0;
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_int(n: i64) -> Self {
        rat_from_int(n)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn below(&self, _scale: &Self, _eps: f64) -> bool {
        Zero::is_zero(self)
    }
}

// ---------------------------------------------------------------------------
// Double-double arithmetic: ~32 significant digits at a small constant
// multiple of f64 cost. Used by the integration kernels when the slab
// decomposition becomes ill-conditioned but exact rationals would be
// needlessly slow.
// ---------------------------------------------------------------------------

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn norm(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        // Lexicographic order is exact for normalized pairs.
        (self.hi, self.lo).partial_cmp(&(o.hi, o.lo))
    }
}

impl Scalar for Dd {
    const SERIES_EPS: f64 = 1e-34;
    // Dropping a slab of relative width g costs ~g; keeping it costs
    // ~eps_dd / g^2 in roundoff. The crossover sits near (eps_dd)^(1/3).
    const MERGE_EPS: f64 = 3e-11;
    fn zero() -> Self {
        Dd { hi: 0.0, lo: 0.0 }
    }
    fn one() -> Self {
        Dd { hi: 1.0, lo: 0.0 }
    }
    fn from_int(n: i64) -> Self {
        Dd::from_f64(n as f64)
    }
    fn add(&self, o: &Self) -> Self {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::norm(s1, s2 + t2)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let (p1, p2) = two_prod(self.hi, o.hi);
        Dd::norm(p1, p2 + self.hi * o.lo + self.lo * o.hi)
    }
    fn div(&self, o: &Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(&o.mul(&Dd::from_f64(q1)));
        let q2 = (r.hi + r.lo) / o.hi;
        let r2 = r.sub(&o.mul(&Dd::from_f64(q2)));
        let q3 = (r2.hi + r2.lo) / o.hi;
        Dd::norm(q1, q2).add(&Dd::from_f64(q3))
    }
    fn neg(&self) -> Self {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
    fn abs(&self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            *self
        }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }
    fn below(&self, scale: &Self, eps: f64) -> bool {
        Scalar::to_f64(&Scalar::abs(self)) <= eps * Scalar::to_f64(&Scalar::abs(scale)).abs()
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials, coefficient index = power.
// ---------------------------------------------------------------------------

pub fn poly_add<T: Scalar>(a: &mut Vec<T>, b: &[T]) {
    if a.len() < b.len() {
        a.resize(b.len(), T::zero());
    }
    for (i, c) in b.iter().enumerate() {
        a[i] = a[i].add(c);
    }
}

pub fn poly_scale<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|c| c.mul(s)).collect()
}

pub fn poly_mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    out
}

/// `(a0 + a1 x)^n` as a dense polynomial in `x`.
pub fn poly_affine_pow<T: Scalar>(a0: &T, a1: &T, n: usize) -> Vec<T> {
    let mut out = vec![T::one()];
    for _ in 0..n {
        out = poly_mul(&out, &[a0.clone(), a1.clone()]);
    }
    out
}

/// Re-expand `p(c + x)` in powers of `x`.
pub fn poly_shift<T: Scalar>(p: &[T], c: &T) -> Vec<T> {
    let mut out = vec![T::zero(); p.len()];
    for (r, cr) in p.iter().enumerate() {
        // (c + x)^r
        let pow = poly_affine_pow(c, &T::one(), r);
        for (j, pj) in pow.iter().enumerate() {
            out[j] = out[j].add(&cr.mul(pj));
        }
    }
    out
}

pub fn poly_eval<T: Scalar>(p: &[T], x: &T) -> T {
    let mut acc = T::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Pairwise summation; deterministic and tolerant of cancellation-heavy terms.
pub fn pairwise_sum<T: Scalar>(terms: &[T]) -> T {
    match terms.len() {
        0 => T::zero(),
        1 => terms[0].clone(),
        n => {
            let (lo, hi) = terms.split_at(n / 2);
            pairwise_sum(lo).add(&pairwise_sum(hi))
        }
    }
}
