//! Closed real intervals with dyadic endpoints and outward rounding.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round};

/// Enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

/// Decimal rendering of an interval: two directed bounds, never a single float.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalInterval {
    pub lo: String,
    pub hi: String,
}

/// Significant digits used when rendering intervals as decimal strings.
pub const DECIMAL_DIGITS: u32 = 20;

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Interval::point(Dyadic::one())
    }

    pub fn from_int(v: i64) -> Self {
        Interval::point(Dyadic::from_int(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Interval::point(Dyadic::from_bigint(v.clone()))
    }

    /// Tightest enclosure of a rational at `prec` bits (exact for dyadics).
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        match Dyadic::try_from_rational(r) {
            Some(d) => Interval::point(d),
            None => Interval {
                lo: Dyadic::from_rational(r, prec, Round::Down),
                hi: Dyadic::from_rational(r, prec, Round::Up),
            },
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// `log2` of the width, `None` for a point.
    pub fn width_log2(&self) -> Option<i64> {
        let w = self.width();
        if w.is_zero() {
            None
        } else {
            Some(w.magnitude())
        }
    }

    /// Whether the width is at most `2^-bits`.
    pub fn width_at_most_pow2(&self, bits: i64) -> bool {
        self.width() <= Dyadic::pow2(-bits)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).shl(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min_ref(&other.lo).clone(),
            hi: self.hi.max_ref(&other.hi).clone(),
        }
    }

    /// Outward rounding of both endpoints to `prec` significant bits.
    pub fn round(&self, prec: u32) -> Interval {
        Interval {
            lo: self.lo.round(prec, Round::Down),
            hi: self.hi.round(prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval { lo: Dyadic::zero(), hi: self.lo.abs().max_ref(&self.hi).clone() }
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.add(&other.lo), hi: self.hi.add(&other.hi) }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.sub(&other.hi), hi: self.hi.sub(&other.lo) }
    }

    /// Exact product.
    pub fn mul(&self, other: &Interval) -> Interval {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Interval { lo: self.lo.mul(&other.lo), hi: self.hi.mul(&other.hi) };
        }
        let c = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Product rounded outward to `prec` bits.
    pub fn mul_r(&self, other: &Interval, prec: u32) -> Interval {
        self.mul(other).round(prec)
    }

    pub fn add_r(&self, other: &Interval, prec: u32) -> Interval {
        self.add(other).round(prec)
    }

    pub fn scale(&self, k: &Dyadic) -> Interval {
        self.mul(&Interval::point(k.clone()))
    }

    pub fn scale_int(&self, k: i64) -> Interval {
        self.scale(&Dyadic::from_int(k))
    }

    pub fn shl(&self, k: i64) -> Interval {
        Interval { lo: self.lo.shl(k), hi: self.hi.shl(k) }
    }

    pub fn square(&self, prec: u32) -> Interval {
        let a = self.abs();
        a.mul_r(&a, prec)
    }

    /// Quotient; the divisor must not contain zero.
    pub fn div(&self, other: &Interval, prec: u32) -> Interval {
        assert!(!other.contains_zero(), "interval division by an interval containing zero");
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs.iter().map(|(a, b)| a.div(b, prec, Round::Down)).min().unwrap();
        let hi = pairs.iter().map(|(a, b)| a.div(b, prec, Round::Up)).max().unwrap();
        Interval { lo, hi }
    }

    pub fn recip(&self, prec: u32) -> Interval {
        Interval::one().div(self, prec)
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max_ref(&other.lo).clone(),
            hi: self.hi.max_ref(&other.hi).clone(),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min_ref(&other.lo).clone(),
            hi: self.hi.min_ref(&other.hi).clone(),
        }
    }

    /// Square root; negative parts of the interval are clipped to zero.
    pub fn sqrt(&self, prec: u32) -> Interval {
        assert!(!self.hi.is_negative(), "square root of a negative interval");
        let lo = if self.lo.is_negative() {
            Dyadic::zero()
        } else {
            self.lo.sqrt(prec, Round::Down)
        };
        Interval { lo, hi: self.hi.sqrt(prec, Round::Up) }
    }

    /// Integer power by repeated squaring, rounding at every step.
    pub fn powi(&self, mut n: u64, prec: u32) -> Interval {
        let mut result = Interval::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_r(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_r(&base, prec);
            }
        }
        result
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self, prec: u32) -> Interval {
        assert!(self.lo.is_positive(), "logarithm of a non-positive interval");
        let lo = ln_dyadic(&self.lo, prec).lo;
        let hi = ln_dyadic(&self.hi, prec).hi;
        Interval { lo, hi }
    }

    pub fn exp(&self, prec: u32) -> Interval {
        let lo = exp_dyadic(&self.lo, prec).lo;
        let hi = exp_dyadic(&self.hi, prec).hi;
        Interval { lo, hi }
    }

    /// `self^e` for a positive base.
    pub fn pow(&self, e: &Interval, prec: u32) -> Interval {
        let l = self.ln(prec + 16);
        l.mul(e).round(prec + 16).exp(prec)
    }

    /// `ln(2)` enclosure.
    pub fn ln2(prec: u32) -> Interval {
        ln2(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid_f64()
    }

    pub fn to_decimal(&self) -> DecimalInterval {
        DecimalInterval {
            lo: self.lo.to_decimal(DECIMAL_DIGITS, Round::Down),
            hi: self.hi.to_decimal(DECIMAL_DIGITS, Round::Up),
        }
    }
}

impl DecimalInterval {
    /// Parse the bounds back into an interval; bounds that are not dyadic
    /// are widened outward at `prec` bits.
    pub fn to_interval(&self, prec: u32) -> Option<Interval> {
        let lo = Dyadic::parse_decimal(&self.lo)?;
        let hi = Dyadic::parse_decimal(&self.hi)?;
        let lo = Interval::from_rational(&lo, prec).lo;
        let hi = Interval::from_rational(&hi, prec).hi;
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    pub fn zero() -> Self {
        DecimalInterval { lo: "0".into(), hi: "0".into() }
    }
}

static LN2_CACHE: Mutex<Option<(u32, Interval)>> = Mutex::new(None);

fn ln2(prec: u32) -> Interval {
    {
        let guard = LN2_CACHE.lock().unwrap();
        if let Some((p, v)) = guard.as_ref() {
            if *p >= prec {
                return v.clone();
            }
        }
    }
    // ln 2 = 2 atanh(1/3)
    let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), prec + 16);
    let v = atanh_small(&third, prec + 8).shl(1);
    *LN2_CACHE.lock().unwrap() = Some((prec, v.clone()));
    v
}

/// `atanh(s)` for `|s| <= 1/2` via its odd power series with a geometric
/// remainder bound.
fn atanh_small(s: &Interval, prec: u32) -> Interval {
    let work = prec + 16;
    let s2 = s.square(work);
    let mut power = s.clone();
    let mut sum = Interval::zero();
    let mut k: u64 = 1;
    let s_abs_hi = s.abs().hi.clone();
    let one_minus = Dyadic::one().sub(&s_abs_hi.mul(&s_abs_hi));
    loop {
        let term = power.div(&Interval::from_int(k as i64), work);
        sum = sum.add(&term).round(work);
        power = power.mul_r(&s2, work);
        k += 2;
        // |remainder| <= |s|^k / (k (1 - s^2))
        let bound = power
            .abs()
            .hi
            .div(&Dyadic::from_int(k as i64).mul(&one_minus), work, Round::Up);
        if bound.is_zero() || bound.magnitude() < -(work as i64) {
            return sum.add(&Interval::new(bound.neg(), bound));
        }
    }
}

fn ln_dyadic(v: &Dyadic, prec: u32) -> Interval {
    assert!(v.is_positive());
    let work = prec + 24;
    let b = v.bits() as i64;
    // v = y * 2^k with y in [1/sqrt2, sqrt2)
    let mut k = v.exponent() + b;
    let mut y = Dyadic::new(v.mantissa().clone(), -b);
    // 0.70703125 < 1/sqrt(2)
    if y < Dyadic::new(BigInt::from(181), -8) {
        y = y.shl(1);
        k -= 1;
    }
    let yi = Interval::point(y);
    let one = Interval::one();
    let s = yi.sub(&one).div(&yi.add(&one), work);
    let mut result = atanh_small(&s, work).shl(1);
    if k != 0 {
        result = result.add(&ln2(work).scale_int(k));
    }
    result.round(prec + 8)
}

fn exp_dyadic(a: &Dyadic, prec: u32) -> Interval {
    if a.is_zero() {
        return Interval::one();
    }
    let af = a.to_f64();
    assert!(af.abs() < 1e15, "exponent argument too large");
    let extra = (af.abs() * std::f64::consts::LOG2_E) as u32;
    let work = prec + 32 + extra.min(1 << 20) / 16;
    let k = (af / std::f64::consts::LN_2).round() as i64;
    let l2 = ln2(work + 64);
    let mut r = Interval::point(a.clone()).sub(&l2.scale_int(k)).round(work);
    let halvings: i64 = 10;
    r = r.shl(-halvings);
    // Taylor series with remainder |r|^(n+1)/(n+1)! * 2 (valid for |r| < 1).
    let r_abs = r.abs().hi.clone();
    let mut sum = Interval::one();
    let mut term = Interval::one();
    let mut n: i64 = 1;
    loop {
        term = term.mul_r(&r, work).div(&Interval::from_int(n), work);
        sum = sum.add(&term).round(work);
        n += 1;
        let tail = term.abs().hi.mul(&r_abs).shl(1).div(&Dyadic::from_int(n), work, Round::Up);
        if tail.is_zero() || tail.magnitude() < -(work as i64) - 4 {
            sum = sum.add(&Interval::new(tail.neg(), tail));
            break;
        }
    }
    for _ in 0..halvings {
        sum = sum.mul_r(&sum, work);
    }
    sum.shl(k).round(prec + 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn within(x: &Interval, lo: &str, hi: &str) -> bool {
        let lo = Dyadic::parse_decimal(lo).unwrap();
        let hi = Dyadic::parse_decimal(hi).unwrap();
        x.lo().to_rational() >= lo && x.hi().to_rational() <= hi
    }

    #[test]
    fn ln2_matches_known_digits() {
        let l = ln2(200);
        // ln 2 = 0.693147180559945309417232121458176568...
        let lo = Dyadic::parse_decimal("0.6931471805599453094172321214581").unwrap();
        let hi = Dyadic::parse_decimal("0.6931471805599453094172321214582").unwrap();
        assert!(l.lo().to_rational() > lo);
        assert!(l.hi().to_rational() < hi);
        assert!(l.width_at_most_pow2(190));
    }

    #[test]
    fn ln_and_exp_are_inverse() {
        let x = Interval::from_rational(&rat(100, 1), 128);
        let l = x.ln(128);
        // ln 100 = 4.605170185988091368...
        assert!(within(&l, "4.60517018598809136803", "4.60517018598809136804"));
        let back = l.exp(128);
        assert!(back.contains(&Dyadic::from_int(100)));
        assert!(back.width_at_most_pow2(100));
    }

    #[test]
    fn exp_of_negative_and_small_arguments() {
        let e = Interval::from_int(-1).exp(100);
        // e^-1 = 0.36787944117144232159552377...
        assert!(within(&e, "0.36787944117144232159552", "0.36787944117144232159553"));
        let tiny = Interval::point(Dyadic::pow2(-80)).exp(100);
        assert!(tiny.lo() > &Dyadic::one());
    }

    #[test]
    fn ln_of_values_below_one() {
        let x = Interval::from_rational(&rat(1, 10), 128);
        let l = x.ln(100);
        // ln 0.1 = -2.302585092994045684017991454684...
        assert!(within(&l, "-2.30258509299404568401800", "-2.30258509299404568401799"));
    }

    #[test]
    fn division_and_powers() {
        let three = Interval::from_int(3);
        let third = Interval::one().div(&three, 64);
        assert!(third.contains_rational(&rat(1, 3)));
        let p = Interval::from_int(2).powi(100, 64);
        assert!(p.contains(&Dyadic::pow2(100)));
        let s = Interval::from_int(2).pow(&Interval::from_rational(&rat(1, 2), 64), 64);
        assert!(within(&s, "1.414213562373095", "1.414213562373096"));
    }

    #[test]
    fn decimal_round_trip_encloses() {
        let x = Interval::from_rational(&rat(2, 7), 100);
        let d = x.to_decimal();
        let back = d.to_interval(100).unwrap();
        assert!(back.contains_interval(&x));
    }
}
