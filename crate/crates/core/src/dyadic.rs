//! Binary floating point numbers with arbitrary precision mantissa.
//!
//! A [`Dyadic`] is an exact rational of the form `m * 2^e`. Addition,
//! subtraction and multiplication are exact; everything that can lose
//! information (division, square roots, rounding to a working precision)
//! takes an explicit [`Round`] direction so that interval endpoints are
//! always rounded outward.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// Exact value `mant * 2^exp`, normalized so the mantissa is odd (or zero
/// with exponent zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_div(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

fn ceil_div(num: &BigInt, den: &BigInt) -> BigInt {
    -((-num).div_floor(den))
}

fn shift_right(m: &BigInt, bits: u64, dir: Round) -> BigInt {
    match dir {
        Round::Down => floor_div(m, &(BigInt::one() << bits)),
        Round::Up => ceil_div(m, &(BigInt::one() << bits)),
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite float {v}");
        if v == 0.0 {
            return Dyadic::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = (bits & 0x000f_ffff_ffff_ffff) as i64;
        let (mant, exp) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1i64 << 52), exponent - 1075)
        };
        Dyadic::new(BigInt::from(sign * mant), exp)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Position of the leading bit: `2^(mag-1) <= |x| < 2^mag`.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (lo, hi) = if self.exp <= other.exp { (self, other) } else { (other, self) };
        let shift = (hi.exp - lo.exp) as usize;
        Dyadic::new(&lo.mant + (&hi.mant << shift), lo.exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        Dyadic::new(shift_right(&self.mant, shift, dir), self.exp + shift as i64)
    }

    /// Round to a multiple of `2^-frac_bits`.
    pub fn round_abs(&self, frac_bits: i64, dir: Round) -> Dyadic {
        if self.exp >= -frac_bits {
            return self.clone();
        }
        let shift = (-frac_bits - self.exp) as u64;
        Dyadic::new(shift_right(&self.mant, shift, dir), -frac_bits)
    }

    /// Quotient rounded to `prec` significant bits.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + other.bits() as i64 + 2 - self.bits() as i64;
        let s = want.max(0) as usize;
        let num = &self.mant << s;
        let q = match dir {
            Round::Down => floor_div(&num, &other.mant),
            Round::Up => ceil_div(&num, &other.mant),
        };
        Dyadic::new(q, self.exp - s as i64 - other.exp).round(prec, dir)
    }

    /// Square root of a non-negative value, rounded to `prec` bits.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(!self.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut s = (2 * prec as i64 + 4 - self.bits() as i64).max(0);
        if (self.exp - s) % 2 != 0 {
            s += 1;
        }
        let n: BigInt = &self.mant << (s as usize);
        let mut r = n.sqrt();
        if dir == Round::Up && &r * &r != n {
            r += 1;
        }
        Dyadic::new(r, (self.exp - s) / 2).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as usize)
        } else {
            shift_right(&self.mant, (-self.exp) as u64, Round::Down)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as usize)
        } else {
            shift_right(&self.mant, (-self.exp) as u64, Round::Up)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as usize))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// Directed rounding of a rational to `prec` bits.
    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Dyadic {
        let num = Dyadic::from_bigint(r.numer().clone());
        let den = Dyadic::from_bigint(r.denom().clone());
        num.div(&den, prec, dir)
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn try_from_rational(r: &BigRational) -> Option<Dyadic> {
        let den = r.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz as usize).is_one() {
            Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 60 {
            let shift = bits - 60;
            ((&self.mant >> shift as usize).to_f64().unwrap_or(0.0), self.exp + shift)
        } else {
            (self.mant.to_f64().unwrap_or(0.0), self.exp)
        };
        let e = e.clamp(-2200, 2200) as i32;
        let half = e / 2;
        m * 2f64.powi(half) * 2f64.powi(e - half)
    }

    pub fn min_ref<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max_ref<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Scientific decimal notation with `digits` significant digits, rounded
    /// in the given direction so the string is a valid one-sided bound.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1) as i64;
        // log10|v| estimate from the binary magnitude.
        let mut k = ((self.magnitude() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let p = digits - 1 - k;
            let n = self.scaled_by_pow10(p, dir);
            let len = n.abs().to_string().len() as i64;
            if len > digits {
                k += 1;
                continue;
            }
            if len < digits && !n.is_zero() {
                // The estimate overshot; one more digit fits.
                let n2 = self.scaled_by_pow10(p + 1, dir);
                if n2.abs().to_string().len() as i64 == digits {
                    return format_sci(&n2, k - 1, digits);
                }
            }
            return format_sci(&n, k, digits);
        }
    }

    fn scaled_by_pow10(&self, p: i64, dir: Round) -> BigInt {
        let ten = BigInt::from(10);
        let (mut num, mut den) = (self.mant.clone(), BigInt::one());
        if p >= 0 {
            num *= num_traits::pow(ten, p as usize);
        } else {
            den *= num_traits::pow(ten, (-p) as usize);
        }
        if self.exp >= 0 {
            num <<= self.exp as usize;
        } else {
            den <<= (-self.exp) as usize;
        }
        match dir {
            Round::Down => floor_div(&num, &den),
            Round::Up => ceil_div(&num, &den),
        }
    }

    /// Parse a decimal string (plain or scientific) into a rational.
    pub fn parse_decimal(s: &str) -> Option<BigRational> {
        let s = s.trim();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let e = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        Some(if e >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-e) as usize))
        })
    }
}

fn format_sci(n: &BigInt, k: i64, digits: i64) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    let s = n.abs().to_string();
    debug_assert!(s.len() as i64 <= digits);
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        format!("{sign}{head}e{k}")
    } else {
        format!("{sign}{head}.{tail}e{k}")
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (a, b) if a != b => {
                let rank = |s: Sign| match s {
                    Sign::Minus => 0,
                    Sign::NoSign => 1,
                    Sign::Plus => 2,
                };
                rank(a).cmp(&rank(b))
            }
            (Sign::NoSign, _) => Ordering::Equal,
            _ => {
                let e = self.exp.min(other.exp);
                let a = &self.mant << (self.exp - e) as usize;
                let b = &other.mant << (other.exp - e) as usize;
                a.cmp(&b)
            }
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20, Round::Down))
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::from_bigint(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_canonical() {
        let a = Dyadic::new(BigInt::from(12), 0);
        let b = Dyadic::new(BigInt::from(3), 2);
        assert_eq!(a, b);
        assert_eq!(Dyadic::new(BigInt::zero(), 17), Dyadic::zero());
    }

    #[test]
    fn rounding_is_directed_for_negative_values() {
        let x = Dyadic::from_rational(&BigRational::new((-1).into(), 3.into()), 10, Round::Down);
        let y = Dyadic::from_rational(&BigRational::new((-1).into(), 3.into()), 10, Round::Up);
        let third = BigRational::new((-1).into(), 3.into());
        assert!(x.to_rational() < third);
        assert!(y.to_rational() > third);
        let r = Dyadic::from_int(-7).round(2, Round::Down);
        assert_eq!(r, Dyadic::from_int(-8));
        let r = Dyadic::from_int(-7).round(2, Round::Up);
        assert_eq!(r, Dyadic::from_int(-6));
    }

    #[test]
    fn sqrt_brackets_two() {
        let two = Dyadic::from_int(2);
        let lo = two.sqrt(100, Round::Down);
        let hi = two.sqrt(100, Round::Up);
        assert!(lo.mul(&lo) <= two);
        assert!(hi.mul(&hi) >= two);
        assert!(hi.sub(&lo) <= Dyadic::pow2(-98));
    }

    #[test]
    fn decimal_bounds_bracket_value() {
        let third = BigRational::new(1.into(), 3.into());
        let d = Dyadic::from_rational(&third, 200, Round::Down);
        let lo = d.to_decimal(10, Round::Down);
        let hi = d.to_decimal(10, Round::Up);
        assert_eq!(lo, "3.333333333e-1");
        assert_eq!(hi, "3.333333334e-1");
        assert_eq!(Dyadic::from_int(1000).to_decimal(5, Round::Down), "1e3");
        assert_eq!(Dyadic::from_int(-1234).to_decimal(2, Round::Down), "-1.3e3");
        let back = Dyadic::parse_decimal(&hi).unwrap();
        assert!(back > third);
    }

    #[test]
    fn float_conversion_round_trips() {
        for v in [0.5, -3.25, 1e-300, 123456.789] {
            assert_eq!(Dyadic::from_f64(v).to_f64(), v);
        }
    }
}
