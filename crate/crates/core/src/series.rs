//! Interval evaluation of `Σ (a(n)+b(n)) q^-n` and exact base-`t` digit
//! streams of `Σ f(m) t^-g(m)`.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::sequence::CoefficientSequence;
use crate::sieve::{self, ArithFunction, ArithTable};
use crate::{Error, Result};

/// Enclosure of the principal value of `Σ_{n>=1} (a(n)+b(n)) q^-n`.
pub fn evaluate_series(a: &CoefficientSequence, b: &CoefficientSequence, precision: u32) -> Result<Interval> {
    if a.field() != b.field() {
        return Err(Error::InvalidInput("sequences live in different fields".into()));
    }
    let work = precision + 8;
    let rho = a.rho(work)?;
    let sa = a.xi_tail(1, work)?;
    let sb = if b.is_empty() && b.is_finite() { Interval::zero() } else { b.xi_tail(1, work)? };
    Ok(sa.add(&sb).mul_r(&rho, work).round(precision + 4))
}

/// Weight `f(m)` of a digit stream.
#[derive(Clone, Copy, Debug)]
pub enum DigitWeight<'a> {
    Constant(u64),
    Table(&'a ArithTable),
}

/// Exponent `g(m)` of a digit stream.
#[derive(Clone, Copy, Debug)]
pub enum DigitExponent<'a> {
    /// `g(m) = m^k`
    Power(u32),
    Table(&'a ArithTable),
}

/// Base-`t` digits at positions `1..=P` with carry bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitStream {
    pub base: u64,
    /// `digits[p-1]` is the digit at position `p`.
    pub digits: Vec<u64>,
    /// Integer part produced by carries out of position 1.
    pub carry_overflow: u128,
    /// Number of positions that received a non-zero carry.
    pub carry_count: u64,
    /// Digits at positions `<= reliable_limit` are those of the full series.
    pub reliable_limit: u64,
    pub nonzero_positions: Vec<u64>,
}

impl DigitStream {
    pub fn len(&self) -> u64 {
        self.digits.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, p: u64) -> u64 {
        self.digits[(p - 1) as usize]
    }

    /// Non-zero positions below `x`.
    pub fn count_below(&self, x: u64) -> u64 {
        self.nonzero_positions.partition_point(|&p| p < x) as u64
    }

    /// Run-length text export: header, then one `pos:digit` line per non-zero digit.
    pub fn write_rle<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sparse-series-digits/1")?;
        writeln!(w, "t={}", self.base)?;
        writeln!(w, "P={}", self.digits.len())?;
        writeln!(w, "reliable_limit={}", self.reliable_limit)?;
        writeln!(w, "carry_overflow={}", self.carry_overflow)?;
        writeln!(w, "carry_count={}", self.carry_count)?;
        for &p in &self.nonzero_positions {
            writeln!(w, "{}:{}", p, self.digit(p))?;
        }
        Ok(())
    }
}

/// Bounds `W(n) <= k n^e` on the weight landing at position `n`.
fn position_weight_bound(f: DigitWeight<'_>, g: DigitExponent<'_>) -> (f64, i32) {
    // preimages of n under σ or φ are below 6n^2; table weights satisfy f(m) <= m^2
    match (f, g) {
        (DigitWeight::Constant(c), DigitExponent::Power(_)) => (c as f64, 0),
        (DigitWeight::Table(_), DigitExponent::Power(_)) => (1.0, 2),
        (DigitWeight::Constant(c), DigitExponent::Table(_)) => (6.0 * c as f64, 2),
        (DigitWeight::Table(_), DigitExponent::Table(_)) => (216.0, 6),
    }
}

/// Exact digits of `Σ_m f(m) t^-g(m)` at positions `1..=P`; positions past
/// the reliable limit may still change under carries from the discarded tail.
pub fn digit_stream(f: DigitWeight<'_>, g: DigitExponent<'_>, t: u64, p: u64) -> Result<DigitStream> {
    if t < 2 {
        return Err(Error::InvalidInput(format!("digit base must be at least 2, got {t}")));
    }
    if p == 0 {
        return Err(Error::InvalidInput("digit stream needs P >= 1".into()));
    }
    let weight = |m: u64| -> Result<u64> {
        match f {
            DigitWeight::Constant(c) => Ok(c),
            DigitWeight::Table(tab) => tab.get(m),
        }
    };
    let mut counts = vec![0u128; p as usize + 1];
    match g {
        DigitExponent::Power(k) => {
            if k == 0 {
                return Err(Error::InvalidInput("exponent power must be positive".into()));
            }
            let mut m: u64 = 1;
            loop {
                let pos = match m.checked_pow(k) {
                    Some(v) if v <= p => v,
                    _ => break,
                };
                if let DigitWeight::Table(tab) = f {
                    if m >= tab.horizon() {
                        return Err(Error::HorizonInsufficient { required: m + 1, available: tab.horizon() });
                    }
                }
                counts[pos as usize] += weight(m)? as u128;
                m += 1;
            }
        }
        DigitExponent::Table(gt) => {
            let required = sieve::required_horizon(gt.function(), p + 1)?;
            if !matches!(gt.function(), ArithFunction::Sigma | ArithFunction::Phi) {
                return Err(Error::InvalidInput(format!("{} has infinite fibres", gt.function())));
            }
            if gt.horizon() < required {
                return Err(Error::HorizonInsufficient { required, available: gt.horizon() });
            }
            if let DigitWeight::Table(tab) = f {
                if tab.horizon() < gt.horizon() {
                    return Err(Error::HorizonInsufficient { required: gt.horizon(), available: tab.horizon() });
                }
            }
            for m in 1..gt.horizon() {
                let pos = gt.values()[m as usize];
                if pos <= p {
                    counts[pos as usize] += weight(m)? as u128;
                }
            }
        }
    }
    // positional carries from the last position upward
    let t128 = t as u128;
    let mut digits = vec![0u64; p as usize];
    let mut carry: u128 = 0;
    let mut carry_count = 0u64;
    for pos in (1..=p as usize).rev() {
        if carry != 0 {
            carry_count += 1;
        }
        let v = counts[pos]
            .checked_add(carry)
            .ok_or_else(|| Error::OverflowPolicy("digit accumulator exceeds 128 bits".into()))?;
        digits[pos - 1] = (v % t128) as u64;
        carry = v / t128;
    }
    let reliable_limit = reliable_limit(&digits, t, position_weight_bound(f, g));
    let nonzero_positions = digits.iter().enumerate().filter(|(_, &d)| d != 0).map(|(i, _)| i as u64 + 1).collect();
    Ok(DigitStream { base: t, digits, carry_overflow: carry, carry_count, reliable_limit, nonzero_positions })
}

/// Largest `p` such that the discarded tail `T <= Σ_{n>P} k n^e t^-n` cannot
/// carry into position `p`: with `G_p = t^(P-p) - D_p` (digits after `p`),
/// position `p` is stable when `G_p > t^P T`.
fn reliable_limit(digits: &[u64], t: u64, (k, e): (f64, i32)) -> u64 {
    let p = digits.len() as f64;
    let tf = t as f64;
    let ratio = ((p + 2.0) / (p + 1.0)).powi(e) / tf;
    if ratio >= 1.0 {
        return 0;
    }
    // β = t^P T <= k (P+1)^e t^-1 / (1 - ratio), with slack for rounding
    let beta = k * (p + 1.0).powi(e) / tf / (1.0 - ratio) * (1.0 + 1e-9);
    if k == 0.0 {
        return digits.len() as u64;
    }
    let mut g = 1.0f64;
    let mut scale = 1.0f64;
    for pos in (1..=digits.len()).rev() {
        if g > beta {
            return pos as u64;
        }
        // G_{pos-1} = (t - d_pos - 1) t^(P-pos) + G_pos
        g += (tf - digits[pos - 1] as f64 - 1.0) * scale;
        scale *= tf;
        if !scale.is_finite() {
            scale = f64::MAX;
        }
    }
    0
}

/// One checkpoint of the non-zero digit count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub x: u64,
    pub count: u64,
    /// `count · (ln x / x)^(1/ℓ)`
    pub normalized: f64,
}

/// Powers of ten up to `limit`.
pub fn decade_checkpoints(limit: u64) -> Vec<u64> {
    std::iter::successors(Some(10u64), |x| x.checked_mul(10)).take_while(|&x| x <= limit).collect()
}

/// Cumulative counts of non-zero digits below each checkpoint, normalised for
/// comparison with `x^(1/ℓ) / (log x)^(1/ℓ)`.
pub fn nonzero_digit_density(stream: &DigitStream, ell: u32, checkpoints: &[u64]) -> Vec<DensityRow> {
    let ell = ell.max(1) as f64;
    checkpoints
        .iter()
        .map(|&x| {
            let count = stream.count_below(x);
            let xf = x as f64;
            let normalized = if x > 1 { count as f64 * ((xf.ln() / xf).powf(1.0 / ell)) } else { 0.0 };
            DensityRow { x, count, normalized }
        })
        .collect()
}

/// Oracle-friendly exact value of the truncated stream as a big rational.
pub fn stream_numerator(stream: &DigitStream) -> BigUint {
    let t = BigUint::from(stream.base);
    let mut acc = BigUint::from(stream.carry_overflow);
    for &d in &stream.digits {
        acc = acc * &t + BigUint::from(d);
    }
    acc
}

/// `Σ_{m<x} f(m)` for weights given by a constant or table.
pub fn weight_sum(f: DigitWeight<'_>, x: u64) -> Result<u128> {
    match f {
        DigitWeight::Constant(c) => Ok(c as u128 * x.saturating_sub(1) as u128),
        DigitWeight::Table(_) if x < 2 => Ok(0),
        DigitWeight::Table(t) => t.summatory(1, x - 1).map(|v| v.to_u128().unwrap_or(u128::MAX)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::field::{build_field, rational_field, FieldOptions};
    use crate::poly::MonicIntPolynomial;
    use crate::sequence::{power_support, SupportSet};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use std::sync::Arc;

    #[test]
    fn zero_series() {
        let f = Arc::new(rational_field(2).unwrap());
        let z = CoefficientSequence::zero(f, 10);
        assert!(evaluate_series(&z, &z, 64).unwrap().is_zero());
    }

    #[test]
    fn cube_series_base_two() {
        let f = Arc::new(rational_field(2).unwrap());
        let s = power_support(&BigRational::from_integer(3.into()), 1000).unwrap();
        let a = CoefficientSequence::indicator(f.clone(), &s, true).unwrap();
        let v = evaluate_series(&a, &CoefficientSequence::zero(f, 1000), 200).unwrap();
        let partial = [1u32, 8, 27, 64, 125]
            .iter()
            .fold(BigRational::zero(), |acc, &k| acc + BigRational::new(BigInt::one(), BigInt::one() << k));
        assert!(v.contains_rational(&partial) || v.lo().to_rational() > partial);
        assert!(v.width_at_most_pow2(200));
        assert!(v.lo().to_rational() < partial.clone() + BigRational::new(BigInt::one(), BigInt::one() << 215));
        assert_eq!(v.mid().to_decimal(12, crate::dyadic::Round::Down), "5.0390625745e-1");
    }

    #[test]
    fn silver_ratio_reciprocal() {
        let p = MonicIntPolynomial::from_i64(&[-1, -2, 1]).unwrap();
        let f = Arc::new(build_field(p, FieldOptions::default()).unwrap());
        let a = CoefficientSequence::indicator(f.clone(), &SupportSet::new(vec![1], 2, "one"), false).unwrap();
        let v = evaluate_series(&a, &CoefficientSequence::zero(f, 2), 120).unwrap();
        // √2 − 1 = 0.41421356237309504880168872...
        let lo = Dyadic::parse_decimal("0.414213562373095048801688").unwrap();
        let hi = Dyadic::parse_decimal("0.414213562373095048801689").unwrap();
        assert!(v.lo().to_rational() > lo && v.hi().to_rational() < hi);
        assert!(v.width_at_most_pow2(120));
    }

    #[test]
    fn cube_digits() {
        let s = digit_stream(DigitWeight::Constant(1), DigitExponent::Power(3), 2, 100).unwrap();
        assert_eq!(s.nonzero_positions, vec![1, 8, 27, 64]);
        assert_eq!(s.carry_count, 0);
        assert_eq!(s.carry_overflow, 0);
        assert!(s.reliable_limit >= 97);
    }

    #[test]
    fn repeating_twos() {
        let s = digit_stream(DigitWeight::Constant(2), DigitExponent::Power(1), 10, 3).unwrap();
        assert_eq!(s.digits, vec![2, 2, 2]);
        assert_eq!(s.reliable_limit, 3);
    }

    #[test]
    fn totient_digits_match_rational_oracle() {
        let p = 64u64;
        let phi = sieve::sieve(ArithFunction::Phi, sieve::required_horizon(ArithFunction::Phi, p + 1).unwrap()).unwrap();
        let s = digit_stream(DigitWeight::Constant(1), DigitExponent::Table(&phi), 2, p).unwrap();
        // brute-force exact rational accumulation over all m with φ(m) <= P
        let mut v = BigRational::zero();
        for m in 1..phi.horizon() {
            let e = phi.values()[m as usize];
            if e <= p {
                v += BigRational::new(BigInt::one(), BigInt::one() << e as usize);
            }
        }
        let scaled = (v * BigRational::from_integer(BigInt::one() << p as usize)).to_integer();
        assert_eq!(BigInt::from(stream_numerator(&s)), scaled);
        assert!(s.reliable_limit > 0 && s.reliable_limit < p);
        assert!(s.carry_count > 0);
    }

    #[test]
    fn density_rows() {
        let cubes = digit_stream(DigitWeight::Constant(1), DigitExponent::Power(3), 2, 10_000).unwrap();
        let rows = nonzero_digit_density(&cubes, 3, &decade_checkpoints(10_000));
        assert_eq!(rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![2, 4, 9, 21]);
        let ones = digit_stream(DigitWeight::Constant(1), DigitExponent::Power(1), 2, 1000).unwrap();
        let rows = nonzero_digit_density(&ones, 1, &[10, 100]);
        assert_eq!(rows[1].count, 99);
        let empty = digit_stream(DigitWeight::Constant(0), DigitExponent::Power(1), 2, 50).unwrap();
        assert!(nonzero_digit_density(&empty, 2, &[10, 50]).iter().all(|r| r.count == 0));
    }

    #[test]
    fn rle_export() {
        let s = digit_stream(DigitWeight::Constant(1), DigitExponent::Power(2), 3, 10).unwrap();
        let mut out = Vec::new();
        s.write_rle(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("sparse-series-digits/1\nt=3\nP=10\n"));
        assert!(text.ends_with("1:1\n4:1\n9:1\n"));
    }
}
