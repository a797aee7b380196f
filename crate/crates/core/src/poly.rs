//! Monic integer polynomials: parsing, exact root counting, resultants and
//! irreducibility screening.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::ComplexInterval;
use crate::interval::Interval;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicIntPolynomial {
    coeffs: Vec<BigInt>,
}

impl MonicIntPolynomial {
    /// Builds from coefficients `c_0..c_d`, lowest degree first.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(Error::InvalidInput(format!(
                "polynomial must be monic, leading coefficient is {}",
                coeffs.last().unwrap()
            )));
        }
        Ok(MonicIntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Accepts `"c0,c1,...,cd"` or an expression such as `"x^2-2*x-1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.contains('x') || t.contains('X') {
            Self::new(parse_expression(t)?)
        } else {
            let coeffs = t
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {:?}", s.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            Self::new(coeffs)
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        horner(&self.coeffs, x)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval, prec: u32) -> Interval {
        eval_interval(&self.coeffs, x, prec)
    }

    pub fn eval_complex(&self, z: &ComplexInterval, prec: u32) -> ComplexInterval {
        eval_complex(&self.coeffs, z, prec)
    }

    pub fn derivative(&self) -> Vec<BigInt> {
        derivative(&self.coeffs)
    }

    /// `c_i = c_{d-i}` for all `i`.
    pub fn is_self_reciprocal(&self) -> bool {
        let d = self.degree();
        (0..=d).all(|i| self.coeffs[i] == self.coeffs[d - i])
    }

    /// For a self-reciprocal polynomial of even degree `2m`, the polynomial
    /// `T` of degree `m` with `P(x) = x^m T(x + 1/x)`.
    pub fn trace_polynomial(&self) -> Option<Vec<BigInt>> {
        let d = self.degree();
        if !d.is_multiple_of(2) || !self.is_self_reciprocal() {
            return None;
        }
        let m = d / 2;
        // V_k(y) = x^k + x^-k as a polynomial in y = x + 1/x
        let mut v_prev: Vec<BigInt> = vec![BigInt::from(2)];
        let mut v_cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
        let mut t: Vec<BigInt> = vec![BigInt::zero(); m + 1];
        t[0] += &self.coeffs[m];
        for k in 1..=m {
            let c = &self.coeffs[m + k];
            for (i, v) in v_cur.iter().enumerate() {
                t[i] += c * v;
            }
            let mut next = vec![BigInt::zero(); v_cur.len() + 1];
            for (i, v) in v_cur.iter().enumerate() {
                next[i + 1] += v;
            }
            for (i, v) in v_prev.iter().enumerate() {
                next[i] -= v;
            }
            v_prev = std::mem::replace(&mut v_cur, next);
        }
        Some(t)
    }

    pub fn to_expression(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let show_coef = !mag.is_one() || i == 0;
            if show_coef {
                out.push_str(&mag.to_string());
                if i > 0 {
                    out.push('*');
                }
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => out.push_str(&format!("x^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for MonicIntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expression())
    }
}

fn parse_expression(text: &str) -> Result<Vec<BigInt>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let bad = |msg: &str| Error::Parse(format!("{msg} in {text:?}"));
    let mut terms: Vec<(BigInt, usize)> = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err(bad("expected + or -"));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef = if i > start {
            s[start..i].parse::<BigInt>().map_err(|_| bad("bad number"))?
        } else {
            BigInt::one()
        };
        let had_digits = i > start;
        if i < bytes.len() && bytes[i] == b'*' {
            if !had_digits {
                return Err(bad("dangling *"));
            }
            i += 1;
            if i >= bytes.len() || bytes[i] != b'x' {
                return Err(bad("expected x after *"));
            }
        }
        let mut power = 0usize;
        if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            power = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let ps = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ps == i {
                    return Err(bad("missing exponent"));
                }
                power = s[ps..i].parse::<usize>().map_err(|_| bad("bad exponent"))?;
                if power > 10_000 {
                    return Err(bad("exponent too large"));
                }
            }
        } else if !had_digits {
            return Err(bad("empty term"));
        }
        terms.push((sign * coef, power));
    }
    let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    for (c, p) in terms {
        coeffs[p] += c;
    }
    Ok(coeffs)
}

pub(crate) fn horner(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn derivative(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

pub(crate) fn eval_interval(coeffs: &[BigInt], x: &Interval, prec: u32) -> Interval {
    let mut acc = Interval::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul_r(x, prec).add(&Interval::from_bigint(c));
    }
    acc
}

pub(crate) fn eval_complex(coeffs: &[BigInt], z: &ComplexInterval, prec: u32) -> ComplexInterval {
    let mut acc = ComplexInterval::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(z, prec).add_real(&Interval::from_bigint(c));
    }
    acc
}

fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn to_rational(p: &[BigInt]) -> Vec<BigRational> {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &factor * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Endpoint of a root-counting range.
#[derive(Clone, Debug)]
pub enum Bound {
    NegInf,
    PosInf,
    At(BigRational),
}

/// Sturm sequence of a squarefree-or-not integer polynomial.
pub struct Sturm {
    seq: Vec<Vec<BigRational>>,
}

impl Sturm {
    pub fn new(p: &[BigInt]) -> Self {
        let mut p0 = to_rational(p);
        trim(&mut p0);
        let mut p1 = to_rational(&derivative(p));
        trim(&mut p1);
        let mut seq = vec![p0];
        if !p1.is_empty() {
            seq.push(p1);
        }
        loop {
            let n = seq.len();
            if n < 2 {
                break;
            }
            let mut r = rat_rem(&seq[n - 2], &seq[n - 1]);
            if r.is_empty() {
                break;
            }
            for c in r.iter_mut() {
                *c = -c.clone();
            }
            seq.push(r);
        }
        Sturm { seq }
    }

    fn sign_at(p: &[BigRational], b: &Bound) -> i32 {
        let s = match b {
            Bound::PosInf => p.last().map(signum).unwrap_or(0),
            Bound::NegInf => {
                let lead = p.last().map(signum).unwrap_or(0);
                if (p.len() - 1).is_multiple_of(2) {
                    lead
                } else {
                    -lead
                }
            }
            Bound::At(x) => {
                let mut acc = BigRational::zero();
                for c in p.iter().rev() {
                    acc = acc * x + c;
                }
                signum(&acc)
            }
        };
        s
    }

    fn variations(&self, b: &Bound) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.seq {
            let s = Self::sign_at(p, b);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }

    pub fn count_all(&self) -> usize {
        self.count(&Bound::NegInf, &Bound::PosInf)
    }
}

fn signum(c: &BigRational) -> i32 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn count_real_roots(p: &[BigInt], lo: &Bound, hi: &Bound) -> usize {
    Sturm::new(p).count(lo, hi)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant `Res(f, g)` via the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let mut f = f.to_vec();
    let mut g = g.to_vec();
    trim(&mut f);
    trim(&mut g);
    if f.is_empty() || g.is_empty() {
        return BigInt::zero();
    }
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// Outcome of the irreducibility screen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Certified(String),
    Reducible(String),
    Unconfirmed,
}

const CONSTANT_TERM_LIMIT: u128 = 1 << 64;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let v = n
        .to_u128()
        .filter(|&v| v < CONSTANT_TERM_LIMIT)
        .ok_or_else(|| Error::InvalidInput("constant term too large for the rational-root test".into()))?;
    let mut out = Vec::new();
    let mut d: u128 = 1;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Integer roots of a monic polynomial (its only possible rational roots).
pub fn integer_roots(p: &MonicIntPolynomial) -> Result<Vec<BigInt>> {
    let c0 = &p.coeffs()[0];
    if c0.is_zero() {
        return Ok(vec![BigInt::zero()]);
    }
    let mut roots = Vec::new();
    for d in divisors(c0)? {
        for r in [d.clone(), -d] {
            if p.eval_int(&r).is_zero() {
                roots.push(r);
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Exact search for a factorisation into two monic integer quadratics.
fn quartic_quadratic_factor(p: &MonicIntPolynomial) -> Result<Option<(Vec<BigInt>, Vec<BigInt>)>> {
    let c = p.coeffs();
    let (c0, c1, c2, c3) = (&c[0], &c[1], &c[2], &c[3]);
    for d in divisors(c0)? {
        for b in [d.clone(), -d] {
            let e = c0 / &b;
            // a + c = c3, a c = c2 - b - e
            let prod = c2 - &b - &e;
            let disc: BigInt = c3 * c3 - BigInt::from(4) * &prod;
            if disc.is_negative() {
                continue;
            }
            let s = disc.sqrt();
            if &s * &s != disc {
                continue;
            }
            let two = BigInt::from(2);
            for root in [&s, &-s.clone()] {
                let num: BigInt = c3 + root;
                if !num.is_even() {
                    continue;
                }
                let a = num / &two;
                let cc = c3 - &a;
                if &a * &e + &b * &cc == *c1 {
                    return Ok(Some((vec![b.clone(), a, BigInt::one()], vec![e.clone(), cc, BigInt::one()])));
                }
            }
        }
    }
    Ok(None)
}

/// Rational-root test plus exact factoring up to degree 4; above that a
/// modular degree sieve that may certify but never refutes.
pub fn irreducibility_screen(p: &MonicIntPolynomial) -> Result<Irreducibility> {
    let d = p.degree();
    if d == 1 {
        return Ok(Irreducibility::Certified("linear".into()));
    }
    let roots = integer_roots(p)?;
    if let Some(r) = roots.first() {
        return Ok(Irreducibility::Reducible(format!("rational root {r}")));
    }
    if d <= 3 {
        return Ok(Irreducibility::Certified("no rational root".into()));
    }
    if d == 4 {
        return Ok(match quartic_quadratic_factor(p)? {
            Some((f, g)) => Irreducibility::Reducible(format!(
                "factors as ({}) * ({})",
                MonicIntPolynomial::new(f).unwrap(),
                MonicIntPolynomial::new(g).unwrap()
            )),
            None => Irreducibility::Certified("no rational root and no quadratic factor".into()),
        });
    }
    Ok(match degree_sieve(p.coeffs()) {
        Some(last) => Irreducibility::Certified(format!("modular factor degrees incompatible up to prime {last}")),
        None => Irreducibility::Unconfirmed,
    })
}

const SMALL_PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

type Fp = Vec<u64>;

fn fp_trim(a: &mut Fp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &Fp, f: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    fp_trim(&mut r);
    let df = f.len() - 1;
    let inv = fp_inv(*f.last().unwrap(), p);
    while r.len() > df {
        let shift = r.len() - 1 - df;
        let factor = r.last().unwrap() * inv % p;
        for (i, c) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - factor * c % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &Fp, b: &Fp, f: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&out, f, p)
}

fn fp_pow(base: &Fp, mut e: u64, f: &Fp, p: u64) -> Fp {
    let mut result = vec![1u64];
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = fp_mulmod(&result, &b, f, p);
        }
        e >>= 1;
        if e > 0 {
            b = fp_mulmod(&b, &b, f, p);
        }
    }
    result
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut a = a.clone();
    let mut b = b.clone();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_sub_x(a: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    if r.len() < 2 {
        r.resize(2, 0);
    }
    r[1] = (r[1] + p - 1) % p;
    fp_trim(&mut r);
    r
}

fn fp_divrem(a: &Fp, f: &Fp, p: u64) -> (Fp, Fp) {
    let mut r = a.clone();
    fp_trim(&mut r);
    let df = f.len() - 1;
    if r.len() <= df {
        return (Vec::new(), r);
    }
    let inv = fp_inv(*f.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - df];
    while r.len() > df {
        let shift = r.len() - 1 - df;
        let factor = r.last().unwrap() * inv % p;
        q[shift] = factor;
        for (i, c) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - factor * c % p) % p;
        }
        fp_trim(&mut r);
    }
    (q, r)
}

fn fp_derivative(f: &Fp, p: u64) -> Fp {
    let mut d: Fp = f.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect();
    fp_trim(&mut d);
    d
}

/// Degrees of the irreducible factors of `coeffs` modulo `p` by distinct
/// degree factorisation, or `None` when the reduction is not squarefree.
fn factor_degrees_mod_p(coeffs: &[BigInt], p: u64) -> Option<Vec<usize>> {
    let big_p = BigInt::from(p);
    let mut f: Fp = coeffs.iter().map(|c| c.mod_floor(&big_p).to_u64().unwrap()).collect();
    fp_trim(&mut f);
    if fp_gcd(&f, &fp_derivative(&f, p), p).len() != 1 {
        return None;
    }
    let mut degrees = Vec::new();
    let mut h: Fp = fp_rem(&vec![0, 1], &f, p);
    let mut k = 1;
    while f.len() > 2 * k {
        h = fp_pow(&h, p, &f, p);
        let g = fp_gcd(&fp_sub_x(&h, p), &f, p);
        let dg = g.len() - 1;
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(k, dg / k));
            f = fp_divrem(&f, &g, p).0;
            h = fp_rem(&h, &f, p);
        }
        k += 1;
    }
    if f.len() > 1 {
        degrees.push(f.len() - 1);
    }
    Some(degrees)
}

/// Degree-set sieve: a factor over the integers would reduce to a product of
/// modular factors, so its degree must be a subset sum of the factor degrees
/// modulo every good prime. Certifies irreducibility when only `0` and `n`
/// survive.
fn degree_sieve(coeffs: &[BigInt]) -> Option<u64> {
    let n = coeffs.len() - 1;
    let mut possible = vec![true; n + 1];
    for p in SMALL_PRIMES {
        let Some(degrees) = factor_degrees_mod_p(coeffs, p) else { continue };
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for d in degrees {
            for s in (d..=n).rev() {
                if sums[s - d] {
                    sums[s] = true;
                }
            }
        }
        for (k, ok) in possible.iter_mut().enumerate() {
            *ok &= sums[k];
        }
        if (1..n).all(|k| !possible[k]) {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPolynomial {
        MonicIntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn parses_both_formats() {
        let a = MonicIntPolynomial::parse("x^2-2x-1").unwrap();
        let b = MonicIntPolynomial::parse("x^2 - 2*x - 1").unwrap();
        let c = MonicIntPolynomial::parse("-1,-2,1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_expression(), "x^2-2*x-1");
        assert_eq!(MonicIntPolynomial::parse("x-2").unwrap().coeffs(), &[BigInt::from(-2), BigInt::one()]);
        assert!(MonicIntPolynomial::parse("2x^2+1").is_err());
        assert!(MonicIntPolynomial::parse("5").is_err());
        assert!(MonicIntPolynomial::parse("x^").is_err());
        assert!(MonicIntPolynomial::parse("x**2").is_err());
    }

    #[test]
    fn sturm_counts_match_known_roots() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = [6, -7, 0, 1].map(BigInt::from);
        let s = Sturm::new(&p);
        assert_eq!(s.count_all(), 3);
        let half = |n: i64| Bound::At(BigRational::new(n.into(), 2.into()));
        assert_eq!(s.count(&half(1), &Bound::PosInf), 2);
        assert_eq!(s.count(&Bound::NegInf, &half(0)), 1);
        // x^2 + 1
        assert_eq!(count_real_roots(&[1, 0, 1].map(BigInt::from), &Bound::NegInf, &Bound::PosInf), 0);
    }

    #[test]
    fn resultant_gives_norms() {
        // Res(x^2-2x-1, x) = product of roots = -1
        let f = [-1, -2, 1].map(BigInt::from);
        assert_eq!(resultant(&f, &[0, 1].map(BigInt::from)), BigInt::from(-1));
        // constant polynomial 3 -> 3^2
        assert_eq!(resultant(&f, &[BigInt::from(3)]), BigInt::from(9));
        // norm of 1 + q in Q(1+sqrt2): (2+sqrt2)(2-sqrt2) = 2
        assert_eq!(resultant(&f, &[1, 1].map(BigInt::from)), BigInt::from(2));
    }

    #[test]
    fn trace_polynomial_of_lehmer() {
        let lehmer = poly(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let t = lehmer.trace_polynomial().unwrap();
        // T(y) = y^5 + y^4 - 5y^3 - 5y^2 + 4y + 3
        assert_eq!(t, [3, 4, -5, -5, 1, 1].map(BigInt::from).to_vec());
        assert!(poly(&[-1, -2, 1]).trace_polynomial().is_none());
    }

    #[test]
    fn screen_detects_factors() {
        assert!(matches!(irreducibility_screen(&poly(&[-2, 0, 1])).unwrap(), Irreducibility::Certified(_)));
        assert!(matches!(irreducibility_screen(&poly(&[-4, 0, 1])).unwrap(), Irreducibility::Reducible(_)));
        // x^4 + 1 is irreducible over Q but reducible modulo every prime
        assert!(matches!(irreducibility_screen(&poly(&[1, 0, 0, 0, 1])).unwrap(), Irreducibility::Certified(_)));
        // (x^2+1)(x^2+x+2)
        assert!(matches!(
            irreducibility_screen(&poly(&[2, 1, 3, 1, 1])).unwrap(),
            Irreducibility::Reducible(_)
        ));
        let lehmer = poly(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!(matches!(irreducibility_screen(&lehmer).unwrap(), Irreducibility::Certified(_)));
        // (x^3 - x - 1)^2 is reducible modulo every prime, so it stays unconfirmed
        let sq = poly(&[1, 2, 1, -2, -2, 0, 1]);
        assert_eq!(irreducibility_screen(&sq).unwrap(), Irreducibility::Unconfirmed);
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = vec![
            vec![2, -1, 3].into_iter().map(BigInt::from).collect(),
            vec![0, 4, 1].into_iter().map(BigInt::from).collect(),
            vec![5, 2, -2].into_iter().map(BigInt::from).collect::<Vec<_>>(),
        ];
        // 2(4*-2 - 1*2) - (-1)(0*-2 - 1*5) + 3(0*2 - 4*5) = -20 - 5 - 60
        assert_eq!(bareiss_det(m), BigInt::from(-85));
    }
}
