//! Linear sieve for σ, φ, d, ω, Ω, summatory functions and value sets.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::interval::Interval;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithFunction {
    Sigma,
    Phi,
    DivisorCount,
    OmegaDistinct,
    OmegaWithMultiplicity,
}

impl ArithFunction {
    pub const ALL: [ArithFunction; 5] = [
        ArithFunction::Sigma,
        ArithFunction::Phi,
        ArithFunction::DivisorCount,
        ArithFunction::OmegaDistinct,
        ArithFunction::OmegaWithMultiplicity,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn from_id(id: u32) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ArithFunction::Sigma => "sigma",
            ArithFunction::Phi => "phi",
            ArithFunction::DivisorCount => "divisor_count",
            ArithFunction::OmegaDistinct => "omega_distinct",
            ArithFunction::OmegaWithMultiplicity => "omega_with_multiplicity",
        }
    }
}

impl fmt::Display for ArithFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArithFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sigma" => ArithFunction::Sigma,
            "phi" => ArithFunction::Phi,
            "divisor_count" | "d" | "tau" => ArithFunction::DivisorCount,
            "omega_distinct" | "omega" => ArithFunction::OmegaDistinct,
            "omega_with_multiplicity" | "Omega" | "bigomega" => ArithFunction::OmegaWithMultiplicity,
            _ => return Err(Error::InvalidInput(format!("unknown arithmetic function {s:?}"))),
        })
    }
}

/// Default largest horizon accepted by [`sieve`]: 2^28 values.
pub const DEFAULT_MAX_HORIZON: u64 = 1 << 28;

/// Exact values `f(n)` for `1 <= n < horizon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithTable {
    function: ArithFunction,
    horizon: u64,
    values: Vec<u64>,
}

pub fn sieve(function: ArithFunction, horizon: u64) -> Result<ArithTable> {
    sieve_with_limit(function, horizon, DEFAULT_MAX_HORIZON)
}

pub fn sieve_with_limit(function: ArithFunction, horizon: u64, limit: u64) -> Result<ArithTable> {
    if horizon < 2 {
        return Err(Error::InvalidInput(format!("sieve horizon must be at least 2, got {horizon}")));
    }
    if horizon > limit || horizon > u32::MAX as u64 {
        return Err(Error::HorizonTooLarge { requested: horizon, limit: limit.min(u32::MAX as u64) });
    }
    let n = horizon as usize;
    // smallest prime factor and the full power of it dividing each n
    let mut spf = vec![0u32; n];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip >= n {
                break;
            }
            spf[ip] = p;
        }
    }
    let mut values = vec![0u64; n];
    let mut ppow = vec![0u32; n];
    if n > 1 {
        values[1] = match function {
            ArithFunction::OmegaDistinct | ArithFunction::OmegaWithMultiplicity => 0,
            _ => 1,
        };
    }
    for i in 2..n {
        let p = spf[i] as usize;
        let m = i / p;
        ppow[i] = if m > 1 && spf[m] as usize == p { ppow[m] * p as u32 } else { p as u32 };
        let pk = ppow[i] as usize;
        let rest = i / pk;
        values[i] = if rest == 1 {
            // prime power p^e
            match function {
                ArithFunction::Sigma => {
                    if m == 1 {
                        p as u64 + 1
                    } else {
                        values[m] * p as u64 + 1
                    }
                }
                ArithFunction::Phi => {
                    if m == 1 {
                        p as u64 - 1
                    } else {
                        values[m] * p as u64
                    }
                }
                ArithFunction::DivisorCount => {
                    if m == 1 {
                        2
                    } else {
                        values[m] + 1
                    }
                }
                ArithFunction::OmegaDistinct => 1,
                ArithFunction::OmegaWithMultiplicity => {
                    if m == 1 {
                        1
                    } else {
                        values[m] + 1
                    }
                }
            }
        } else {
            match function {
                ArithFunction::OmegaDistinct => values[rest] + 1,
                ArithFunction::OmegaWithMultiplicity => values[rest] + values[pk],
                _ => values[rest] * values[pk],
            }
        };
    }
    Ok(ArithTable { function, horizon, values })
}

/// Distinct values below a bound, with a capped witness list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSet {
    pub x: u64,
    pub count: u64,
    pub witnesses: Vec<u64>,
    pub truncated: bool,
}

/// Cap on the number of witnesses returned by [`ArithTable::value_set_count`].
pub const WITNESS_CAP: usize = 1_000_000;

/// The φ preimage policy: every `m` with `φ(m) < x` satisfies
/// `m < 4 x max(log log x, 1)`.
pub fn phi_preimage_horizon(x: u64) -> u64 {
    let xf = x.max(3) as f64;
    let ll = xf.ln().ln().max(1.0);
    (4.0 * x as f64 * ll).ceil() as u64 + 1
}

/// Horizon a table must reach so that all preimages of values `< x` are in it.
pub fn required_horizon(function: ArithFunction, x: u64) -> Result<u64> {
    match function {
        ArithFunction::Sigma => Ok(x.max(2)),
        ArithFunction::Phi => Ok(phi_preimage_horizon(x)),
        other => Err(Error::InvalidInput(format!(
            "value sets are supported for sigma and phi only, not {other}"
        ))),
    }
}

/// Minimum of `φ(n) log log n / n` over `3 <= n < x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiLowerBound {
    pub min: Interval,
    pub argmin: u64,
}

impl ArithTable {
    pub fn function(&self) -> ArithFunction {
        self.function
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// `values()[n] = f(n)`; index 0 is unused.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Result<u64> {
        if n == 0 || n >= self.horizon {
            return Err(Error::OutOfHorizon { x: n, horizon: self.horizon });
        }
        Ok(self.values[n as usize])
    }

    /// Exact `Σ_{n<=x} f(n)^k`.
    pub fn summatory(&self, k: u32, x: u64) -> Result<BigUint> {
        if x >= self.horizon {
            return Err(Error::OutOfHorizon { x, horizon: self.horizon });
        }
        let mut acc: u128 = 0;
        let mut big: Option<BigUint> = None;
        for &v in &self.values[1..=x as usize] {
            let term = (v as u128).checked_pow(k);
            match (&mut big, term.and_then(|t| acc.checked_add(t))) {
                (None, Some(s)) => acc = s,
                (None, None) => {
                    big = Some(BigUint::from(acc) + num_traits::pow(BigUint::from(v), k as usize));
                }
                (Some(b), _) => *b += num_traits::pow(BigUint::from(v), k as usize),
            }
        }
        Ok(big.unwrap_or_else(|| BigUint::from(acc)))
    }

    /// Exact `#(S_f ∩ [1, x))` where `S_f` is the value set of `f`.
    pub fn value_set_count(&self, x: u64) -> Result<ValueSet> {
        let required = required_horizon(self.function, x)?;
        if self.horizon < required {
            return Err(Error::HorizonInsufficient { required, available: self.horizon });
        }
        if self.function == ArithFunction::Phi {
            // top-decile verification of the preimage policy
            let start = (self.horizon - self.horizon / 10).max(1);
            if let Some(m) = (start..self.horizon).find(|&m| self.values[m as usize] < x) {
                return Err(Error::HorizonInsufficient { required: required.max(2 * m), available: self.horizon });
            }
        }
        let mut seen = vec![false; x as usize];
        let mut count = 0u64;
        let scan_end = match self.function {
            ArithFunction::Sigma => x.min(self.horizon),
            _ => self.horizon,
        };
        for &v in &self.values[1..scan_end as usize] {
            if v < x && !seen[v as usize] {
                seen[v as usize] = true;
                count += 1;
            }
        }
        let witnesses: Vec<u64> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(v, _)| v as u64)
            .take(WITNESS_CAP)
            .collect();
        Ok(ValueSet { x, count, truncated: (witnesses.len() as u64) < count, witnesses })
    }

    /// Minimum of `φ(n) log log n / n` over `3 <= n < x` with a certified
    /// enclosure at the minimiser.
    pub fn phi_lower_bound_check(&self, x: u64) -> Result<PhiLowerBound> {
        if self.function != ArithFunction::Phi {
            return Err(Error::InvalidInput("phi_lower_bound_check needs a phi table".into()));
        }
        if x < 10 {
            return Err(Error::InvalidInput(format!("x must be at least 10, got {x}")));
        }
        if x > self.horizon {
            return Err(Error::OutOfHorizon { x, horizon: self.horizon });
        }
        let approx = |n: u64| self.values[n as usize] as f64 * (n as f64).ln().ln() / n as f64;
        let best = (3..x).map(approx).fold(f64::INFINITY, f64::min);
        // certify every candidate within float slack of the approximate minimum
        let slack = best.abs() * 1e-9 + 1e-12;
        let mut result: Option<PhiLowerBound> = None;
        for n in (3..x).filter(|&n| approx(n) <= best + slack) {
            let v = Interval::from_int(n as i64).ln(96).ln(96);
            let r = v
                .scale(&Dyadic::from_int(self.values[n as usize] as i64))
                .div(&Interval::from_int(n as i64), 96);
            let better = match &result {
                None => true,
                Some(cur) => r.certainly_lt(&cur.min),
            };
            if better {
                result = Some(PhiLowerBound { min: r, argmin: n });
            }
        }
        Ok(result.expect("non-empty range"))
    }

    /// Binary image: magic `ASF1`, function id (u32 LE), horizon (u64 LE),
    /// then `f(1), ..., f(horizon-1)` as u64 LE.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"ASF1")?;
        w.write_all(&self.function.id().to_le_bytes())?;
        w.write_all(&self.horizon.to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values[1..] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<ArithTable> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != b"ASF1" {
            return Err(Error::Parse("bad table magic".into()));
        }
        let id = u32::from_le_bytes(header[4..8].try_into().unwrap());
        let function = ArithFunction::from_id(id).ok_or_else(|| Error::Parse(format!("unknown function id {id}")))?;
        let horizon = u64::from_le_bytes(header[8..16].try_into().unwrap());
        if horizon < 2 {
            return Err(Error::Parse("table horizon below 2".into()));
        }
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        if data.len() as u64 != 8 * (horizon - 1) {
            return Err(Error::Parse("table length does not match its horizon".into()));
        }
        let mut values = Vec::with_capacity(horizon as usize);
        values.push(0);
        values.extend(data.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())));
        Ok(ArithTable { function, horizon, values })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut out = String::from("n,value\n");
        for (n, v) in self.values.iter().enumerate().skip(1) {
            out.push_str(&format!("{n},{v}\n"));
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn brute(function: ArithFunction, n: u64) -> u64 {
        let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
        let mut m = n;
        let mut primes = Vec::new();
        let mut p = 2;
        while m > 1 {
            while m.is_multiple_of(p) {
                primes.push(p);
                m /= p;
            }
            p += 1;
        }
        let mut distinct = primes.clone();
        distinct.dedup();
        match function {
            ArithFunction::Sigma => divisors.iter().sum(),
            ArithFunction::Phi => (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64,
            ArithFunction::DivisorCount => divisors.len() as u64,
            ArithFunction::OmegaDistinct => distinct.len() as u64,
            ArithFunction::OmegaWithMultiplicity => primes.len() as u64,
        }
    }

    #[test]
    fn matches_brute_force() {
        for f in ArithFunction::ALL {
            let t = sieve(f, 400).unwrap();
            for n in 1..400 {
                assert_eq!(t.get(n).unwrap(), brute(f, n), "{f} at {n}");
            }
        }
        let phi = sieve(ArithFunction::Phi, 11).unwrap();
        assert_eq!(&phi.values()[1..], &[1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        assert_eq!(sieve(ArithFunction::Sigma, 7).unwrap().get(6).unwrap(), 12);
        assert_eq!(sieve(ArithFunction::DivisorCount, 13).unwrap().get(12).unwrap(), 6);
    }

    #[test]
    fn summatory_values() {
        let d = sieve(ArithFunction::DivisorCount, 101).unwrap();
        assert_eq!(d.summatory(1, 1).unwrap(), BigUint::from(1u32));
        let oracle: u64 = (1..=100).map(|n| brute(ArithFunction::DivisorCount, n)).sum();
        assert_eq!(d.summatory(1, 100).unwrap(), BigUint::from(oracle));
        assert!(matches!(d.summatory(1, 101), Err(Error::OutOfHorizon { .. })));
        let phi = sieve(ArithFunction::Phi, 11).unwrap();
        assert_eq!(phi.summatory(1, 10).unwrap(), BigUint::from(32u32));
        // overflow of u128 switches to big integers
        let s = sieve(ArithFunction::Sigma, 50).unwrap();
        let exact: BigUint = (1..50u64).map(|n| num_traits::pow(BigUint::from(brute(ArithFunction::Sigma, n)), 30)).sum();
        assert_eq!(s.summatory(30, 49).unwrap(), exact);
    }

    #[test]
    fn value_sets() {
        let phi = sieve(ArithFunction::Phi, phi_preimage_horizon(10)).unwrap();
        let vs = phi.value_set_count(10).unwrap();
        assert_eq!(vs.count, 5);
        assert_eq!(vs.witnesses, vec![1, 2, 4, 6, 8]);
        let sigma = sieve(ArithFunction::Sigma, 11).unwrap();
        assert_eq!(sigma.value_set_count(2).unwrap().witnesses, vec![1]);
        let mut oracle: Vec<u64> = (1..=10).map(|m| brute(ArithFunction::Sigma, m)).filter(|&v| v < 10).collect();
        oracle.sort();
        oracle.dedup();
        assert_eq!(sigma.value_set_count(10).unwrap().witnesses, oracle);
        let small = sieve(ArithFunction::Phi, 20).unwrap();
        assert!(matches!(small.value_set_count(10), Err(Error::HorizonInsufficient { required: 41, .. })));
    }

    #[test]
    fn phi_minimum_small_range() {
        let phi = sieve(ArithFunction::Phi, 100).unwrap();
        let r = phi.phi_lower_bound_check(10).unwrap();
        let oracle = (3..10u64)
            .map(|n| brute(ArithFunction::Phi, n) as f64 * (n as f64).ln().ln() / n as f64)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.argmin, 3);
        assert!((r.min.mid_f64() - oracle).abs() < 1e-12);
        let wider = phi.phi_lower_bound_check(100).unwrap();
        assert!(!wider.min.certainly_gt(&r.min));
    }

    #[test]
    fn binary_and_csv_round_trip() {
        let t = sieve(ArithFunction::Sigma, 30).unwrap();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * 29);
        assert_eq!(ArithTable::read_binary(&buf[..]).unwrap(), t);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("n,value\n1,1\n2,3\n"));
    }
}
