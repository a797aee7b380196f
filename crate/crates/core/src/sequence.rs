//! Coefficient sequences over `Z[q]`, their support sets, tail majorants and
//! the finite statistics `#N(x)`, `S(x)`, `R(q, x, z)` and `ξ_N`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dyadic::{Dyadic, Round};
use crate::field::{AlgebraicField, FieldElement};
use crate::interval::Interval;
use crate::sieve::{self, ArithFunction, ArithTable};
use crate::{Error, Result};

/// Working precision used by statistics that take no explicit precision.
pub const STATS_PRECISION: u32 = 128;

/// Bound on coefficients from the horizon on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Every coefficient at index `>= horizon` is zero.
    Vanishing,
    /// `house(c(n)) <= m r^n` for every `n >= 1`.
    Geometric { m: BigRational, r: BigRational },
}

impl Tail {
    pub fn geometric(m: impl Into<BigRational>, r: impl Into<BigRational>) -> Tail {
        Tail::Geometric { m: m.into(), r: r.into() }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Tail::Vanishing => json!({"kind": "vanishing"}),
            Tail::Geometric { m, r } => json!({"kind": "geometric", "m": m.to_string(), "r": r.to_string()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Tail> {
        let bad = || Error::Parse(format!("bad tail majorant {v}"));
        match v.get("kind").and_then(Value::as_str) {
            Some("vanishing") => Ok(Tail::Vanishing),
            Some("geometric") => {
                let m = parse_rational(v.get("m").and_then(Value::as_str).ok_or_else(bad)?)?;
                let r = parse_rational(v.get("r").and_then(Value::as_str).ok_or_else(bad)?)?;
                Ok(Tail::Geometric { m, r })
            }
            _ => Err(bad()),
        }
    }
}

/// Parses `"p"`, `"p/q"` or a decimal such as `"1.5"` or `"1e3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    Dyadic::parse_decimal(s).ok_or_else(|| Error::Parse(format!("bad number {s:?}")))
}

/// Sorted set of non-negative integers below a horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    elements: Vec<u64>,
    horizon: u64,
    generator: String,
}

impl SupportSet {
    pub fn new(mut elements: Vec<u64>, horizon: u64, generator: impl Into<String>) -> Self {
        elements.retain(|&e| e < horizon);
        elements.sort_unstable();
        elements.dedup();
        SupportSet { elements, horizon, generator: generator.into() }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    /// Number of elements below `x`.
    pub fn count_below(&self, x: u64) -> usize {
        self.elements.partition_point(|&e| e < x)
    }

    /// The same set with 0 added.
    pub fn with_zero(&self) -> SupportSet {
        let mut e = self.elements.clone();
        e.push(0);
        SupportSet::new(e, self.horizon, format!("{}+{{0}}", self.generator))
    }
}

/// `{⌊n^α⌋ : n >= 1} ∩ [1, H)` for rational `α > 1`, computed with exact
/// integer roots.
pub fn power_support(alpha: &BigRational, horizon: u64) -> Result<SupportSet> {
    if alpha <= &BigRational::one() {
        return Err(Error::InvalidInput(format!("exponent must exceed 1, got {alpha}")));
    }
    let p = alpha.numer().to_u32().ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
    let q = alpha.denom().to_u32().ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
    let mut out = Vec::new();
    let mut n: u64 = 1;
    loop {
        let v = num_traits::pow(BigInt::from(n), p as usize).nth_root(q);
        match v.to_u64() {
            Some(v) if v < horizon => out.push(v),
            _ => break,
        }
        n += 1;
    }
    Ok(SupportSet::new(out, horizon, format!("power:{alpha}")))
}

/// `{a + b} ∩ [1, H)`; both sets must be non-empty.
pub fn sumset(a: &SupportSet, b: &SupportSet, horizon: u64) -> Result<SupportSet> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("sumset needs two non-empty sets".into()));
    }
    let mut hit = vec![false; horizon as usize];
    for &x in a.elements() {
        if x >= horizon {
            break;
        }
        for &y in b.elements() {
            let s = x + y;
            if s >= horizon {
                break;
            }
            hit[s as usize] = true;
        }
    }
    let elements = (1..horizon).filter(|&s| hit[s as usize]).collect();
    Ok(SupportSet::new(elements, horizon, format!("sumset({},{})", a.generator(), b.generator())))
}

/// A finite-horizon coefficient table plus a tail bound.
#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    field: Arc<AlgebraicField>,
    horizon: u64,
    coefs: BTreeMap<u64, FieldElement>,
    tail: Tail,
    generator: String,
    obligations: Vec<String>,
}

/// Finite statistics of a sequence at one parameter triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailStats {
    pub x: BigRational,
    pub z: BigRational,
    pub eta: BigRational,
    pub n_count: u64,
    pub s_value: Interval,
    pub r_value: Interval,
}

/// Weight of a fibre sequence `a(n) = Σ_{g(m)=n} f(m)`.
#[derive(Clone, Copy, Debug)]
pub enum FiberWeight<'a> {
    Constant(u64),
    Table(&'a ArithTable),
}

/// Smallest integer `>= x` for a rational `x >= 0`.
pub fn ceil_u64(x: &BigRational) -> u64 {
    if x.is_negative() {
        return 0;
    }
    x.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

impl CoefficientSequence {
    /// Validates sparsity, indices and the majorant on stored coefficients.
    pub fn new(
        field: Arc<AlgebraicField>,
        horizon: u64,
        coefs: BTreeMap<u64, FieldElement>,
        tail: Tail,
        generator: impl Into<String>,
    ) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidInput("horizon must be positive".into()));
        }
        let mut coefs = coefs;
        coefs.retain(|_, c| !c.is_zero());
        if let Some((&n, _)) = coefs.iter().next() {
            if n == 0 {
                return Err(Error::InvalidInput("coefficient indices start at 1".into()));
            }
        }
        if let Some((&n, _)) = coefs.iter().next_back() {
            if n >= horizon {
                return Err(Error::InvalidInput(format!("coefficient index {n} not below horizon {horizon}")));
            }
        }
        for c in coefs.values() {
            if c.coords().len() != field.degree() {
                return Err(Error::InvalidInput("coefficient does not belong to the field".into()));
            }
        }
        if let Tail::Geometric { m, r } = &tail {
            if m.is_negative() || r < &BigRational::one() {
                return Err(Error::InvalidInput(format!("majorant needs M >= 0 and r >= 1, got ({m}, {r})")));
            }
            let mr = Interval::from_rational(m, 64);
            let rr = Interval::from_rational(r, 64);
            for (&n, c) in &coefs {
                let h = field.house(c, 32)?;
                let bound = mr.mul(&rr.powi(n, 64));
                if !(h.lo() <= bound.hi()) {
                    return Err(Error::InvalidInput(format!(
                        "coefficient at {n} violates the tail majorant ({m}, {r})"
                    )));
                }
            }
        }
        Ok(CoefficientSequence { field, horizon, coefs, tail, generator: generator.into(), obligations: Vec::new() })
    }

    pub fn zero(field: Arc<AlgebraicField>, horizon: u64) -> Self {
        CoefficientSequence {
            field,
            horizon,
            coefs: BTreeMap::new(),
            tail: Tail::Vanishing,
            generator: "zero".into(),
            obligations: Vec::new(),
        }
    }

    /// Indicator of a support set. With `continues` the generator is taken
    /// to go on beyond the horizon and the tail is `(1, 1)`; otherwise the
    /// support is finite and the tail vanishes.
    pub fn indicator(field: Arc<AlgebraicField>, support: &SupportSet, continues: bool) -> Result<Self> {
        let one = field.one();
        let coefs = support.elements().iter().filter(|&&n| n > 0).map(|&n| (n, one.clone())).collect();
        let tail = if continues { Tail::geometric(BigInt::one(), BigInt::one()) } else { Tail::Vanishing };
        CoefficientSequence::new(field, support.horizon(), coefs, tail, format!("indicator:{}", support.generator()))
    }

    /// `c(n) = 1` for every `n >= 1`.
    pub fn ones(field: Arc<AlgebraicField>, horizon: u64) -> Result<Self> {
        let support = SupportSet::new((1..horizon).collect(), horizon, "all");
        let mut s = CoefficientSequence::indicator(field, &support, true)?;
        s.generator = "ones".into();
        Ok(s)
    }

    pub fn with_obligation(mut self, note: impl Into<String>) -> Self {
        self.obligations.push(note.into());
        self
    }

    pub fn field(&self) -> &Arc<AlgebraicField> {
        &self.field
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn obligations(&self) -> &[String] {
        &self.obligations
    }

    pub fn coefs(&self) -> &BTreeMap<u64, FieldElement> {
        &self.coefs
    }

    pub fn get(&self, n: u64) -> Option<&FieldElement> {
        self.coefs.get(&n)
    }

    /// Support below the horizon.
    pub fn support(&self) -> SupportSet {
        SupportSet::new(self.coefs.keys().copied().collect(), self.horizon, self.generator.clone())
    }

    pub fn support_count_below(&self, x: u64) -> u64 {
        self.coefs.range(..x).count() as u64
    }

    /// Whether the support provably stops below the horizon.
    pub fn is_finite(&self) -> bool {
        self.tail == Tail::Vanishing
    }

    /// Every stored coefficient is a non-negative rational integer.
    pub fn is_nonnegative_integer(&self) -> bool {
        self.coefs.values().all(FieldElement::is_nonnegative_integer)
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.is_empty()
    }

    /// Sum of two sequences over the same field; horizons are truncated to
    /// the smaller one unless the shorter sequence vanishes beyond it.
    pub fn add(&self, other: &CoefficientSequence) -> Result<CoefficientSequence> {
        if self.field != other.field {
            return Err(Error::InvalidInput("sequences live in different fields".into()));
        }
        let horizon = match (&self.tail, &other.tail) {
            (Tail::Vanishing, _) if self.horizon <= other.horizon => other.horizon,
            (_, Tail::Vanishing) if other.horizon <= self.horizon => self.horizon,
            _ => self.horizon.min(other.horizon),
        };
        let mut coefs: BTreeMap<u64, FieldElement> = BTreeMap::new();
        for s in [self, other] {
            for (&n, c) in s.coefs.range(..horizon) {
                let e = coefs.entry(n).or_insert_with(|| self.field.zero());
                *e = self.field.add(e, c);
            }
        }
        let tail = match (&self.tail, &other.tail) {
            (Tail::Vanishing, Tail::Vanishing) => Tail::Vanishing,
            (Tail::Vanishing, t) | (t, Tail::Vanishing) => {
                // the vanishing part contributes nothing beyond its horizon,
                // which is at most the common horizon here
                t.clone()
            }
            (Tail::Geometric { m: m1, r: r1 }, Tail::Geometric { m: m2, r: r2 }) => {
                Tail::Geometric { m: m1 + m2, r: r1.max(r2).clone() }
            }
        };
        let tail = match (&self.tail, &other.tail, &tail) {
            // a vanishing summand still needs its stored part covered by a geometric bound
            (Tail::Vanishing, Tail::Geometric { .. }, Tail::Geometric { m, r })
            | (Tail::Geometric { .. }, Tail::Vanishing, Tail::Geometric { m, r }) => {
                let van = if self.tail == Tail::Vanishing { self } else { other };
                let max = van.max_integer_house()?;
                Tail::Geometric { m: m + BigRational::from_integer(max), r: r.clone() }
            }
            _ => tail,
        };
        let mut out = CoefficientSequence::new(
            self.field.clone(),
            horizon,
            coefs,
            tail,
            format!("{}+{}", self.generator, other.generator),
        )?;
        out.obligations = self.obligations.iter().chain(&other.obligations).cloned().collect();
        Ok(out)
    }

    fn max_integer_house(&self) -> Result<BigInt> {
        let mut best = BigInt::zero();
        for c in self.coefs.values() {
            let h = match c.as_integer() {
                Some(v) => v.abs(),
                None => self.field.house(c, 16)?.hi().ceil(),
            };
            if h > best {
                best = h;
            }
        }
        Ok(best)
    }

    /// `ρ = 1/q` at `prec` bits.
    pub fn rho(&self, prec: u32) -> Result<Interval> {
        rho(&self.field, prec)
    }

    /// Enclosure of the principal value of `c(n)`, or `|c(n)|` with `abs`.
    fn coef_value(&self, c: &FieldElement, prec: u32, abs: bool) -> Result<Interval> {
        let v = self.field.principal_value(c, prec)?;
        Ok(if abs { v.abs() } else { v })
    }

    /// Bound `B` with `Σ_{k>=start} |c(k)| ρ^(k-base) <= B`, using the tail
    /// majorant beyond the horizon and on stored terms from `start` on.
    fn tail_bound(&self, start: u64, base: u64, rho: &Interval, prec: u32) -> Result<Dyadic> {
        let ratio_pow = |e: u64| rho.powi(e, prec);
        match &self.tail {
            Tail::Vanishing => {
                if start >= self.horizon || self.coefs.range(start..).next().is_none() {
                    return Ok(Dyadic::zero());
                }
                // max stored coefficient times a geometric series
                let mut maxc = Dyadic::zero();
                for c in self.coefs.range(start..).map(|(_, c)| c) {
                    let h = self.field.house(c, 16)?.hi().clone();
                    if h > maxc {
                        maxc = h;
                    }
                }
                let one = Interval::one();
                let geo = one.div(&one.sub(rho), prec);
                Ok(ratio_pow(start - base).mul(&geo).hi().mul(&maxc).round(prec, Round::Up))
            }
            Tail::Geometric { m, r } => {
                let rr = Interval::from_rational(r, prec + 16);
                let rrho = rr.mul_r(rho, prec);
                if !rrho.certainly_lt(&Interval::one()) {
                    let q = self.field.q_interval(prec)?;
                    return Err(Error::MajorantTooWeak { r: r.to_string(), q: q.mid().to_decimal(12, Round::Down) });
                }
                // Σ_{k>=s} M r^k ρ^(k-base) = M r^s ρ^(s-base) / (1 - r ρ)
                let mr = Interval::from_rational(m, prec + 16);
                let head = mr.mul_r(&rr.powi(start, prec), prec).mul_r(&ratio_pow(start - base), prec);
                let denom = Interval::one().sub(&rrho);
                Ok(head.div(&denom, prec).hi().clone())
            }
        }
    }

    /// Enclosure of `Σ_{j>=0} c(N+j) ρ^j`, or of `Σ |c(N+j)| ρ^j` with `abs`.
    pub fn weighted_tail(&self, n: u64, prec: u32, abs: bool) -> Result<Interval> {
        let work = prec + 24;
        let rho = self.rho(work)?;
        let cutoff = Dyadic::pow2(-(prec as i64) - 8);
        let mut sum = Interval::zero();
        let mut last = n;
        let mut power = Interval::one();
        let mut stop = self.horizon.max(n);
        for (&k, c) in self.coefs.range(n..) {
            power = power.mul_r(&rho.powi(k - last, work), work);
            last = k;
            if power.hi() < &cutoff {
                // remaining stored terms and the tail go into the bound
                let h = self.field.house(c, 16)?.hi().clone();
                if power.hi().mul(&h.add(&Dyadic::one())) < cutoff {
                    stop = k;
                    break;
                }
            }
            let v = self.coef_value(c, work, abs)?;
            sum = sum.add(&v.mul_r(&power, work));
        }
        let bound = if stop < self.horizon.max(n) {
            self.tail_bound(stop, n, &rho, work)?
        } else {
            self.tail_bound(self.horizon.max(n), n, &rho, work)?
        };
        let lo_extra = if abs { Dyadic::zero() } else { bound.neg() };
        Ok(sum.add(&Interval::new(lo_extra, bound)).round(prec + 8))
    }

    /// `ξ_N` of the sequence.
    pub fn xi_tail(&self, n: u64, prec: u32) -> Result<Interval> {
        self.weighted_tail(n, prec, false)
    }

    /// `ξ_N(|c|)`.
    pub fn xi_tail_abs(&self, n: u64, prec: u32) -> Result<Interval> {
        self.weighted_tail(n, prec, true)
    }

    /// `ξ_N` for every `N` in `[lo, hi]` through `ξ_N = c(N) + ρ ξ_{N+1}`.
    pub fn xi_range(&self, lo: u64, hi: u64, prec: u32, abs: bool) -> Result<Vec<Interval>> {
        assert!(lo <= hi);
        let work = prec + 16;
        let rho = self.rho(work)?;
        let mut out = vec![Interval::zero(); (hi - lo + 1) as usize];
        let mut cur = self.weighted_tail(hi, work, abs)?;
        out[(hi - lo) as usize] = cur.round(prec + 8);
        for n in (lo..hi).rev() {
            cur = rho.mul_r(&cur, work);
            if let Some(c) = self.coefs.get(&n) {
                cur = cur.add(&self.coef_value(c, work, abs)?).round(work);
            }
            out[(n - lo) as usize] = cur.round(prec + 8);
        }
        Ok(out)
    }

    /// `Σ_{n<x} house(c(n))`.
    pub fn s_value(&self, x: u64, prec: u32) -> Result<Interval> {
        let mut s = Interval::zero();
        for c in self.coefs.range(..x).map(|(_, c)| c) {
            s = s.add(&self.field.house(c, prec)?);
        }
        Ok(s)
    }

    /// `Σ_{1<=n<nx} Σ_{j>=z} |c(n+j)| ρ^j` for integer bounds `nx` (exclusive) and `z`.
    pub fn r_value(&self, n_end: u64, z: u64, prec: u32) -> Result<Interval> {
        if n_end <= 1 {
            return Ok(Interval::zero());
        }
        let work = prec + 16;
        let rho = self.rho(work)?;
        // R = ρ^z Σ_{n=1}^{n_end-1} ξ_{n+z}(|c|)
        let xs = self.xi_range(1 + z, n_end - 1 + z, work, true)?;
        let mut total = Interval::zero();
        for x in xs {
            total = total.add(&x).round(work + 16);
        }
        Ok(total.mul_r(&rho.powi(z, work), work).round(prec + 8))
    }

    /// `R` split at `j = x - N`: `R1` sums `z <= j < x - N`, `R2` sums
    /// `j >= max(z, x - N)`, both over `1 <= N < n_end`.
    pub fn r_split(&self, n_end: u64, x: u64, z: u64, prec: u32) -> Result<(Interval, Interval)> {
        let work = prec + 16;
        let rho = self.rho(work)?;
        let mut r1 = Interval::zero();
        let mut r2 = Interval::zero();
        for n in 1..n_end {
            let split = x.saturating_sub(n).max(z);
            // R2 part: ρ^split ξ_{n+split}
            let t2 = self.xi_tail_abs(n + split, work)?.mul_r(&rho.powi(split, work), work);
            r2 = r2.add(&t2);
            // R1 part: finite sum over stored coefficients with z <= j < split
            for (&k, c) in self.coefs.range(n + z..n + split) {
                let v = self.coef_value(c, work, true)?;
                r1 = r1.add(&v.mul_r(&rho.powi(k - n, work), work));
            }
            if split > z && n + split > self.horizon && self.tail != Tail::Vanishing {
                // part of the R1 window lies beyond the horizon
                let b = self.tail_bound(self.horizon.max(n + z), n, &rho, work)?;
                r1 = r1.add(&Interval::new(Dyadic::zero(), b));
            }
        }
        Ok((r1.round(prec + 8), r2.round(prec + 8)))
    }

    /// Statistics `#N(x)`, `S(x)` and `R(q, ηx, z)`.
    pub fn stats(&self, x: &BigRational, z: &BigRational, eta: &BigRational) -> Result<TailStats> {
        if x.is_negative() || z.is_negative() || !eta.is_positive() || eta > &BigRational::one() {
            return Err(Error::InvalidInput("need x >= 0, z >= 0 and 0 < η <= 1".into()));
        }
        let xc = ceil_u64(x);
        if xc > self.horizon && !self.is_finite() {
            return Err(Error::HorizonInsufficient { required: xc, available: self.horizon });
        }
        let n_count = self.support_count_below(xc);
        let s_value = self.s_value(xc, STATS_PRECISION)?;
        let r_value = self.r_value(ceil_u64(&(eta * x)), ceil_u64(z), STATS_PRECISION)?;
        Ok(TailStats { x: x.clone(), z: z.clone(), eta: eta.clone(), n_count, s_value, r_value })
    }

    /// JSON lines: a header record followed by `{"n", "coords"}` records.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let header = json!({
            "format": "sparse-series-seq/1",
            "minpoly": self.field.minpoly().coeffs().iter().map(big_to_json).collect::<Vec<_>>(),
            "horizon": self.horizon,
            "majorant": self.tail.to_json(),
            "generator": self.generator,
            "obligations": self.obligations,
        });
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for (n, c) in &self.coefs {
            let rec = json!({"n": n, "coords": c.coords().iter().map(big_to_json).collect::<Vec<_>>()});
            writeln!(w, "{}", serde_json::to_string(&rec)?)?;
        }
        Ok(())
    }

    /// Reads the header's minimal polynomial without building a field.
    pub fn read_jsonl_minpoly(text: &str) -> Result<Vec<BigInt>> {
        let first = text.lines().next().ok_or_else(|| Error::Parse("empty sequence file".into()))?;
        let header: Value = serde_json::from_str(first)?;
        header
            .get("minpoly")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("header lacks minpoly".into()))?
            .iter()
            .map(json_to_big)
            .collect()
    }

    pub fn read_jsonl<R: BufRead>(reader: R, field: Arc<AlgebraicField>) -> Result<Self> {
        let mut lines = reader.lines();
        let first = lines.next().ok_or_else(|| Error::Parse("empty sequence file".into()))??;
        let header: Value = serde_json::from_str(&first)?;
        let minpoly: Vec<BigInt> = header
            .get("minpoly")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("header lacks minpoly".into()))?
            .iter()
            .map(json_to_big)
            .collect::<Result<_>>()?;
        if minpoly.as_slice() != field.minpoly().coeffs() {
            return Err(Error::InvalidInput("sequence file belongs to a different field".into()));
        }
        let horizon = header
            .get("horizon")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("header lacks horizon".into()))?;
        let tail = Tail::from_json(header.get("majorant").unwrap_or(&Value::Null))?;
        let generator = header.get("generator").and_then(Value::as_str).unwrap_or("file").to_string();
        let obligations: Vec<String> = header
            .get("obligations")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
            .unwrap_or_default();
        let mut coefs = BTreeMap::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Value = serde_json::from_str(&line)?;
            let n = rec.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("bad record {line}")))?;
            let coords = rec
                .get("coords")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("bad record {line}")))?
                .iter()
                .map(json_to_big)
                .collect::<Result<Vec<_>>>()?;
            coefs.insert(n, field.element(coords)?);
        }
        let mut s = CoefficientSequence::new(field, horizon, coefs, tail, generator)?;
        s.obligations = obligations;
        Ok(s)
    }
}

fn big_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(v.to_string()),
    }
}

fn json_to_big(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(u) = v.as_u64() {
        return Ok(BigInt::from(u));
    }
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad integer {v}")))
}

/// `1/q` at `prec` bits.
pub fn rho(field: &AlgebraicField, prec: u32) -> Result<Interval> {
    if let Some(t) = field.rational_base() {
        return Ok(Interval::from_rational(&BigRational::new(BigInt::one(), t), prec));
    }
    Ok(field.q_interval(prec + 16)?.recip(prec))
}

/// Fibre sequence `a(n) = Σ_{m : g(m) = n} f(m)` for `1 <= n < H`.
pub fn fiber_sequence(
    field: Arc<AlgebraicField>,
    weight: FiberWeight<'_>,
    g: &ArithTable,
    horizon: u64,
) -> Result<CoefficientSequence> {
    let required = sieve::required_horizon(g.function(), horizon)?;
    if g.horizon() < required {
        return Err(Error::HorizonInsufficient { required, available: g.horizon() });
    }
    if let FiberWeight::Table(f) = weight {
        if f.horizon() < g.horizon() {
            return Err(Error::HorizonInsufficient { required: g.horizon(), available: f.horizon() });
        }
    }
    let mut acc = vec![0u64; horizon as usize];
    let scan_end = match g.function() {
        ArithFunction::Sigma => horizon.min(g.horizon()),
        _ => g.horizon(),
    };
    for m in 1..scan_end {
        let v = g.values()[m as usize];
        if v < horizon {
            let w = match weight {
                FiberWeight::Constant(c) => c,
                FiberWeight::Table(f) => f.values()[m as usize],
            };
            acc[v as usize] = acc[v as usize]
                .checked_add(w)
                .ok_or_else(|| Error::OverflowPolicy("fibre sum exceeds 64 bits".into()))?;
        }
    }
    let total: u128 = acc.iter().map(|&v| v as u128).sum();
    let coefs: BTreeMap<u64, FieldElement> =
        acc.iter().enumerate().filter(|(_, &v)| v > 0).map(|(n, &v)| (n as u64, field.from_int(v))).collect();
    let wname = match weight {
        FiberWeight::Constant(c) => c.to_string(),
        FiberWeight::Table(f) => f.function().name().to_string(),
    };
    let generator = format!("fiber:{}:{}", g.function(), wname);
    if coefs.is_empty() {
        return CoefficientSequence::new(field, horizon, coefs, Tail::Vanishing, generator);
    }
    let r = BigRational::one() + BigRational::new(BigInt::one(), BigInt::one() << 20);
    let tail = Tail::Geometric { m: BigRational::from_integer(BigInt::from(total)), r };
    Ok(CoefficientSequence::new(field, horizon, coefs, tail, generator)?.with_obligation(format!(
        "fiber:{}: beyond the horizon a(n) <= S_a(H) (1+2^-20)^n is assumed from the polynomial growth of fibre sums",
        g.function()
    )))
}

/// `b_j(n)`: the `n`-th coefficient of the `j`-th power of the generating
/// series, truncated at `horizon`.
pub fn convolution_power(a: &CoefficientSequence, j: u32, horizon: u64) -> Result<CoefficientSequence> {
    convolution_power_capped(a, j, horizon, u64::MAX)
}

pub fn convolution_power_capped(
    a: &CoefficientSequence,
    j: u32,
    horizon: u64,
    max_bits: u64,
) -> Result<CoefficientSequence> {
    if j == 0 {
        return Err(Error::InvalidInput("convolution power needs j >= 1".into()));
    }
    if !a.is_nonnegative_integer() {
        return Err(Error::InvalidInput("convolution powers need non-negative integer coefficients".into()));
    }
    if horizon > a.horizon() && !a.is_finite() {
        return Err(Error::HorizonInsufficient { required: horizon, available: a.horizon() });
    }
    let base: Vec<(u64, BigInt)> =
        a.coefs().iter().map(|(&n, c)| (n, c.as_integer().unwrap().clone())).filter(|(n, _)| *n < horizon).collect();
    let mut cur: BTreeMap<u64, BigInt> = base.iter().cloned().collect();
    for _ in 1..j {
        let mut next: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (&n, c) in &cur {
            for (m, d) in &base {
                let s = n + m;
                if s >= horizon {
                    break;
                }
                let e = next.entry(s).or_insert_with(BigInt::zero);
                *e += c * d;
                if e.bits() > max_bits {
                    return Err(Error::OverflowPolicy(format!("coefficient at {s} exceeds {max_bits} bits")));
                }
            }
        }
        cur = next;
    }
    let field = a.field().clone();
    let coefs: BTreeMap<u64, FieldElement> = cur.into_iter().map(|(n, c)| (n, field.from_int(c))).collect();
    let jb = BigInt::from(j);
    let generator = format!("conv{j}({})", a.generator());
    let mut obligations = a.obligations().to_vec();
    let tail = match a.tail() {
        Tail::Vanishing => {
            let reach = (a.horizon().saturating_sub(1)) * j as u64;
            if horizon > reach {
                Tail::Vanishing
            } else {
                // finitely many tuples: b_j(n) <= H_a^(j-1) max^j for every n
                let maxc = a.max_integer_house()?;
                let m = num_traits::pow(BigInt::from(a.horizon()), (j - 1) as usize) * num_traits::pow(maxc, j as usize);
                Tail::Geometric { m: BigRational::from_integer(m), r: BigRational::one() }
            }
        }
        Tail::Geometric { m, r } => {
            let mj = num_traits::pow(m.clone(), j as usize)
                * BigRational::from_integer(num_traits::pow(BigInt::from(horizon), (j - 1) as usize));
            if j > 1 {
                obligations.push(format!(
                    "{generator}: tuple-count factor n^{} folded into M at the horizon; beyond it the bound is assumed",
                    jb - 1
                ));
            }
            Tail::Geometric { m: mj, r: r.clone() }
        }
    };
    let mut out = CoefficientSequence::new(field, horizon, coefs, tail, generator)?;
    out.obligations = obligations;
    Ok(out)
}

impl fmt::Display for TailStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} z={} eta={} N={} S={:?} R={:?}", self.x, self.z, self.eta, self.n_count, self.s_value.to_decimal(), self.r_value.to_decimal())
    }
}
