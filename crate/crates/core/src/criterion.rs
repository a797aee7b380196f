//! Finite-scale evaluation of the irrationality criteria: per-checkpoint
//! ratio series with trend verdicts, interlacing scans, censuses, the
//! degree-ℓ ratio, Liouville gaps and norm witnesses.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Round};
use crate::field::{AlgebraicField, BaseKind};
use crate::interval::{DecimalInterval, Interval};
use crate::sequence::{ceil_u64, CoefficientSequence, SupportSet, STATS_PRECISION};
use crate::{Error, Result};

pub const REPORT_SCHEMA: &str = "sparse-series-report/1";
pub const DEFAULT_TREND_CAP: i64 = 10;
pub const MAX_VIOLATIONS: usize = 100;
/// Extra precision doublings granted to straddling census intervals.
pub const CENSUS_DOUBLINGS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS-trend")]
    PassTrend,
    #[serde(rename = "FAIL-trend")]
    FailTrend,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PassTrend => "PASS-trend",
            Verdict::FailTrend => "FAIL-trend",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Rule producing the `y_i` companions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum YSpec {
    EqualX,
    Values(Vec<BigRational>),
}

/// Rule producing the `z_i` companions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZSpec {
    Values(Vec<BigRational>),
    /// `z = u^(1/2)` with `u = x / max(1, #N_a(x), #N_b(x))`.
    SqrtU,
    /// `z = (2+δ)/log q · log log x` for `x > e^q`, else 1.
    LogLog { delta: BigRational },
    /// `z = x^e / (log x)^k`.
    PowerLog { exponent: BigRational, log_power: u32 },
}

impl fmt::Display for ZSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZSpec::Values(_) => f.write_str("values"),
            ZSpec::SqrtU => f.write_str("sqrt-u"),
            ZSpec::LogLog { delta } => write!(f, "loglog:{delta}"),
            ZSpec::PowerLog { exponent, log_power } => write!(f, "powerlog:{exponent}:{log_power}"),
        }
    }
}

/// Checkpoints `x_1 < … < x_m` with companion rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointSchedule {
    pub points: Vec<BigRational>,
    pub y: YSpec,
    pub z: ZSpec,
    pub eta: BigRational,
    pub delta: Option<BigRational>,
    pub l: Option<BigRational>,
    pub cap: BigRational,
}

impl CheckpointSchedule {
    pub fn new(points: Vec<BigRational>) -> Result<Self> {
        let s = CheckpointSchedule {
            points,
            y: YSpec::EqualX,
            z: ZSpec::SqrtU,
            eta: BigRational::new(1.into(), 2.into()),
            delta: None,
            l: None,
            cap: BigRational::from_integer(DEFAULT_TREND_CAP.into()),
        };
        s.validate()?;
        Ok(s)
    }

    /// `x_i = start · ratio^i` while `<= end`.
    pub fn geometric(start: &BigRational, end: &BigRational, ratio: &BigRational) -> Result<Self> {
        if ratio <= &BigRational::one() || start < &BigRational::one() {
            return Err(Error::InvalidInput("geometric schedule needs start >= 1 and ratio > 1".into()));
        }
        let mut points = Vec::new();
        let mut x = start.clone();
        while &x <= end {
            points.push(x.clone());
            x = &x * ratio;
        }
        CheckpointSchedule::new(points)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidInput("schedule has no checkpoints".into()));
        }
        if self.points.iter().any(|x| x < &BigRational::one()) {
            return Err(Error::InvalidInput("checkpoints must be >= 1".into()));
        }
        if !self.eta.is_positive() || self.eta > BigRational::one() {
            return Err(Error::InvalidInput(format!("η must lie in (0, 1], got {}", self.eta)));
        }
        let m = self.points.len();
        for (name, v) in [("y", &self.y_values_opt()), ("z", &self.z_values_opt())] {
            if let Some(v) = v {
                if v.len() != m {
                    return Err(Error::InvalidInput(format!("{name} schedule has {} entries, expected {m}", v.len())));
                }
                if v.iter().any(|e| e < &BigRational::one()) {
                    return Err(Error::InvalidInput(format!("{name} entries must be >= 1")));
                }
            }
        }
        for (name, v) in [("Δ", &self.delta), ("L", &self.l)] {
            if let Some(v) = v {
                if v <= &BigRational::one() {
                    return Err(Error::InvalidInput(format!("{name} must exceed 1")));
                }
            }
        }
        Ok(())
    }

    fn y_values_opt(&self) -> Option<Vec<BigRational>> {
        match &self.y {
            YSpec::Values(v) => Some(v.clone()),
            YSpec::EqualX => None,
        }
    }

    fn z_values_opt(&self) -> Option<Vec<BigRational>> {
        match &self.z {
            ZSpec::Values(v) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn max_point(&self) -> &BigRational {
        self.points.iter().max().unwrap()
    }
}

/// A real number rounded up to a dyadic rational with 64 fractional bits.
fn round_up_rational(v: &Interval) -> BigRational {
    v.hi().round_abs(64, Round::Up).to_rational()
}

fn rat_interval(r: &BigRational) -> Interval {
    Interval::from_rational(r, STATS_PRECISION + 16)
}

/// One condition row of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub condition_id: String,
    pub statement: String,
    pub rule: String,
    pub values: Vec<DecimalInterval>,
    pub ratios: Vec<DecimalInterval>,
    pub verdict: Verdict,
    pub note: String,
}

/// Uncovered stretch of `μ` for a pair of consecutive `𝒩_b` elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlacingViolation {
    pub m: u64,
    pub m_plus: u64,
    /// Uncovered `μ` lie in `(mu_lo, mu_hi]`, or `[mu_lo, mu_hi]` when `mu_lo = L`.
    pub mu_lo: String,
    pub mu_hi: String,
    /// A concrete uncovered `μ`; the window `[m+μ, m+Δμ)` misses `𝒩_a`.
    pub mu: String,
    pub window_lo: String,
    pub window_hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    ContradictionDemonstrated,
    Indeterminate,
}

/// Finite certificate that `u ξ_N` cannot be an algebraic integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormWitness {
    pub n: u64,
    pub u: u64,
    pub value_interval: DecimalInterval,
    pub conjugate_product: DecimalInterval,
    pub conclusion: Conclusion,
}

/// Description of the inputs of a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub theorem: String,
    pub minpoly: String,
    pub degree: u64,
    pub base_kind: String,
    pub a: String,
    pub b: String,
    pub horizon_a: u64,
    pub horizon_b: u64,
    pub checkpoints: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub z_rule: String,
    pub eta: String,
    pub delta: Option<String>,
    pub l: Option<String>,
    pub cap: String,
    pub obligations: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub schema: String,
    pub metadata: ReportMetadata,
    pub rows: Vec<ConditionRow>,
    pub interlacing_violations: Vec<InterlacingViolation>,
    pub witnesses: Vec<NormWitness>,
}

impl CriterionReport {
    pub fn empty() -> Self {
        CriterionReport {
            schema: REPORT_SCHEMA.into(),
            metadata: ReportMetadata {
                theorem: String::new(),
                minpoly: String::new(),
                degree: 0,
                base_kind: String::new(),
                a: String::new(),
                b: String::new(),
                horizon_a: 0,
                horizon_b: 0,
                checkpoints: vec![],
                y: vec![],
                z: vec![],
                z_rule: String::new(),
                eta: String::new(),
                delta: None,
                l: None,
                cap: String::new(),
                obligations: vec![],
                notes: vec![],
            },
            rows: vec![],
            interlacing_violations: vec![],
            witnesses: vec![],
        }
    }

    pub fn row(&self, id: &str) -> Option<&ConditionRow> {
        self.rows.iter().find(|r| r.condition_id == id)
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.condition_id.cmp(&b.condition_id));
        self.witnesses.sort_by_key(|w| (w.u, w.n));
    }
}

/// `o(·)` evidence: `r_last <= r_first/2` and at least `⌈(m-1)/2⌉`
/// consecutive decreases, decided on certified comparisons.
pub fn o_trend(ratios: &[Interval]) -> (Verdict, String) {
    let m = ratios.len();
    if ratios.iter().all(Interval::is_zero) {
        return (Verdict::PassTrend, "identically zero".into());
    }
    if m < 2 {
        return (Verdict::Inconclusive, "a trend needs at least two checkpoints".into());
    }
    let need = m / 2;
    let certain = ratios.windows(2).filter(|w| w[1].hi() < w[0].lo()).count();
    let possible = ratios.windows(2).filter(|w| w[1].lo() < w[0].hi()).count();
    let half_lo = ratios[0].lo().shl(-1);
    let half_hi = ratios[0].hi().shl(-1);
    let last = &ratios[m - 1];
    let note = format!("{certain} of {} steps decrease, need {need}; last/first <= 1/2 required", m - 1);
    if last.hi() <= &half_lo && certain >= need {
        (Verdict::PassTrend, note)
    } else if last.lo() > &half_hi || possible < need {
        (Verdict::FailTrend, note)
    } else {
        (Verdict::Inconclusive, note)
    }
}

/// `O(·)` evidence: every ratio stays below the cap.
pub fn big_o_trend(ratios: &[Interval], cap: &BigRational) -> (Verdict, String) {
    let c = rat_interval(cap);
    let note = format!("cap {cap}");
    if ratios.iter().all(|r| r.hi() <= c.lo()) {
        (Verdict::PassTrend, note)
    } else if ratios.iter().any(|r| r.lo() > c.hi()) {
        (Verdict::FailTrend, note)
    } else {
        (Verdict::Inconclusive, note)
    }
}

fn decimals(v: &[Interval]) -> Vec<DecimalInterval> {
    v.iter().map(Interval::to_decimal).collect()
}

fn row(id: &str, statement: &str, rule: &str, values: &[Interval], ratios: &[Interval], verdict: (Verdict, String)) -> ConditionRow {
    ConditionRow {
        condition_id: id.into(),
        statement: statement.into(),
        rule: rule.into(),
        values: decimals(values),
        ratios: decimals(ratios),
        verdict: verdict.0,
        note: verdict.1,
    }
}

/// Quantities of both sequences at one checkpoint.
#[derive(Clone, Debug)]
struct Checkpoint {
    x: BigRational,
    y: BigRational,
    z: BigRational,
    n_count: u64,
    s: Interval,
    r: Option<Interval>,
    plain_sum: Interval,
    rho_hat: Interval,
}

fn ln_q(field: &AlgebraicField) -> Result<Interval> {
    Ok(field.q_interval(STATS_PRECISION + 16)?.ln(STATS_PRECISION))
}

fn resolve_z(spec: &ZSpec, i: usize, x: &BigRational, n_count: u64, field: &AlgebraicField) -> Result<BigRational> {
    let one = BigRational::one();
    let prec = STATS_PRECISION;
    let z = match spec {
        ZSpec::Values(v) => v[i].clone(),
        ZSpec::SqrtU => {
            let u = x / BigRational::from_integer(n_count.max(1).into());
            let s = rat_interval(&u).sqrt(prec);
            match Dyadic::try_from_rational(&u).filter(|_| s.is_point()) {
                Some(_) => s.lo().to_rational(),
                None => round_up_rational(&s),
            }
        }
        ZSpec::LogLog { delta } => {
            let lnq = ln_q(field)?;
            let xi = rat_interval(x);
            // x > e^q  iff  ln x > q
            let lnx = xi.ln(prec);
            let q = field.q_interval(prec)?;
            if lnx.certainly_gt(&q) {
                let mu = rat_interval(&(BigRational::from_integer(2.into()) + delta)).div(&lnq, prec);
                round_up_rational(&mu.mul_r(&lnx.ln(prec), prec))
            } else {
                one.clone()
            }
        }
        ZSpec::PowerLog { exponent, log_power } => {
            let xi = rat_interval(x);
            let lnx = xi.ln(prec);
            let num = xi.pow(&rat_interval(exponent), prec);
            let den = lnx.powi(*log_power as u64, prec);
            if den.contains_zero() {
                one.clone()
            } else {
                round_up_rational(&num.div(&den, prec))
            }
        }
    };
    Ok(if z < one { one } else { z })
}

/// `max(1, max_{n in window} house(c(n))^(1/n))`, screening in f64 and
/// certifying the leading candidates.
fn rho_hat(seqs: &[&CoefficientSequence], lo: u64, hi: u64) -> Result<Interval> {
    let prec = 64;
    let mut cands: Vec<(f64, u64, usize)> = Vec::new();
    for (si, s) in seqs.iter().enumerate() {
        for (&n, c) in s.coefs().range(lo..hi) {
            let h = match c.as_integer() {
                Some(v) => v.abs().to_f64().unwrap_or(f64::MAX),
                None => s.field().house(c, 16)?.hi().to_f64(),
            };
            if h > 1.0 {
                cands.push((h.ln() / n as f64, n, si));
            }
        }
    }
    let best = cands.iter().map(|c| c.0).fold(0.0f64, f64::max);
    let mut out = Interval::one();
    for (v, n, si) in cands {
        if v >= best * (1.0 - 1e-6) - 1e-300 {
            let h = seqs[si].field().house(seqs[si].get(n).unwrap(), prec)?;
            let r = h.ln(prec).div(&Interval::from_int(n as i64), prec).exp(prec);
            out = out.max(&r);
        }
    }
    Ok(out)
}

struct Inputs<'a> {
    field: &'a AlgebraicField,
    a: &'a CoefficientSequence,
    b: &'a CoefficientSequence,
    schedule: &'a CheckpointSchedule,
}

impl<'a> Inputs<'a> {
    fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.a.field() != self.b.field() {
            return Err(Error::InvalidInput("a and b live in different fields".into()));
        }
        if self.a.is_empty() {
            return Err(Error::InvalidInput("the support of a must be infinite; a is empty".into()));
        }
        for c in self.a.coefs().values() {
            if c.as_integer().is_some_and(|v| v.is_negative()) {
                return Err(Error::InvalidInput("a must be non-negative".into()));
            }
            if c.as_integer().is_none() && !self.field.principal_value(c, 64)?.lo().is_positive() {
                return Err(Error::InvalidInput("a must be non-negative".into()));
            }
        }
        let xmax = ceil_u64(self.schedule.max_point());
        for s in [self.a, self.b] {
            if !s.is_finite() && s.horizon() < xmax {
                return Err(Error::HorizonInsufficient { required: xmax, available: s.horizon() });
            }
        }
        Ok(())
    }

    fn checkpoints(&self, need_r: bool) -> Result<Vec<Checkpoint>> {
        let sched = self.schedule;
        let ys = sched.y_values_opt();
        let results: Vec<Result<Checkpoint>> = sched
            .points
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let xc = ceil_u64(x);
                let n_count = self.a.support_count_below(xc).max(self.b.support_count_below(xc));
                let y = ys.as_ref().map(|v| v[i].clone()).unwrap_or_else(|| x.clone());
                let z = resolve_z(&sched.z, i, x, n_count, self.field)?;
                let prec = STATS_PRECISION;
                let s = self.a.s_value(xc, prec)?.max(&self.b.s_value(xc, prec)?);
                let r = if need_r {
                    let end = ceil_u64(&(&sched.eta * x));
                    let zc = ceil_u64(&z);
                    Some(self.a.r_value(end, zc, prec)?.max(&self.b.r_value(end, zc, prec)?))
                } else {
                    None
                };
                let plain = |seq: &CoefficientSequence| -> Result<Interval> {
                    let mut t = Interval::zero();
                    for c in seq.coefs().range(..xc).map(|(_, c)| c) {
                        t = t.add(&self.field.principal_value(c, prec)?.abs());
                    }
                    Ok(t)
                };
                let plain_sum = plain(self.a)?.max(&plain(self.b)?);
                let window_lo = xc / 2;
                let rho_hat = rho_hat(&[self.a, self.b], window_lo.max(1), xc.max(2))?;
                Ok(Checkpoint { x: x.clone(), y, z, n_count, s, r, plain_sum, rho_hat })
            })
            .collect();
        results.into_iter().collect()
    }

    fn metadata(&self, theorem: &str, cps: &[Checkpoint]) -> ReportMetadata {
        let s = self.schedule;
        let mut obligations: Vec<String> = self.a.obligations().iter().chain(self.b.obligations()).cloned().collect();
        obligations.dedup();
        let mut notes = Vec::new();
        let kind = self.field.classification().kind;
        if !matches!(kind, BaseKind::Pisot | BaseKind::Salem) {
            notes.push(format!("base is {kind}: the criteria assume a Pisot or Salem base"));
        }
        ReportMetadata {
            theorem: theorem.into(),
            minpoly: self.field.minpoly().to_expression(),
            degree: self.field.degree() as u64,
            base_kind: kind.to_string(),
            a: self.a.generator().into(),
            b: self.b.generator().into(),
            horizon_a: self.a.horizon(),
            horizon_b: self.b.horizon(),
            checkpoints: cps.iter().map(|c| c.x.to_string()).collect(),
            y: cps.iter().map(|c| c.y.to_string()).collect(),
            z: cps.iter().map(|c| c.z.to_string()).collect(),
            z_rule: s.z.to_string(),
            eta: s.eta.to_string(),
            delta: s.delta.as_ref().map(ToString::to_string),
            l: s.l.as_ref().map(ToString::to_string),
            cap: s.cap.to_string(),
            obligations,
            notes,
        }
    }

    fn row_i(&self, cps: &[Checkpoint]) -> ConditionRow {
        let xs: Vec<Interval> = cps.iter().map(|c| rat_interval(&c.x)).collect();
        let increasing = cps.windows(2).all(|w| w[0].x < w[1].x);
        let verdict = if cps.len() < 2 {
            (Verdict::Inconclusive, "a single checkpoint".into())
        } else if increasing {
            (Verdict::PassTrend, "checkpoints strictly increase".into())
        } else {
            (Verdict::FailTrend, "checkpoints do not increase".into())
        };
        row("i", "x_n -> infinity", "increasing", &xs, &xs, verdict)
    }

    fn row_ii(&self, cps: &[Checkpoint]) -> ConditionRow {
        let values: Vec<Interval> = cps.iter().map(|c| c.s.clone()).collect();
        let ratios: Vec<Interval> =
            cps.iter().map(|c| c.s.div(&rat_interval(&c.y), STATS_PRECISION)).collect();
        let v = big_o_trend(&ratios, &self.schedule.cap);
        row("ii", "S_a(x), S_b(x) = O(y)", "O", &values, &ratios, v)
    }

    fn row_iii(&self, cps: &[Checkpoint]) -> ConditionRow {
        let values: Vec<Interval> = cps.iter().map(|c| Interval::from_int(c.n_count as i64)).collect();
        let ratios: Vec<Interval> = cps
            .iter()
            .map(|c| rat_interval(&(BigRational::from_integer(c.n_count.into()) * &c.z / &c.x)))
            .collect();
        let v = o_trend(&ratios);
        row("iii", "#N_a(x), #N_b(x) = o(x/z)", "o", &values, &ratios, v)
    }

    fn y_power(&self, y: &BigRational) -> Interval {
        let d = self.field.degree() as u32;
        rat_interval(&num_traits::pow(y.clone(), (d - 1) as usize))
    }

    fn row_iv(&self, cps: &[Checkpoint]) -> ConditionRow {
        let values: Vec<Interval> = cps.iter().map(|c| c.r.clone().unwrap()).collect();
        let ratios: Vec<Interval> = cps
            .iter()
            .map(|c| {
                c.r.clone().unwrap().mul_r(&self.y_power(&c.y), STATS_PRECISION).div(&rat_interval(&c.x), STATS_PRECISION)
            })
            .collect();
        let v = o_trend(&ratios);
        row("iv", "R_a(q,ηx,z), R_b(q,ηx,z) = o(x/y^(d-1))", "o", &values, &ratios, v)
    }

    fn row_iv1(&self, cps: &[Checkpoint]) -> Result<ConditionRow> {
        let q = self.field.q_interval(STATS_PRECISION)?;
        let values: Vec<Interval> = cps.iter().map(|c| c.rho_hat.clone()).collect();
        let ratios: Vec<Interval> = values.iter().map(|r| r.div(&q, STATS_PRECISION)).collect();
        let v = if ratios.iter().all(|r| r.certainly_lt(&Interval::one())) {
            (Verdict::PassTrend, "window maxima of house^(1/n) stay below q".into())
        } else if ratios.last().unwrap().lo() >= &Dyadic::one() {
            (Verdict::FailTrend, "window maximum of house^(1/n) reaches q".into())
        } else {
            (Verdict::Inconclusive, "window maxima not separated from q".into())
        };
        Ok(row("iv-1", "limsup max(house a(n), house b(n))^(1/n) < q", "limsup<q", &values, &ratios, v))
    }

    fn row_iv2(&self, cps: &[Checkpoint]) -> Result<ConditionRow> {
        let d = self.field.degree() as i64;
        let prec = STATS_PRECISION;
        let q = self.field.q_interval(prec)?;
        let values: Vec<Interval> = cps
            .iter()
            .map(|c| {
                if d == 1 {
                    Interval::one()
                } else {
                    let e = rat_interval(&(BigRational::from_integer((d - 1).into()) / &c.x));
                    rat_interval(&c.y).pow(&e, prec)
                }
            })
            .collect();
        let thresholds: Vec<Interval> = cps.iter().map(|c| q.div(&c.rho_hat, prec)).collect();
        let ratios: Vec<Interval> = values.iter().zip(&thresholds).map(|(v, t)| v.div(t, prec)).collect();
        let v = if d == 1 {
            (Verdict::PassTrend, "degree 1: y^0 = 1".into())
        } else if ratios.last().unwrap().certainly_lt(&Interval::one()) {
            (Verdict::PassTrend, "final y^((d-1)/x) below q/ρ̂".into())
        } else if ratios.last().unwrap().lo() >= &Dyadic::one() {
            (Verdict::FailTrend, "final y^((d-1)/x) reaches q/ρ̂".into())
        } else {
            (Verdict::Inconclusive, "final y^((d-1)/x) not separated from q/ρ̂".into())
        };
        Ok(row("iv-2", "limsup y^((d-1)/x) < q/ρ", "limsup<q/rho", &values, &ratios, v))
    }

    fn row_iv3(&self, cps: &[Checkpoint], id: &str, statement: &str) -> Result<ConditionRow> {
        let prec = STATS_PRECISION;
        let lnq = ln_q(self.field)?;
        let values: Vec<Interval> = cps.iter().map(|c| c.plain_sum.clone()).collect();
        let ratios: Vec<Interval> = cps
            .iter()
            .map(|c| {
                let qz = lnq.mul_r(&rat_interval(&c.z), prec).exp(prec);
                let den = qz.mul_r(&rat_interval(&c.x), prec);
                c.plain_sum.mul_r(&self.y_power(&c.y), prec).div(&den, prec)
            })
            .collect();
        let v = o_trend(&ratios);
        Ok(row(id, statement, "o", &values, &ratios, v))
    }

    fn row_v(&self, report: &mut CriterionReport) -> ConditionRow {
        let empty: Vec<Interval> = Vec::new();
        if self.b.is_finite() {
            return row(
                "v",
                "interlacing of N_a between consecutive elements of N_b",
                "interlacing",
                &empty,
                &empty,
                (Verdict::PassTrend, "vacuous: N_b is finite".into()),
            );
        }
        let (Some(delta), Some(l)) = (&self.schedule.delta, &self.schedule.l) else {
            return row(
                "v",
                "interlacing of N_a between consecutive elements of N_b",
                "interlacing",
                &empty,
                &empty,
                (Verdict::Inconclusive, "N_b may be infinite and no Δ, L were supplied".into()),
            );
        };
        let horizon = self.a.horizon().min(self.b.horizon());
        let res = check_interlacing(&self.a.support(), &self.b.support(), delta, l, horizon);
        let note = format!("{} consecutive pairs scanned, {} violations", res.pairs_checked, res.violation_count);
        report.interlacing_violations = res.violations;
        row(
            "v",
            "interlacing of N_a between consecutive elements of N_b",
            "interlacing",
            &[Interval::from_int(res.pairs_checked as i64)],
            &[Interval::from_int(res.violation_count as i64)],
            (if res.pass { Verdict::PassTrend } else { Verdict::FailTrend }, note),
        )
    }
}

/// Conditions (i)–(v) of the fundamental criterion.
pub fn check_theorem_main(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    schedule: &CheckpointSchedule,
) -> Result<CriterionReport> {
    let field = a.field().as_ref();
    let inp = Inputs { field, a, b, schedule };
    inp.validate()?;
    let cps = inp.checkpoints(true)?;
    let mut report = CriterionReport::empty();
    report.metadata = inp.metadata("main", &cps);
    report.rows = vec![inp.row_i(&cps), inp.row_ii(&cps), inp.row_iii(&cps), inp.row_iv(&cps)];
    let v = inp.row_v(&mut report);
    report.rows.push(v);
    report.sort();
    Ok(report)
}

/// Conditions (i)–(iii), (iv-1)–(iv-3) and (v).
pub fn check_theorem_prepared(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    schedule: &CheckpointSchedule,
) -> Result<CriterionReport> {
    let field = a.field().as_ref();
    let inp = Inputs { field, a, b, schedule };
    inp.validate()?;
    let cps = inp.checkpoints(false)?;
    let mut report = CriterionReport::empty();
    report.metadata = inp.metadata("prepared", &cps);
    report.rows = vec![
        inp.row_i(&cps),
        inp.row_ii(&cps),
        inp.row_iii(&cps),
        inp.row_iv1(&cps)?,
        inp.row_iv2(&cps)?,
        inp.row_iv3(&cps, "iv-3", "sum a(m), sum |b(m)| over m < x = o(q^z x / y^(d-1))")?,
    ];
    let v = inp.row_v(&mut report);
    report.rows.push(v);
    report.sort();
    Ok(report)
}

/// Rational-base criterion for `q = t`; `ZSpec::SqrtU` gives the classical
/// choice `z = u^(1/2)`.
pub fn check_theorem_rational(
    t: i64,
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    schedule: &CheckpointSchedule,
) -> Result<CriterionReport> {
    if t < 2 {
        return Err(Error::InvalidInput(format!("base t must be at least 2, got {t}")));
    }
    let field = a.field().as_ref();
    if field.degree() > 1 {
        return Err(Error::NonRationalField { degree: field.degree() });
    }
    if field.rational_base() != Some(BigInt::from(t)) {
        return Err(Error::InvalidInput(format!("sequences are over base {}, not {t}", field.minpoly())));
    }
    for s in [a, b] {
        if s.coefs().values().any(|c| c.as_integer().is_none()) {
            return Err(Error::InvalidInput("rational-base coefficients must be integers".into()));
        }
    }
    let inp = Inputs { field, a, b, schedule };
    inp.validate()?;
    let cps = inp.checkpoints(false)?;
    let mut report = CriterionReport::empty();
    report.metadata = inp.metadata("rational", &cps);
    report.rows = vec![
        inp.row_i(&cps),
        inp.row_iii(&cps),
        inp.row_iv1(&cps)?,
        inp.row_iv3(&cps, "iv-3", "S_a(x), S_b(x) = o(t^z x)")?,
    ];
    let v = inp.row_v(&mut report);
    report.rows.push(v);
    report.sort();
    Ok(report)
}

/// Outcome of an interlacing scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterlacingResult {
    pub pass: bool,
    pub pairs_checked: u64,
    /// Number of uncovered stretches; only the first `MAX_VIOLATIONS` are kept.
    pub violation_count: u64,
    pub violations: Vec<InterlacingViolation>,
}

/// Checks `𝒩_a ∩ [m+μ, m+Δμ) ≠ ∅` for consecutive `m < m₊` in `B` below
/// `horizon` and every `μ >= L` with `m+Δμ < m₊`. The window `μ ↦ [m+μ, m+Δμ)`
/// meets `α = a-m` exactly for `μ ∈ (α/Δ, α]`, so the scan is a sweep over
/// these intervals.
pub fn check_interlacing(
    a: &SupportSet,
    b: &SupportSet,
    delta: &BigRational,
    l: &BigRational,
    horizon: u64,
) -> InterlacingResult {
    let av = a.elements();
    let bv: Vec<u64> = b.elements().iter().copied().filter(|&e| e < horizon).collect();
    let mut violations = Vec::new();
    let mut pairs = 0u64;
    let mut count = 0u64;
    for w in bv.windows(2) {
        let (m, mp) = (w[0], w[1]);
        pairs += 1;
        let mb = BigRational::from_integer(m.into());
        let upper = BigRational::from_integer((mp - m).into()) / delta;
        if l >= &upper {
            continue;
        }
        let report = |lo: &BigRational, hi: &BigRational, mu: BigRational, violations: &mut Vec<InterlacingViolation>| {
            if violations.len() < MAX_VIOLATIONS {
                violations.push(InterlacingViolation {
                    m,
                    m_plus: mp,
                    mu_lo: lo.to_string(),
                    mu_hi: hi.to_string(),
                    window_lo: (&mb + &mu).to_string(),
                    window_hi: (&mb + delta * &mu).to_string(),
                    mu: mu.to_string(),
                });
            }
        };
        // covered so far: [L, cur]; `None` before the first covering interval
        let mut cur: Option<BigRational> = None;
        let start = av.partition_point(|&e| e <= m);
        let mut idx = start;
        loop {
            let need_lo = cur.clone().unwrap_or_else(|| l.clone());
            if cur.as_ref().is_some_and(|c| c >= &upper) {
                break;
            }
            // smallest α with α >= need_lo (first step) or α > cur
            while idx < av.len() {
                let alpha = BigRational::from_integer((av[idx] - m).into());
                let ok = match &cur {
                    None => alpha >= need_lo,
                    Some(c) => &alpha > c,
                };
                if ok {
                    break;
                }
                idx += 1;
            }
            let next = av.get(idx).filter(|&&e| e < mp).map(|&e| BigRational::from_integer((e - m).into()));
            let covers = match (&next, &cur) {
                (Some(alpha), None) => alpha / delta < need_lo,
                (Some(alpha), Some(c)) => &(alpha / delta) <= c,
                (None, _) => false,
            };
            if covers {
                cur = next;
                continue;
            }
            count += 1;
            let gap_end = match &next {
                Some(alpha) => (alpha / delta).min(upper.clone()),
                None => upper.clone(),
            };
            let witness = match &cur {
                None => l.clone(),
                Some(c) => {
                    if gap_end < upper {
                        gap_end.clone()
                    } else {
                        (c + &upper) / BigRational::from_integer(2.into())
                    }
                }
            };
            report(&need_lo, &gap_end, witness, &mut violations);
            // skip past the gap; the next interval starts the coverage again
            match next {
                Some(alpha) if alpha.clone() / delta < upper => cur = Some(alpha),
                _ => break,
            }
        }
    }
    InterlacingResult { pass: count == 0, pairs_checked: pairs, violation_count: count, violations }
}

/// `(k, n_k, ratio n_k / (k^ℓ log Q(n_k)))`; the ratio is `None` when `log Q = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeRow {
    pub k: u64,
    pub n_k: u64,
    pub q: Interval,
    pub ratio: Option<Interval>,
}

pub fn degree_ell_ratio(a: &CoefficientSequence, ell: u32) -> Result<Vec<DegreeRow>> {
    if a.is_empty() {
        return Err(Error::EmptySupport);
    }
    let prec = 96;
    let mut rows = Vec::with_capacity(a.coefs().len());
    let mut max_house = Interval::zero();
    for (k, (&n, c)) in a.coefs().iter().enumerate() {
        let k = k as u64 + 1;
        max_house = max_house.max(&a.field().house(c, prec)?);
        let q = max_house.max(&Interval::from_int(n as i64));
        let lnq = q.ln(prec);
        let ratio = if lnq.contains_zero() {
            None
        } else {
            let den = Interval::from_bigint(&num_traits::pow(BigInt::from(k), ell as usize)).mul_r(&lnq, prec);
            Some(Interval::from_int(n as i64).div(&den, prec))
        };
        rows.push(DegreeRow { k, n_k: n, q, ratio });
    }
    Ok(rows)
}

/// Largest consecutive ratio `n_{k+1}/n_k` (1-based `k`) of the positive elements.
pub fn liouville_gap(support: &SupportSet) -> Result<(BigRational, usize)> {
    let e: Vec<u64> = support.elements().iter().copied().filter(|&x| x > 0).collect();
    if e.len() < 2 {
        return Err(Error::TooFewElements);
    }
    let mut best = (BigRational::zero(), 0usize);
    for (i, w) in e.windows(2).enumerate() {
        let r = BigRational::new(w[1].into(), w[0].into());
        if r > best.0 {
            best = (r, i + 1);
        }
    }
    Ok(best)
}

/// Census outcome; `unresolved` lists indices whose comparison could not be
/// certified within the refinement budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub count: u64,
    pub total: u64,
    pub unresolved: Vec<u64>,
}

/// Decides `pred` on every index with a certified comparison, refining
/// straddling indices up to `CENSUS_DOUBLINGS` times.
fn census<F, G>(total: u64, initial: Vec<Interval>, prec: u32, refine: G, decide: F) -> Result<Census>
where
    F: Fn(&Interval) -> Option<bool> + Sync,
    G: Fn(u64, u32) -> Result<Interval> + Sync,
{
    let mut count = 0u64;
    let mut straddle = Vec::new();
    for (i, v) in initial.iter().enumerate() {
        match decide(v) {
            Some(true) => count += 1,
            Some(false) => {}
            None => straddle.push(i as u64 + 1),
        }
    }
    let refined: Vec<(u64, Option<bool>)> = straddle
        .par_iter()
        .map(|&n| {
            let mut p = prec;
            for _ in 0..CENSUS_DOUBLINGS {
                p *= 2;
                let v = refine(n, p)?;
                if let Some(d) = decide(&v) {
                    return Ok((n, Some(d)));
                }
            }
            Ok((n, None))
        })
        .collect::<Result<_>>()?;
    let mut unresolved = Vec::new();
    for (n, d) in refined {
        match d {
            Some(true) => count += 1,
            Some(false) => {}
            None => unresolved.push(n),
        }
    }
    Ok(Census { count, total, unresolved })
}

fn unresolved_error(c: Census) -> Result<Census> {
    if c.unresolved.is_empty() {
        Ok(c)
    } else {
        Err(Error::UnresolvedIntervals { count: c.unresolved.len(), first: c.unresolved.iter().take(10).copied().collect() })
    }
}

/// `#{N ∈ [1, ηx) : w ξ_N(|c|) < δ}`.
pub fn good_n_census(
    c: &CoefficientSequence,
    w: &BigRational,
    delta: &BigRational,
    eta: &BigRational,
    x: &BigRational,
) -> Result<Census> {
    if !delta.is_positive() {
        return Err(Error::InvalidInput(format!("δ must be positive, got {delta}")));
    }
    if w < &BigRational::one() {
        return Err(Error::InvalidInput(format!("w must be at least 1, got {w}")));
    }
    if !eta.is_positive() || eta > &BigRational::one() {
        return Err(Error::InvalidInput("η must lie in (0, 1]".into()));
    }
    let end = ceil_u64(&(eta * x));
    let total = end.saturating_sub(1);
    if total == 0 {
        return Ok(Census { count: 0, total, unresolved: vec![] });
    }
    let prec = 96;
    let wi = rat_interval(w);
    let di = rat_interval(delta);
    let xs = c.xi_range(1, total, prec, true)?;
    let decide = |v: &Interval| {
        let s = v.mul(&wi);
        if s.certainly_lt(&di) {
            Some(true)
        } else if s.lo() >= di.hi() {
            Some(false)
        } else {
            None
        }
    };
    unresolved_error(census(total, xs, prec, |n, p| c.xi_tail_abs(n, p), decide)?)
}

/// `#{N ∈ [1, ηx) : ξ_N(|a|) > ξ_N(|b|)}`.
pub fn dominance_census(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    eta: &BigRational,
    x: &BigRational,
) -> Result<Census> {
    if a.is_empty() {
        return Err(Error::InvalidInput("the support of a must be infinite; a is empty".into()));
    }
    if a.field() != b.field() {
        return Err(Error::InvalidInput("a and b live in different fields".into()));
    }
    if !eta.is_positive() || eta > &BigRational::one() {
        return Err(Error::InvalidInput("η must lie in (0, 1]".into()));
    }
    let end = ceil_u64(&(eta * x));
    let total = end.saturating_sub(1);
    if total == 0 {
        return Ok(Census { count: 0, total, unresolved: vec![] });
    }
    let prec = 96;
    let xa = a.xi_range(1, total, prec, true)?;
    let xb = b.xi_range(1, total, prec, true)?;
    let diffs: Vec<Interval> = xa.iter().zip(&xb).map(|(p, q)| p.sub(q)).collect();
    let decide = |v: &Interval| {
        if v.lo().is_positive() {
            Some(true)
        } else if !v.hi().is_positive() {
            Some(false)
        } else {
            None
        }
    };
    let refine = |n: u64, p: u32| -> Result<Interval> { Ok(a.xi_tail_abs(n, p)?.sub(&b.xi_tail_abs(n, p)?)) };
    unresolved_error(census(total, diffs, prec, refine, decide)?)
}

/// Outcome of a witness scan: certificates found and the `u` without one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessScan {
    pub witnesses: Vec<NormWitness>,
    pub missing: Vec<u64>,
}

/// For each `u <= u_max`, the smallest `N <= N_max` with `u ξ_N(a+b)`
/// certainly in `(0, 1)` and `sup(u ξ_N) · (u max(1, S_{a+b}(N)))^(d-1) < 1`.
pub fn witness_scan(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    u_max: u64,
    n_max: u64,
    precision: u32,
) -> Result<WitnessScan> {
    if a.field() != b.field() {
        return Err(Error::InvalidInput("a and b live in different fields".into()));
    }
    if u_max == 0 || n_max == 0 {
        return Err(Error::InvalidInput("u_max and N_max must be positive".into()));
    }
    let field = a.field();
    let d = field.degree() as u64;
    let xa = a.xi_range(1, n_max, precision, false)?;
    let xb = b.xi_range(1, n_max, precision, false)?;
    let xi: Vec<Interval> = xa.iter().zip(&xb).map(|(p, q)| p.add(q)).collect();
    // S_{a+b}(N) = Σ_{n<N} house(a(n)+b(n))
    let mut s = vec![Interval::zero(); n_max as usize + 1];
    for n in 1..=n_max as usize {
        let mut h = s[n - 1].clone();
        if n >= 2 {
            let k = n as u64 - 1;
            let c = match (a.get(k), b.get(k)) {
                (Some(x), Some(y)) => Some(field.add(x, y)),
                (Some(x), None) | (None, Some(x)) => Some(x.clone()),
                (None, None) => None,
            };
            if let Some(c) = c {
                h = h.add(&field.house(&c, 64)?);
            }
        }
        s[n] = h;
    }
    let one = Interval::one();
    let found: Vec<(u64, Option<NormWitness>)> = (1..=u_max)
        .into_par_iter()
        .map(|u| {
            let ui = Interval::from_int(u as i64);
            for n in 1..=n_max {
                let v = xi[(n - 1) as usize].mul(&ui);
                if !v.lo().is_positive() || !v.certainly_lt(&one) {
                    continue;
                }
                let conj = if d == 1 {
                    one.clone()
                } else {
                    let base = s[n as usize].max(&one).mul(&ui);
                    base.powi(d - 1, 64)
                };
                if v.hi().mul(conj.hi()) < Dyadic::one() {
                    return (
                        u,
                        Some(NormWitness {
                            n,
                            u,
                            value_interval: v.to_decimal(),
                            conjugate_product: conj.to_decimal(),
                            conclusion: Conclusion::ContradictionDemonstrated,
                        }),
                    );
                }
            }
            (u, None)
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    for (u, w) in found {
        match w {
            Some(w) => witnesses.push(w),
            None => missing.push(u),
        }
    }
    Ok(WitnessScan { witnesses, missing })
}

pub fn witness_search(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    u_max: u64,
    n_max: u64,
    precision: u32,
) -> Result<Vec<NormWitness>> {
    let scan = witness_scan(a, b, u_max, n_max, precision)?;
    if !scan.missing.is_empty() {
        let first = scan.missing.iter().take(10).copied().collect();
        return Err(Error::NoWitnessFound { count: scan.missing.len(), first });
    }
    Ok(scan.witnesses)
}

/// `(R, R1, R2)` for `N ∈ [1, ηx)`, split at `j = x - N`.
pub fn r_decomposition_check(
    c: &CoefficientSequence,
    eta: &BigRational,
    x: &BigRational,
    z: &BigRational,
) -> Result<(Interval, Interval, Interval)> {
    if !eta.is_positive() || eta > &BigRational::one() || z.is_negative() {
        return Err(Error::InvalidInput("need 0 < η <= 1 and z >= 0".into()));
    }
    let end = ceil_u64(&(eta * x));
    let (zc, xc) = (ceil_u64(z), ceil_u64(x));
    let prec = STATS_PRECISION;
    let r = c.r_value(end, zc, prec)?;
    let (r1, r2) = c.r_split(end, xc, zc, prec)?;
    Ok((r, r1, r2))
}
