//! Text grammars for bases, sequences and checkpoint schedules.

use std::fs::File;
use std::io::BufReader;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use sparse_series::criterion::{CheckpointSchedule, YSpec, ZSpec};
use sparse_series::field::{build_field, AlgebraicField, FieldOptions};
use sparse_series::poly::MonicIntPolynomial;
use sparse_series::sequence::{
    fiber_sequence, parse_rational, power_support, sumset, CoefficientSequence, FiberWeight, SupportSet,
};
use sparse_series::sieve::{required_horizon, sieve, ArithFunction};
use sparse_series::{Error, Result};

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Field from `--t` or `--minpoly`; exactly one must be given.
pub fn parse_field(t: Option<i64>, minpoly: Option<&str>, acknowledge: bool) -> Result<Arc<AlgebraicField>> {
    let poly = match (t, minpoly) {
        (Some(t), None) => {
            if t < 2 {
                return Err(usage(format!("--t must be at least 2, got {t}")));
            }
            MonicIntPolynomial::from_i64(&[-t, 1])?
        }
        (None, Some(p)) => MonicIntPolynomial::parse(p)?,
        (Some(_), Some(_)) => return Err(usage("give either --t or --minpoly, not both")),
        (None, None) => return Err(usage("a base is required: pass --t <int> or --minpoly <poly>")),
    };
    let options = FieldOptions { acknowledge_irreducible: acknowledge, ..FieldOptions::default() };
    Ok(Arc::new(build_field(poly, options)?))
}

pub fn parse_function(name: &str) -> Result<ArithFunction> {
    name.parse().map_err(|_| usage(format!("unknown arithmetic function '{name}'")))
}

/// Builds a sequence from its description:
/// `zero`, `ones`, `indicator:n1,n2,...`, `power:α`, `sumset:α+β`,
/// `fiber:g[:w]` (g in sigma, phi; w an integer or function name), `file:path`.
pub fn build_sequence(spec: &str, field: &Arc<AlgebraicField>, horizon: u64) -> Result<CoefficientSequence> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "zero" => Ok(CoefficientSequence::zero(field.clone(), horizon)),
        "ones" => CoefficientSequence::ones(field.clone(), horizon),
        "indicator" => {
            let elems = arg
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u64>().map_err(|_| usage(format!("bad index '{s}' in {spec}"))))
                .collect::<Result<Vec<_>>>()?;
            if let Some(&e) = elems.iter().find(|&&e| e == 0 || e >= horizon) {
                return Err(usage(format!("index {e} must lie in [1, {horizon})")));
            }
            CoefficientSequence::indicator(field.clone(), &SupportSet::new(elems, horizon, arg), false)
        }
        "power" => {
            let alpha = parse_rational(arg)?;
            CoefficientSequence::indicator(field.clone(), &power_support(&alpha, horizon)?, true)
        }
        "sumset" => {
            let (x, y) = arg.split_once('+').ok_or_else(|| usage(format!("expected sumset:α+β, got {spec}")))?;
            let a = power_support(&parse_rational(x)?, horizon)?;
            let b = power_support(&parse_rational(y)?, horizon)?;
            CoefficientSequence::indicator(field.clone(), &sumset(&a, &b, horizon)?, true)
        }
        "fiber" => {
            let (g, w) = arg.split_once(':').unwrap_or((arg, "1"));
            let g = parse_function(g)?;
            let sieve_h = required_horizon(g, horizon)?;
            let gt = sieve(g, sieve_h)?;
            match w.parse::<u64>() {
                Ok(c) => fiber_sequence(field.clone(), FiberWeight::Constant(c), &gt, horizon),
                Err(_) => {
                    let ft = sieve(parse_function(w)?, sieve_h)?;
                    fiber_sequence(field.clone(), FiberWeight::Table(&ft), &gt, horizon)
                }
            }
        }
        "file" => {
            let seq = CoefficientSequence::read_jsonl(BufReader::new(File::open(arg)?), field.clone())?;
            Ok(seq)
        }
        _ => Err(usage(format!(
            "unknown sequence '{spec}'; expected zero, ones, indicator:..., power:α, sumset:α+β, fiber:g[:w] or file:path"
        ))),
    }
}

/// `geometric:start:end[:ratio]` (ratio defaults to 10) or `list:x1,x2,...`.
pub fn parse_schedule(spec: &str) -> Result<CheckpointSchedule> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["geometric", s, e] => CheckpointSchedule::geometric(
            &parse_rational(s)?,
            &parse_rational(e)?,
            &BigRational::from_integer(10.into()),
        ),
        ["geometric", s, e, r] => {
            CheckpointSchedule::geometric(&parse_rational(s)?, &parse_rational(e)?, &parse_rational(r)?)
        }
        ["list", xs] => CheckpointSchedule::new(parse_list(xs)?),
        _ => Err(usage(format!("unknown schedule '{spec}'; expected geometric:start:end[:ratio] or list:x1,x2,..."))),
    }
}

fn parse_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',').map(|v| parse_rational(v.trim())).collect()
}

/// `sqrt-u`, `loglog:δ`, `powerlog:e:k` or `values:z1,z2,...`.
pub fn parse_z(spec: &str) -> Result<ZSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["sqrt-u"] => Ok(ZSpec::SqrtU),
        ["loglog", d] => Ok(ZSpec::LogLog { delta: parse_rational(d)? }),
        ["powerlog", e, k] => Ok(ZSpec::PowerLog {
            exponent: parse_rational(e)?,
            log_power: k.parse().map_err(|_| usage(format!("bad log power '{k}'")))?,
        }),
        ["values", v] => Ok(ZSpec::Values(parse_list(v)?)),
        _ => Err(usage(format!("unknown z rule '{spec}'; expected sqrt-u, loglog:δ, powerlog:e:k or values:..."))),
    }
}

/// `x` or `values:y1,y2,...`.
pub fn parse_y(spec: &str) -> Result<YSpec> {
    match spec.split_once(':') {
        None if spec == "x" => Ok(YSpec::EqualX),
        Some(("values", v)) => Ok(YSpec::Values(parse_list(v)?)),
        _ => Err(usage(format!("unknown y rule '{spec}'; expected x or values:..."))),
    }
}

pub fn parse_positive_rational(name: &str, s: &str) -> Result<BigRational> {
    let v = parse_rational(s)?;
    if v <= BigRational::from_integer(0.into()) {
        return Err(usage(format!("{name} must be positive, got {s}")));
    }
    Ok(v)
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparse_series::field::rational_field;

    #[test]
    fn sequences() {
        let f = Arc::new(rational_field(2).unwrap());
        assert!(build_sequence("zero", &f, 10).unwrap().is_empty());
        assert_eq!(build_sequence("ones", &f, 10).unwrap().coefs().len(), 9);
        assert_eq!(build_sequence("indicator:1,5", &f, 10).unwrap().coefs().len(), 2);
        assert!(build_sequence("indicator:0", &f, 10).is_err());
        assert_eq!(build_sequence("power:3", &f, 1001).unwrap().coefs().len(), 10);
        assert!(build_sequence("sumset:2+3", &f, 100).unwrap().get(9).is_some());
        let fib = build_sequence("fiber:sigma", &f, 20).unwrap();
        // σ(m) = 12 for m = 6, 11
        assert_eq!(fib.get(12).unwrap().as_integer().unwrap(), &2.into());
        let w = build_sequence("fiber:sigma:phi", &f, 20).unwrap();
        assert_eq!(w.get(12).unwrap().as_integer().unwrap(), &12.into());
        assert!(build_sequence("bogus", &f, 10).is_err());
    }

    #[test]
    fn schedules() {
        let s = parse_schedule("geometric:1e3:1e6").unwrap();
        assert_eq!(s.points.len(), 4);
        assert_eq!(parse_schedule("geometric:1:16:2").unwrap().points.len(), 5);
        assert_eq!(parse_schedule("list:10,20").unwrap().points.len(), 2);
        assert!(parse_schedule("linear:1:2").is_err());
        assert_eq!(parse_z("sqrt-u").unwrap(), ZSpec::SqrtU);
        assert!(matches!(parse_z("powerlog:1/2:1").unwrap(), ZSpec::PowerLog { log_power: 1, .. }));
        assert_eq!(parse_y("x").unwrap(), YSpec::EqualX);
    }
}
