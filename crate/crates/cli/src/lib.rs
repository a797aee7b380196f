//! Command-line experiments: classification, sieving, sequence building,
//! tail statistics, criterion checks, norm witnesses, evaluation and digits.

pub mod config;
pub mod grammar;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use sparse_series::criterion::{
    check_theorem_main, check_theorem_prepared, check_theorem_rational, witness_scan, CriterionReport,
};
use sparse_series::field::AlgebraicField;
use sparse_series::interval::Interval;
use sparse_series::report::{render_report, ReportFormat};
use sparse_series::sequence::{ceil_u64, parse_rational, CoefficientSequence};
use sparse_series::series::{
    decade_checkpoints, digit_stream, evaluate_series, nonzero_digit_density, DigitExponent, DigitWeight,
};
use sparse_series::sieve::{required_horizon, sieve};
use sparse_series::{Error, Result};

use config::ExperimentConfig;

pub const THREADS_ENV: &str = "SPARSE_SERIES_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sparse-series", version, about = "Irrationality criteria experiments for sparse power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Configured {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ExperimentConfig,
}

impl Configured {
    fn resolve(self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(self.flags.over(file))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a base as Pisot, Salem or neither.
    Classify {
        /// Minimal polynomial, "c0,c1,...,cd" or an expression such as "x^3-x-1".
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        /// Accept a polynomial whose irreducibility cannot be certified.
        #[arg(long)]
        acknowledge_irreducible: bool,
    },
    /// Sieve an arithmetic function and report its value set below a bound.
    Sieve {
        /// sigma, phi, divisor_count, omega_distinct or omega_with_multiplicity.
        #[arg(long)]
        function: String,
        /// Bound x of the value set {f(n) < x}.
        #[arg(long)]
        limit: u64,
        /// Table horizon (default: the preimage policy for x).
        #[arg(long)]
        horizon: Option<u64>,
        /// Also report Σ_{n<=x} f(n)^k.
        #[arg(long)]
        summatory: Option<u32>,
        /// Report min φ(n) log log n / n over n < x.
        #[arg(long)]
        phi_bound: bool,
        /// Write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build a coefficient sequence and write it as JSONL.
    BuildSeq(Configured),
    /// Finite statistics N(x), S(x), R(q, ηx, z) of sequence a.
    Stats {
        #[command(flatten)]
        cfg: Configured,
        #[arg(long)]
        x: String,
        #[arg(long = "at-z", default_value = "1")]
        at_z: String,
    },
    /// Evaluate the criterion conditions along a checkpoint schedule.
    Check(Configured),
    /// Search norm witnesses u ξ_N for u <= u_max, N <= N_max.
    Witness(Configured),
    /// Enclose the series value q^-1 (ξ_1(a) + ξ_1(b)).
    Eval(Configured),
    /// Base-t digits of Σ f(m) t^-g(m).
    Digits {
        /// Integer base t >= 2.
        #[arg(long)]
        t: u64,
        /// Weight: a non-negative integer or a function name.
        #[arg(long, default_value = "1")]
        f: String,
        /// Exponent: power:k or sigma, phi.
        #[arg(long)]
        g: String,
        /// Number of digit positions P.
        #[arg(long)]
        limit: u64,
        /// ℓ of the density normalisation.
        #[arg(long, default_value_t = 1)]
        ell: u32,
        /// Write the digits in run-length form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line and returns the process exit code: 0 on a completed
/// run, 1 on usage errors, 2 on computational errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 1;
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        // a closed downstream pipe (e.g. `| head`) is not a failure
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::NoRealRootAboveOne
        | Error::ReducibleRejected(_)
        | Error::IrreducibilityUnconfirmed { .. }
        | Error::NonRationalField { .. } => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    // a pool configured earlier in the same process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Classify { minpoly, acknowledge_irreducible } => classify(&minpoly, acknowledge_irreducible),
        Command::Sieve { function, limit, horizon, summatory, phi_bound, csv } => {
            sieve_cmd(&function, limit, horizon, summatory, phi_bound, csv)
        }
        Command::BuildSeq(c) => build_seq(c.resolve()?),
        Command::Stats { cfg, x, at_z } => stats(cfg.resolve()?, &x, &at_z),
        Command::Check(c) => check(c.resolve()?),
        Command::Witness(c) => witness(c.resolve()?),
        Command::Eval(c) => eval(c.resolve()?),
        Command::Digits { t, f, g, limit, ell, out } => digits(t, &f, &g, limit, ell, out),
    }
}

fn interval_json(v: &Interval) -> Value {
    serde_json::to_value(v.to_decimal()).expect("decimal intervals serialise")
}

fn print_json(v: &Value) -> Result<()> {
    // serde_json objects keep keys sorted
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn emit(text: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn field_of(cfg: &ExperimentConfig) -> Result<Arc<AlgebraicField>> {
    grammar::parse_field(cfg.t, cfg.minpoly.as_deref(), cfg.acknowledge_irreducible.unwrap_or(false))
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::InvalidInput(format!("missing required --{flag}")))
}

fn classify(minpoly: &str, ack: bool) -> Result<()> {
    let field = grammar::parse_field(None, Some(minpoly), ack)?;
    let c = field.classification();
    let boxes = field.root_boxes();
    let principal = &boxes[field.principal_index()];
    print_json(&json!({
        "minpoly": field.minpoly().to_expression(),
        "degree": field.degree(),
        "kind": c.kind.to_string(),
        "margin": c.margin.as_ref().map(interval_json),
        "principal_root": interval_json(&principal.re),
        "max_conjugate_modulus": interval_json(&field.max_conjugate_modulus(64)?),
        "irreducibility": field.irreducibility_note(),
    }))
}

fn sieve_cmd(
    function: &str,
    limit: u64,
    horizon: Option<u64>,
    summatory: Option<u32>,
    phi_bound: bool,
    csv: Option<PathBuf>,
) -> Result<()> {
    let f = grammar::parse_function(function)?;
    let h = match horizon {
        Some(h) => h,
        None => required_horizon(f, limit).unwrap_or(limit.max(2)),
    };
    let table = sieve(f, h)?;
    let mut out = serde_json::Map::new();
    out.insert("function".into(), json!(f.name()));
    out.insert("horizon".into(), json!(h));
    if required_horizon(f, limit).is_ok() {
        let vs = table.value_set_count(limit)?;
        let mut witnesses = vs.witnesses.clone();
        let truncated = vs.truncated || witnesses.len() > 1000;
        witnesses.truncate(1000);
        out.insert(
            "value_set".into(),
            json!({"x": vs.x, "count": vs.count, "values": witnesses, "truncated": truncated}),
        );
    }
    if let Some(k) = summatory {
        out.insert("summatory".into(), json!({"k": k, "x": limit, "value": table.summatory(k, limit)?.to_string()}));
    }
    if phi_bound {
        let b = table.phi_lower_bound_check(limit)?;
        out.insert("phi_lower_bound".into(), json!({"min": interval_json(&b.min), "argmin": b.argmin}));
    }
    if let Some(path) = csv {
        table.write_csv(BufWriter::new(File::create(path)?))?;
    }
    print_json(&Value::Object(out))
}

fn sequence(cfg: &ExperimentConfig, which: &str, field: &Arc<AlgebraicField>, horizon: u64) -> Result<CoefficientSequence> {
    let s = match which {
        "a" => required(&cfg.a, "a")?.as_str(),
        _ => cfg.b.as_deref().unwrap_or("zero"),
    };
    grammar::build_sequence(s, field, horizon)
}

fn seq_summary(s: &CoefficientSequence) -> Value {
    json!({
        "generator": s.generator(),
        "horizon": s.horizon(),
        "support_count": s.coefs().len(),
        "majorant": s.tail().to_json(),
        "obligations": s.obligations(),
    })
}

fn build_seq(cfg: ExperimentConfig) -> Result<()> {
    let field = field_of(&cfg)?;
    let h = *required(&cfg.horizon, "horizon")?;
    let seq = sequence(&cfg, "a", &field, h)?;
    let out = required(&cfg.out, "out")?;
    let mut w = BufWriter::new(File::create(out)?);
    seq.write_jsonl(&mut w)?;
    w.flush()?;
    print_json(&seq_summary(&seq))
}

fn stats(cfg: ExperimentConfig, x: &str, z: &str) -> Result<()> {
    let field = field_of(&cfg)?;
    let x = parse_rational(x)?;
    let z = parse_rational(z)?;
    let eta = cfg.eta.as_deref().map(parse_rational).transpose()?.unwrap_or_else(half);
    let h = cfg.horizon.unwrap_or(ceil_u64(&x) + 1);
    let seq = sequence(&cfg, "a", &field, h)?;
    let s = seq.stats(&x, &z, &eta)?;
    print_json(&json!({
        "x": s.x.to_string(),
        "z": s.z.to_string(),
        "eta": s.eta.to_string(),
        "n_count": s.n_count,
        "s_value": interval_json(&s.s_value),
        "r_value": interval_json(&s.r_value),
        "sequence": seq_summary(&seq),
    }))
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Runs the configured criterion check and returns the report.
pub fn check_report(cfg: &ExperimentConfig) -> Result<CriterionReport> {
    let field = field_of(cfg)?;
    let mut schedule = grammar::parse_schedule(required(&cfg.schedule, "schedule")?)?;
    if let Some(z) = &cfg.z {
        schedule.z = grammar::parse_z(z)?;
    }
    if let Some(y) = &cfg.y {
        schedule.y = grammar::parse_y(y)?;
    }
    if let Some(e) = &cfg.eta {
        schedule.eta = grammar::parse_positive_rational("η", e)?;
    }
    if let Some(d) = &cfg.delta {
        schedule.delta = Some(parse_rational(d)?);
    }
    if let Some(l) = &cfg.l {
        schedule.l = Some(parse_rational(l)?);
    }
    if let Some(c) = &cfg.cap {
        schedule.cap = grammar::parse_positive_rational("cap", c)?;
    }
    schedule.validate()?;
    let h = cfg.horizon.unwrap_or(ceil_u64(schedule.max_point()) + 1);
    let a = sequence(cfg, "a", &field, h)?;
    let b = sequence(cfg, "b", &field, h)?;
    match cfg.theorem.as_deref().unwrap_or("main") {
        "main" => check_theorem_main(&a, &b, &schedule),
        "prepared" => check_theorem_prepared(&a, &b, &schedule),
        "rational" => {
            let t = cfg.t.ok_or_else(|| Error::InvalidInput("--theorem rational needs --t".into()))?;
            check_theorem_rational(t, &a, &b, &schedule)
        }
        other => Err(Error::InvalidInput(format!("unknown theorem '{other}'; expected main, prepared or rational"))),
    }
}

fn format_of(cfg: &ExperimentConfig) -> Result<ReportFormat> {
    cfg.format.as_deref().unwrap_or("json").parse()
}

fn check(cfg: ExperimentConfig) -> Result<()> {
    let format = format_of(&cfg)?;
    let report = check_report(&cfg)?;
    emit(&render_report(&report, format)?, cfg.out.as_deref())?;
    let verdicts: Vec<String> = report.rows.iter().map(|r| format!("{}={}", r.condition_id, r.verdict)).collect();
    eprintln!("{}", verdicts.join(" "));
    Ok(())
}

fn witness(cfg: ExperimentConfig) -> Result<()> {
    let format = format_of(&cfg)?;
    let field = field_of(&cfg)?;
    let u_max = *required(&cfg.u_max, "u-max")?;
    let n_max = *required(&cfg.n_max, "n-max")?;
    let prec = cfg.precision.unwrap_or(128);
    let h = cfg.horizon.unwrap_or(n_max + prec as u64 + 64);
    let a = sequence(&cfg, "a", &field, h)?;
    let b = sequence(&cfg, "b", &field, h)?;
    let scan = witness_scan(&a, &b, u_max, n_max, prec)?;
    let mut report = CriterionReport::empty();
    let m = &mut report.metadata;
    m.theorem = "witness".into();
    m.minpoly = field.minpoly().to_expression();
    m.degree = field.degree() as u64;
    m.base_kind = field.classification().kind.to_string();
    m.a = a.generator().into();
    m.b = b.generator().into();
    m.horizon_a = a.horizon();
    m.horizon_b = b.horizon();
    m.notes.push(format!("u <= {u_max}, N <= {n_max}, precision {prec}"));
    if !scan.missing.is_empty() {
        m.notes.push(format!("{} values of u without a witness", scan.missing.len()));
    }
    report.witnesses = scan.witnesses;
    emit(&render_report(&report, format)?, cfg.out.as_deref())?;
    if !scan.missing.is_empty() {
        let first = scan.missing.iter().take(10).copied().collect();
        return Err(Error::NoWitnessFound { count: scan.missing.len(), first });
    }
    Ok(())
}

fn eval(cfg: ExperimentConfig) -> Result<()> {
    let field = field_of(&cfg)?;
    let prec = cfg.precision.unwrap_or(128);
    let h = cfg.horizon.unwrap_or(prec as u64 * 2 + 64);
    let a = sequence(&cfg, "a", &field, h)?;
    let b = sequence(&cfg, "b", &field, h)?;
    let v = evaluate_series(&a, &b, prec)?;
    print_json(&json!({
        "precision": prec,
        "value": interval_json(&v),
        "a": seq_summary(&a),
        "b": seq_summary(&b),
    }))
}

fn digits(t: u64, f: &str, g: &str, limit: u64, ell: u32, out: Option<PathBuf>) -> Result<()> {
    let (gtab, exponent_power) = match g.split_once(':') {
        Some(("power", k)) => {
            let k: u32 = k.parse().map_err(|_| Error::InvalidInput(format!("bad power '{k}'")))?;
            (None, Some(k))
        }
        _ => {
            let gf = grammar::parse_function(g)?;
            (Some(sieve(gf, required_horizon(gf, limit + 1)?)?), None)
        }
    };
    let weight_horizon = match (&gtab, exponent_power) {
        (Some(tab), _) => tab.horizon(),
        (None, Some(k)) => {
            let root = BigInt::from(limit).nth_root(k.max(1));
            root.to_string().parse::<u64>().unwrap_or(limit) + 2
        }
        (None, None) => unreachable!(),
    };
    let ftab = match f.parse::<u64>() {
        Ok(_) => None,
        Err(_) => Some(sieve(grammar::parse_function(f)?, weight_horizon)?),
    };
    let weight = match (&ftab, f.parse::<u64>()) {
        (Some(tab), _) => DigitWeight::Table(tab),
        (None, Ok(c)) => DigitWeight::Constant(c),
        (None, Err(_)) => unreachable!(),
    };
    let exponent = match (&gtab, exponent_power) {
        (Some(tab), _) => DigitExponent::Table(tab),
        (None, Some(k)) => DigitExponent::Power(k),
        (None, None) => unreachable!(),
    };
    let stream = digit_stream(weight, exponent, t, limit)?;
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        stream.write_rle(&mut w)?;
        w.flush()?;
    }
    let density: Vec<Value> = nonzero_digit_density(&stream, ell, &decade_checkpoints(limit))
        .into_iter()
        .map(|r| json!({"x": r.x, "count": r.count, "normalized": format!("{:.6e}", r.normalized)}))
        .collect();
    print_json(&json!({
        "t": t,
        "positions": limit,
        "nonzero_digits": stream.nonzero_positions.len(),
        "carry_count": stream.carry_count,
        "carry_overflow": stream.carry_overflow.to_string(),
        "reliable_limit": stream.reliable_limit,
        "density": density,
    }))
}
