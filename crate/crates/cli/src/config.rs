//! Experiment configuration: a JSON file whose values command-line flags override.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sparse_series::{Error, Result};

/// Every key is optional; unknown keys are rejected.
///
/// ```json
/// {"t": 2, "a": "fiber:sigma", "b": "zero", "schedule": "geometric:1e3:1e6",
///  "z": "sqrt-u", "theorem": "rational", "format": "json", "out": "report.json"}
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Integer base t >= 2 (the field Q).
    #[arg(long)]
    pub t: Option<i64>,
    /// Minimal polynomial, "c0,c1,...,cd" or an expression such as "x^2-2*x-1".
    #[arg(long, allow_hyphen_values = true)]
    pub minpoly: Option<String>,
    /// Accept a minimal polynomial whose irreducibility cannot be certified.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub acknowledge_irreducible: Option<bool>,
    /// Sequence a: zero, ones, indicator:..., power:α, sumset:α+β, fiber:g[:w], file:path.
    #[arg(long)]
    pub a: Option<String>,
    /// Sequence b (default zero).
    #[arg(long)]
    pub b: Option<String>,
    /// Sequence horizon H; coefficients are stored for n < H.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Checkpoints: geometric:start:end[:ratio] or list:x1,x2,...
    #[arg(long)]
    pub schedule: Option<String>,
    /// z rule: sqrt-u, loglog:δ, powerlog:e:k or values:z1,...
    #[arg(long)]
    pub z: Option<String>,
    /// y rule: x or values:y1,...
    #[arg(long)]
    pub y: Option<String>,
    /// η in (0, 1] for the R statistic (default 1/2).
    #[arg(long)]
    pub eta: Option<String>,
    /// Interlacing ratio Δ > 1.
    #[arg(long)]
    pub delta: Option<String>,
    /// Interlacing threshold L > 1.
    #[arg(long)]
    pub l: Option<String>,
    /// Cap of the bounded-ratio rule.
    #[arg(long)]
    pub cap: Option<String>,
    /// main, prepared or rational.
    #[arg(long)]
    pub theorem: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<String>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Largest multiplier u scanned by the witness search.
    #[arg(long)]
    pub u_max: Option<u64>,
    /// Largest tail index N scanned by the witness search.
    #[arg(long)]
    pub n_max: Option<u64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        ExperimentConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Values set in `self` win over those in `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        let top = self;
        overlay!(
            base, top, t, minpoly, acknowledge_irreducible, a, b, horizon, schedule, z, y, eta, delta, l, cap,
            theorem, format, out, precision, u_max, n_max
        )
    }
}
