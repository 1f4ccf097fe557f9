//! Command-line front end. Each subcommand resolves a [`RunConfig`] (flags
//! layered over an optional TOML/JSON config file), runs one computation and
//! writes a single CSV or JSON file.
//!
//! JSON output has the shape `{"config": .., "result": ..}`; the `config`
//! part is the fully resolved run and can be fed back through `--config`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coherent::{
    coherent_data_for, plane_cs_frame_check, spin_resolution_check, FRAME_TOLERANCE,
};
use crate::dist::{
    cn, moments, pmf, pmf_closed, pmf_float, pmf_float_closed, wigner_limit_probe, Binning, Eta,
};
use crate::error::Error;
use crate::model::{build_model, sigma0_check, GeneratingFamily, SeedSeries, DEFAULT_ORDER};
use crate::qpoly::q_polynomials;
use crate::series::{int, Rational};
use crate::structure::{entropy_scan, leibniz_residuals};

pub const OUT_DIR_ENV: &str = "SYMBINOM_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "symbinom",
    version,
    about = "Symmetric deformed binomial distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Seed coefficients a_n, x_n and x_n!.
    Model(Args),
    /// Coefficients of q_0 .. q_n.
    Qpoly(Args),
    /// Probabilities p_k for k = 0..n.
    Pmf(Args),
    /// Mean, variance and c_n.
    Moments(Args),
    /// Leibniz triangle-rule residuals up to n.
    Leibniz(Args),
    /// Boltzmann-Gibbs and Tsallis entropies over a range of n.
    Entropy(Args),
    /// Rescaled distribution against the semicircle law.
    Limit(Args),
    /// Deformed factorials and frame checks for the coherent states.
    Coherent(Args),
}

impl CommandArgs {
    fn split(self) -> (Command, Args) {
        match self {
            Self::Model(a) => (Command::Model, a),
            Self::Qpoly(a) => (Command::Qpoly, a),
            Self::Pmf(a) => (Command::Pmf, a),
            Self::Moments(a) => (Command::Moments, a),
            Self::Leibniz(a) => (Command::Leibniz, a),
            Self::Entropy(a) => (Command::Entropy, a),
            Self::Limit(a) => (Command::Limit, a),
            Self::Coherent(a) => (Command::Coherent, a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Model,
    Qpoly,
    Pmf,
    Moments,
    Leibniz,
    Entropy,
    Limit,
    Coherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BinningArg {
    #[default]
    Cell,
    Point,
}

#[derive(clap::Args, Debug, Default, Clone)]
pub struct Args {
    /// TOML or JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// exp | qexp | abel | hermite | custom
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter alpha as an integer or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Hermite parameter a as an integer or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Custom seed file with lines `n a_num a_den`.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    /// Truncation order of the power series.
    #[arg(long)]
    pub order: Option<usize>,
    /// A single n, a range `a..b`, or a list `a,b,c`.
    #[arg(long)]
    pub n: Option<String>,
    /// p/q for exact mode, a decimal for float mode.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Tsallis indices, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Histogram bins for `limit`.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum)]
    pub binning: Option<BinningArg>,
    /// Output file; defaults to `$SYMBINOM_OUT_DIR/<command>.<format>`, else stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// The serializable run description. Every field is optional in input; the
/// echoed copy in JSON output has all applicable fields filled.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    /// Custom seed `a_1, a_2, ..` as rational strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binning: Option<BinningArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// A config file may hold a bare [`RunConfig`] or a previous JSON output.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigDoc {
    Wrapped { config: RunConfig },
    Bare(RunConfig),
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit(_) | Error::NonConvergent(_) => EXIT_INTERNAL,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Integer or `p/q`; decimals are rejected so that parameters stay exact.
pub fn parse_rational(field: &str, s: &str) -> CliResult<Rational> {
    let s = s.trim();
    if s.contains(['.', 'e', 'E']) {
        return Err(CliError::validation(format!(
            "--{field}: `{s}` is a decimal; give an integer or p/q"
        )));
    }
    s.parse::<Rational>()
        .map_err(|e| CliError::validation(format!("--{field}: cannot parse `{s}`: {e}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NSpec {
    Single(usize),
    Range(usize, usize),
    List(Vec<usize>),
}

impl NSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        let bad = |why: &str| CliError::validation(format!("--n `{s}`: {why}"));
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| bad("not a nonnegative integer"))
        };
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad("empty range"));
            }
            Ok(Self::Range(a, b))
        } else if s.contains(',') {
            Ok(Self::List(s.split(',').map(num).collect::<CliResult<_>>()?))
        } else {
            Ok(Self::Single(num(s)?))
        }
    }

    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::Single(n) => vec![*n],
            Self::Range(a, b) => (*a..=*b).collect(),
            Self::List(v) => v.clone(),
        }
    }

    pub fn max(&self) -> usize {
        self.values().into_iter().max().unwrap_or(0)
    }

    fn single(&self, cmd: Command) -> CliResult<usize> {
        match self {
            Self::Single(n) => Ok(*n),
            _ => Err(CliError::validation(format!(
                "{} takes a single --n",
                command_name(cmd)
            ))),
        }
    }
}

/// Reads a custom seed file: lines `n a_num a_den`, `#` comments, missing
/// indices zero.
pub fn read_custom_seed(path: &Path) -> CliResult<Vec<Rational>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("--custom {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad =
            |why: &str| CliError::validation(format!("{}:{}: {why}", path.display(), lineno + 1));
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad("expected `n a_num a_den`"));
        }
        let n: usize = parts[0].parse().map_err(|_| bad("bad index"))?;
        let num: num_bigint::BigInt = parts[1].parse().map_err(|_| bad("bad numerator"))?;
        let den: num_bigint::BigInt = parts[2].parse().map_err(|_| bad("bad denominator"))?;
        if n == 0 {
            return Err(bad("indices start at 1"));
        }
        if den == num_bigint::BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        entries.push((n, Rational::new(num, den)));
    }
    let len = entries.iter().map(|(n, _)| *n).max().unwrap_or(0);
    let mut seed = vec![int(0); len];
    for (n, v) in entries {
        seed[n - 1] = v;
    }
    Ok(seed)
}

fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("--config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let doc: ConfigDoc = if is_json {
        serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("--config {}: {e}", path.display())))?
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("--config {}: {e}", path.display())))?
    };
    Ok(match doc {
        ConfigDoc::Wrapped { config } => config,
        ConfigDoc::Bare(c) => c,
    })
}

/// A run with every field resolved and validated.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub command: Command,
    pub family: GeneratingFamily,
    pub order: usize,
    pub n: NSpec,
    pub eta: Option<Eta>,
    pub q: Vec<f64>,
    pub mode: Mode,
    pub bins: usize,
    pub binning: Binning,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub echo: RunConfig,
}

fn command_name(cmd: Command) -> &'static str {
    match cmd {
        Command::Model => "model",
        Command::Qpoly => "qpoly",
        Command::Pmf => "pmf",
        Command::Moments => "moments",
        Command::Leibniz => "leibniz",
        Command::Entropy => "entropy",
        Command::Limit => "limit",
        Command::Coherent => "coherent",
    }
}

fn resolve(command: Command, args: Args) -> CliResult<Resolved> {
    let base = match &args.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = base.command {
        if c != command {
            return Err(CliError::validation(format!(
                "config is for `{}`, but `{}` was invoked",
                command_name(c),
                command_name(command)
            )));
        }
    }
    let seed_from_file = args.custom.as_deref().map(read_custom_seed).transpose()?;
    let family_name = args.family.or(base.family).unwrap_or_else(|| {
        if seed_from_file.is_some() {
            "custom"
        } else {
            "exp"
        }
        .into()
    });
    let alpha = args.alpha.or(base.alpha);
    let a = args.a.or(base.a);
    let seed_strings = base.seed;

    let (family, echo_alpha, echo_a, echo_seed) = match family_name.as_str() {
        "exp" | "exponential" => (GeneratingFamily::Exponential, None, None, None),
        "qexp" | "abel" => {
            let s = alpha.ok_or_else(|| {
                CliError::validation(format!("family {family_name} needs --alpha"))
            })?;
            let v = parse_rational("alpha", &s)?;
            let fam = if family_name == "qexp" {
                GeneratingFamily::QExponential(v.clone())
            } else {
                GeneratingFamily::AbelLambert(v.clone())
            };
            (fam, Some(v.to_string()), None, None)
        }
        "hermite" => {
            let s = a.ok_or_else(|| CliError::validation("family hermite needs --a"))?;
            let v = parse_rational("a", &s)?;
            (
                GeneratingFamily::HermiteGauss(v.clone()),
                None,
                Some(v.to_string()),
                None,
            )
        }
        "custom" => {
            let seed = match (seed_from_file, seed_strings) {
                (Some(s), _) => s,
                (None, Some(strings)) => strings
                    .iter()
                    .map(|s| parse_rational("seed", s))
                    .collect::<CliResult<_>>()?,
                (None, None) => {
                    return Err(CliError::validation("family custom needs --custom FILE"))
                }
            };
            let strings = seed.iter().map(|r| r.to_string()).collect();
            let seed = SeedSeries::new(seed);
            let report = sigma0_check(&seed);
            if !report.accepted {
                return Err(CliError::validation(format!(
                    "custom seed: {}",
                    report.reason
                )));
            }
            (GeneratingFamily::Custom(seed), None, None, Some(strings))
        }
        other => {
            return Err(CliError::validation(format!(
                "--family `{other}`: expected exp, qexp, abel, hermite or custom"
            )))
        }
    };
    family.validate()?;

    let order = args.order.or(base.order).unwrap_or(DEFAULT_ORDER);
    if order < 2 {
        return Err(CliError::validation("--order must be at least 2"));
    }
    let n_text = args.n.or(base.n).or_else(|| {
        matches!(command, Command::Model | Command::Qpoly).then(|| order.min(10).to_string())
    });
    let n_text = n_text
        .ok_or_else(|| CliError::validation(format!("{} needs --n", command_name(command))))?;
    let n = NSpec::parse(&n_text)?;

    let eta_text = args.eta.or(base.eta);
    let eta = eta_text
        .as_deref()
        .map(|s| s.parse::<Eta>().map_err(CliError::from))
        .transpose()?;
    let mode = match (args.mode.or(base.mode), &eta) {
        (Some(Mode::Exact), Some(Eta::Float(x))) => {
            return Err(CliError::validation(format!(
                "exact mode needs a rational eta such as 1/2, got {x}"
            )))
        }
        (Some(m), _) => m,
        (None, Some(Eta::Float(_))) => Mode::Float,
        (None, _) => match command {
            Command::Entropy | Command::Limit => Mode::Float,
            _ => Mode::Exact,
        },
    };
    let q = args.q.or(base.q).unwrap_or_default();
    let bins = args.bins.or(base.bins).unwrap_or(crate::dist::DEFAULT_BINS);
    let binning_arg = args.binning.or(base.binning).unwrap_or_default();
    let binning = match binning_arg {
        BinningArg::Cell => Binning::LatticeCell,
        BinningArg::Point => Binning::PointMass,
    };
    let format = args.format.or(base.format).unwrap_or_default();

    let uses_eta = !matches!(
        command,
        Command::Model | Command::Qpoly | Command::Limit | Command::Coherent
    );
    let uses_q = command == Command::Entropy;
    let uses_bins = command == Command::Limit;
    let echo = RunConfig {
        command: Some(command),
        family: Some(family.name().to_string()),
        alpha: echo_alpha,
        a: echo_a,
        seed: echo_seed,
        order: Some(order),
        n: Some(n_text),
        eta: if uses_eta { eta_text } else { None },
        q: uses_q.then(|| q.clone()),
        mode: Some(mode),
        bins: uses_bins.then_some(bins),
        binning: uses_bins.then_some(binning_arg),
        format: Some(format),
    };
    let output = args.output.or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            PathBuf::from(dir).join(format!("{}.{ext}", command_name(command)))
        })
    });

    Ok(Resolved {
        command,
        family,
        order,
        n,
        eta,
        q,
        mode,
        bins,
        binning,
        format,
        output,
        echo,
    })
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Tabular result plus its JSON rendering.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub extra: Value,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            extra: Value::Null,
        }
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.header
                            .iter()
                            .cloned()
                            .zip(r.iter().map(|c| Value::String(c.clone())))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

fn need_eta(r: &Resolved) -> CliResult<&Eta> {
    r.eta
        .as_ref()
        .ok_or_else(|| CliError::validation(format!("{} needs --eta", command_name(r.command))))
}

fn exact_eta(r: &Resolved) -> CliResult<Rational> {
    match need_eta(r)? {
        Eta::Exact(e) => Ok(e.clone()),
        Eta::Float(x) => Err(CliError::validation(format!(
            "{} needs a rational eta such as 1/2, got {x}",
            command_name(r.command)
        ))),
    }
}

fn model_order(r: &Resolved) -> usize {
    r.order.max(r.n.max())
}

fn cmd_model(r: &Resolved) -> CliResult<Table> {
    let n = r.n.max();
    let m = build_model(r.family.clone(), r.order)?;
    m.check_n(n)?;
    let mut t = Table::new(&["n", "a_n", "x_n", "xfact_n"]);
    for k in 0..=n {
        let a = if k == 0 { int(0) } else { m.a(k) };
        t.rows.push(vec![
            k.to_string(),
            a.to_string(),
            m.x(k).to_string(),
            m.xfact(k).to_string(),
        ]);
    }
    let s0 = sigma0_check(m.seed());
    t.extra = json!({ "sigma0": { "accepted": s0.accepted, "reason": s0.reason } });
    Ok(t)
}

fn cmd_qpoly(r: &Resolved) -> CliResult<Table> {
    let n = r.n.max();
    let qf = q_polynomials(&build_model(r.family.clone(), r.order)?);
    qf.model().check_n(n)?;
    let mut t = Table::new(&["n", "coefficients"]);
    for k in 0..=n {
        let coeffs: Vec<String> = qf.q(k).coeffs().iter().map(|c| c.to_string()).collect();
        t.rows.push(vec![k.to_string(), coeffs.join(" ")]);
    }
    Ok(t)
}

fn cmd_pmf(r: &Resolved) -> CliResult<Table> {
    let n = r.n.single(r.command)?;
    let eta = need_eta(r)?;
    let table = match (r.mode, eta) {
        (Mode::Exact, Eta::Exact(e)) => {
            if n <= r.order {
                pmf(
                    &q_polynomials(&build_model(r.family.clone(), r.order)?),
                    n,
                    e,
                )?
            } else {
                pmf_closed(&r.family, n, e)?
            }
        }
        (Mode::Exact, Eta::Float(_)) => unreachable!("rejected during resolution"),
        (Mode::Float, eta) => {
            let x = eta.to_f64();
            if r.family.is_named() {
                pmf_float_closed(&r.family, n, x)?
            } else {
                pmf_float(
                    &q_polynomials(&build_model(r.family.clone(), r.order)?),
                    n,
                    x,
                )?
            }
        }
    };
    let mut t = Table::new(&["k", "p"]);
    match table.exact() {
        Some(p) => {
            t.rows = p
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), v.to_string()])
                .collect()
        }
        None => {
            t.rows = table
                .to_f64()
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), fmt_f64(*v)])
                .collect()
        }
    }
    Ok(t)
}

fn cmd_moments(r: &Resolved) -> CliResult<Table> {
    let mut t = Table::new(&["n", "eta", "mean", "variance", "c_n"]);
    match r.mode {
        Mode::Exact => {
            let eta = exact_eta(r)?;
            let qf = q_polynomials(&build_model(r.family.clone(), model_order(r))?);
            for n in r.n.values() {
                let m = moments(&qf, n, &eta)?;
                t.rows.push(vec![
                    n.to_string(),
                    eta.to_string(),
                    m.mean.to_string(),
                    m.variance.to_string(),
                    m.c_n.to_string(),
                ]);
            }
        }
        Mode::Float => {
            let x = need_eta(r)?.to_f64();
            let qf = (!r.family.is_named())
                .then(|| build_model(r.family.clone(), model_order(r)).map(|m| q_polynomials(&m)))
                .transpose()?;
            for n in r.n.values() {
                let table = match &qf {
                    None => pmf_float_closed(&r.family, n, x)?,
                    Some(qf) => pmf_float(qf, n, x)?,
                };
                let fm = table.float_moments();
                let w = x * (1.0 - x);
                let c = if w > 0.0 {
                    (n * n) as f64 - fm.variance / w
                } else {
                    f64::NAN
                };
                t.rows.push(vec![
                    n.to_string(),
                    fmt_f64(x),
                    fmt_f64(fm.mean),
                    fmt_f64(fm.variance),
                    fmt_f64(c),
                ]);
            }
        }
    }
    if r.mode == Mode::Exact {
        let qf = q_polynomials(&build_model(r.family.clone(), model_order(r))?);
        let routes: Vec<Value> =
            r.n.values()
                .into_iter()
                .map(|n| {
                    cn(&qf, n).map(|c| {
                        json!({
                            "n": n,
                            "series_sum": c.series_sum.to_string(),
                            "generating": c.generating.to_string(),
                            "bell": c.bell.to_string(),
                            "closed": c.closed.as_ref().map(|v| v.to_string()),
                            "agreed": c.agreed().is_some(),
                        })
                    })
                })
                .collect::<crate::Result<_>>()?;
        t.extra = json!({ "c_n_routes": routes });
    }
    Ok(t)
}

fn cmd_leibniz(r: &Resolved) -> CliResult<Table> {
    let nmax = r.n.single(r.command)?;
    let eta = exact_eta(r)?;
    let qf = q_polynomials(&build_model(r.family.clone(), model_order(r))?);
    let rep = leibniz_residuals(&qf, nmax, &eta)?;
    let mut t = Table::new(&["n", "max_residual", "exact_zero"]);
    t.rows = rep
        .rows
        .iter()
        .map(|row| {
            vec![
                row.n.to_string(),
                row.max_residual.to_string(),
                row.exact_zero.to_string(),
            ]
        })
        .collect();
    t.extra = json!({ "all_zero": rep.all_zero() });
    Ok(t)
}

fn cmd_entropy(r: &Resolved) -> CliResult<Table> {
    let eta = need_eta(r)?.to_f64();
    let values = r.n.values();
    let (lo, hi) = match r.n {
        NSpec::Range(a, b) => (a, b),
        _ => return Err(CliError::validation("entropy takes a range --n a..b")),
    };
    debug_assert_eq!(values.len(), hi - lo + 1);
    let scan = entropy_scan(&r.family, eta, lo..=hi, &r.q)?;
    let mut header = vec!["n".to_string(), "S_BG".to_string()];
    header.extend(r.q.iter().map(|q| format!("S_q_{q}")));
    let rows = scan
        .rows
        .iter()
        .map(|row| {
            let mut v = vec![row.n.to_string(), fmt_f64(row.s_bg)];
            v.extend(row.s_q.iter().map(|s| fmt_f64(*s)));
            v
        })
        .collect();
    Ok(Table {
        header,
        rows,
        extra: json!({
            "window": [scan.window.0, scan.window.1],
            "fit": scan.fit,
            "curvature": scan.curvature,
        }),
    })
}

fn cmd_limit(r: &Resolved) -> CliResult<Table> {
    if let Some(eta) = &r.eta {
        if eta.to_f64() != 0.5 {
            return Err(CliError::validation("limit runs at eta = 1/2 only"));
        }
    }
    let mut t = Table::new(&["n", "s", "density", "semicircle"]);
    let mut distances = Vec::new();
    for n in r.n.values() {
        let probe = wigner_limit_probe(&r.family, n, r.bins, r.binning)?;
        for i in 0..probe.centers.len() {
            t.rows.push(vec![
                n.to_string(),
                fmt_f64(probe.centers[i]),
                fmt_f64(probe.density[i]),
                fmt_f64(probe.reference[i]),
            ]);
        }
        distances.push(json!({ "n": n, "width": probe.width, "sup_distance": probe.sup_distance }));
    }
    t.extra = json!({ "sup_distances": distances });
    Ok(t)
}

fn cmd_coherent(r: &Resolved) -> CliResult<Table> {
    let nmax = r.n.single(r.command)?;
    let (data, report) = coherent_data_for(r.family.clone(), model_order(r), nmax)?;
    let frame = plane_cs_frame_check(&data, nmax)?;
    let mut t = Table::new(&["n", "f_n", "xfact_n", "frame_exact", "frame_quadrature"]);
    for row in &frame.rows {
        t.rows.push(vec![
            row.n.to_string(),
            row.f_n.to_string(),
            data.model().xfact(row.n).to_string(),
            (row.f_n == row.exact_integral).to_string(),
            fmt_f64(row.quadrature),
        ]);
    }
    let two_j = nmax.min(12);
    let spin = spin_resolution_check(&data, two_j)?;
    t.extra = json!({
        "family": data.model().family().to_string(),
        "restriction": report,
        "inequalities": data.inequalities(),
        "frame_tolerance": FRAME_TOLERANCE,
        "plane_frame_holds": frame.holds(),
        "spin": {
            "two_j": two_j,
            "exact_holds": spin.exact_holds(),
            "max_deviation": spin.max_deviation,
        },
    });
    Ok(t)
}

fn execute(r: &Resolved) -> CliResult<Table> {
    match r.command {
        Command::Model => cmd_model(r),
        Command::Qpoly => cmd_qpoly(r),
        Command::Pmf => cmd_pmf(r),
        Command::Moments => cmd_moments(r),
        Command::Leibniz => cmd_leibniz(r),
        Command::Entropy => cmd_entropy(r),
        Command::Limit => cmd_limit(r),
        Command::Coherent => cmd_coherent(r),
    }
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

pub fn render(r: &Resolved, t: &Table) -> CliResult<String> {
    match r.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&t.header)
                .map_err(|e| CliError::internal(e.to_string()))?;
            for row in &t.rows {
                w.write_record(row)
                    .map_err(|e| CliError::internal(e.to_string()))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
        }
        Format::Json => {
            let mut result = serde_json::Map::new();
            result.insert("rows".into(), t.json_rows());
            if let Value::Object(extra) = &t.extra {
                result.extend(extra.clone());
            }
            let doc = json!({ "config": r.echo, "result": Value::Object(result) });
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Runs the CLI on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let (command, args) = cli.command.split();
    match run_command(command, args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run_command(command: Command, args: Args) -> CliResult<()> {
    let resolved = resolve(command, args)?;
    let table = execute(&resolved)?;
    let text = render(&resolved, &table)?;
    match &resolved.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| {
                    CliError::internal(format!("cannot create {}: {e}", dir.display()))
                })?;
            }
            fs::write(path, text)
                .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::internal(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_specs() {
        assert_eq!(NSpec::parse("20").unwrap(), NSpec::Single(20));
        assert_eq!(NSpec::parse("1..200").unwrap(), NSpec::Range(1, 200));
        assert_eq!(NSpec::parse("3..=5").unwrap().values(), vec![3, 4, 5]);
        assert_eq!(NSpec::parse("10,100").unwrap().max(), 100);
        assert!(NSpec::parse("5..2").is_err());
        assert!(NSpec::parse("-1").is_err());
    }

    #[test]
    fn rationals_reject_decimals() {
        assert_eq!(
            parse_rational("alpha", "3/2").unwrap(),
            crate::series::rat(3, 2)
        );
        assert!(parse_rational("alpha", "1.5").is_err());
    }

    #[test]
    fn exact_mode_needs_rational_eta() {
        let args = Args {
            family: Some("qexp".into()),
            alpha: Some("2".into()),
            n: Some("2".into()),
            eta: Some("0.5".into()),
            mode: Some(Mode::Exact),
            ..Args::default()
        };
        let err = resolve(Command::Pmf, args).unwrap_err();
        assert_eq!(err.code, EXIT_VALIDATION);
    }

    #[test]
    fn decimal_eta_selects_float_mode() {
        let args = Args {
            family: Some("qexp".into()),
            alpha: Some("2".into()),
            n: Some("2".into()),
            eta: Some("0.5".into()),
            ..Args::default()
        };
        assert_eq!(resolve(Command::Pmf, args).unwrap().mode, Mode::Float);
    }
}
