//! The `kummer` command-line front end.
//!
//! Exit codes: 0 success, 2 domain or usage error, 3 convergence or oracle
//! failure. Failures are reported on stderr as a one-line JSON record.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{closed_form, coefficient_table, MAX_ORDER};
use crate::error::{Error, Result};
use crate::expansion::{evaluate, EvalOptions, EvalResult, DEFAULT_SAFETY, DEFAULT_TERMS};
use crate::oracle::{oracle_m, oracle_u, Route, DEFAULT_DIGITS};
use crate::regimes::{steepest_descent_path, Function, Order, ParameterSet, Regime, SaddleContext, DEFAULT_MU_CAP};

pub const VERIFY_HEADER: &str =
    "a,b,z,N,expansion_log_value,oracle_log_value,relative_error,first_omitted_term_estimate,error";
pub const EVAL_HEADER: &str = "function,order,a,b,z,terms_used,value,log_value,error_estimate,term_magnitudes";
pub const COEFFS_HEADER: &str = "n,closed_form,pipeline,delta";
pub const ORACLE_HEADER: &str = "function,a,b,z,digits,route,perturbation,log_value,value";
pub const PATH_HEADER: &str = "theta,r,x,y";

#[derive(Debug, Parser)]
#[command(name = "kummer", version, about = "Large-parameter Kummer function evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate M(a, b, z) or U(a, b + 1, z) by the asymptotic expansion.
    Eval(EvalArgs),
    /// Compare expansions against the oracle over a grid of a and mu.
    Verify(VerifyArgs),
    /// Show normalized coefficients from the closed forms and the numeric pipeline.
    Coeffs(CoeffsArgs),
    /// High-precision reference value.
    Oracle(OracleArgs),
    /// Sample the steepest-descent path r(theta) of the M, b <= a phase.
    Path(PathArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FnArg {
    #[value(name = "M", alias = "m")]
    M,
    #[value(name = "U", alias = "u")]
    U,
}

impl From<FnArg> for Function {
    fn from(f: FnArg) -> Self {
        match f {
            FnArg::M => Function::M,
            FnArg::U => Function::U,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    #[value(name = "b_ge_a")]
    Ge,
    #[value(name = "b_le_a")]
    Le,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Ge => Order::BGeA,
            OrderArg::Le => Order::BLeA,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, conflicts_with = "format")]
    json: bool,
    /// Flat key=value file with precision, terms, safety_factor.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    terms: Option<usize>,
    /// Oracle precision in decimal digits.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    safety: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[arg(long, value_enum, default_value = "b_ge_a")]
    order: OrderArg,
    /// Comma-separated values of a.
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<f64>,
    /// Comma-separated values of mu = |b - a| / a.
    #[arg(long, value_delimiter = ',', required = true)]
    mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[arg(long, value_enum)]
    order: OrderArg,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    z: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    z: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PathArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

/// Settings after merging the config file under the command-line flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub precision: u32,
    pub terms: usize,
    pub safety: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { precision: DEFAULT_DIGITS, terms: DEFAULT_TERMS, safety: DEFAULT_SAFETY }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::domain(format!("config: bad value '{value}' for {key}")))
}

/// Read a flat `key = value` file. Blank lines and `#` comments are ignored.
pub fn read_config(path: &Path, base: RunConfig) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::domain(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = base;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("config line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "precision" => cfg.precision = parse_value(key, value)?,
            "terms" => cfg.terms = parse_value(key, value)?,
            "safety_factor" => cfg.safety = parse_value(key, value)?,
            _ => return Err(Error::domain(format!("config line {}: unknown key '{key}'", lineno + 1))),
        }
    }
    Ok(cfg)
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => read_config(path, RunConfig::default())?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        if let Some(n) = self.terms {
            cfg.terms = n;
        }
        if let Some(s) = self.safety {
            cfg.safety = s;
        }
        Ok(cfg)
    }

    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format.unwrap_or(default)
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable record")
}

/// One `verify` row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub a: f64,
    pub b: f64,
    pub z: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub expansion_log_value: Option<f64>,
    pub oracle_log_value: Option<f64>,
    pub relative_error: Option<f64>,
    pub first_omitted_term_estimate: Option<f64>,
    pub error: Option<String>,
}

impl VerifyRow {
    fn csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            num(self.a),
            num(self.b),
            num(self.z),
            self.n,
            opt(self.expansion_log_value),
            opt(self.oracle_log_value),
            opt(self.relative_error),
            opt(self.first_omitted_term_estimate),
            csv_field(self.error.as_deref().unwrap_or("")),
        )
    }
}

/// Evaluate one grid point against the oracle; failures land in `error`.
pub fn verify_row(function: Function, a: f64, b: f64, z: f64, terms: usize, safety: f64, digits: u32) -> VerifyRow {
    let mut row = VerifyRow {
        a,
        b,
        z,
        n: terms,
        expansion_log_value: None,
        oracle_log_value: None,
        relative_error: None,
        first_omitted_term_estimate: None,
        error: None,
    };
    let opts = EvalOptions { terms, safety, mu_cap: DEFAULT_MU_CAP };
    let eval = ParameterSet::new(a, b, z).and_then(|p| evaluate(function, &p, &opts));
    match eval {
        Ok(r) => {
            row.expansion_log_value = Some(r.log_value);
            row.first_omitted_term_estimate = Some(r.first_omitted);
            let reference = match function {
                Function::M => oracle_m(a, b, z, digits),
                Function::U => oracle_u(a, b, z, digits).map(|o| o.value),
            };
            match reference {
                Ok(o) => {
                    row.oracle_log_value = Some(o.ln_abs());
                    row.relative_error = Some(o.relative_error_of(r.scaled));
                }
                Err(e) => row.error = Some(e.to_string()),
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn eval_csv(function: Function, p: &ParameterSet, r: &EvalResult) -> String {
    let mags: Vec<String> = r.term_magnitudes.iter().map(|m| num(*m)).collect();
    format!(
        "{EVAL_HEADER}\n{},{},{},{},{},{},{},{},{},{}\n",
        function,
        r.regime.order,
        num(p.a()),
        num(p.b()),
        num(p.z()),
        r.terms_used,
        r.value.map(num).unwrap_or_default(),
        num(r.log_value),
        num(r.error_estimate),
        mags.join(";"),
    )
}

fn eval_plain(r: &EvalResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "regime: {}", r.regime);
    match r.value {
        Some(v) => {
            let _ = writeln!(s, "value: {}", num(v));
        }
        None => {
            let _ = writeln!(s, "value: (outside double range)");
        }
    }
    let _ = writeln!(s, "log_value: {}", num(r.log_value));
    let _ = writeln!(s, "terms_used: {}", r.terms_used);
    let mags: Vec<String> = r.term_magnitudes.iter().map(|m| num(*m)).collect();
    let _ = writeln!(s, "term_magnitudes: {}", mags.join(" "));
    let _ = writeln!(s, "error_estimate: {}", num(r.error_estimate));
    s
}

fn cmd_eval(args: &EvalArgs) -> Result<String> {
    let cfg = args.common.config()?;
    let p = ParameterSet::new(args.a, args.b, args.z)?;
    let function = Function::from(args.function);
    let opts = EvalOptions { terms: cfg.terms, safety: cfg.safety, mu_cap: DEFAULT_MU_CAP };
    let r = evaluate(function, &p, &opts)?;
    Ok(match args.common.format(Format::Plain) {
        Format::Json => to_json(&r) + "\n",
        Format::Csv => eval_csv(function, &p, &r),
        Format::Plain => eval_plain(&r),
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<String> {
    let cfg = args.common.config()?;
    let function = Function::from(args.function);
    let order = Order::from(args.order);
    for &mu in &args.mu {
        if !(mu.is_finite() && mu >= 0.0) || (order == Order::BLeA && mu >= 1.0) {
            return Err(Error::domain(format!("mu = {mu} is outside the range for {order}")));
        }
    }
    let mut grid = Vec::new();
    for &a in &args.a {
        for &mu in &args.mu {
            for &z in &args.z {
                let b = match order {
                    Order::BGeA => a * (1.0 + mu),
                    Order::BLeA => a * (1.0 - mu),
                };
                grid.push((a, b, z));
            }
        }
    }
    let rows: Vec<VerifyRow> =
        grid.par_iter().map(|&(a, b, z)| verify_row(function, a, b, z, cfg.terms, cfg.safety, cfg.precision)).collect();
    Ok(match args.common.format(Format::Csv) {
        Format::Json => to_json(&rows) + "\n",
        Format::Csv => {
            let mut s = format!("{VERIFY_HEADER}\n");
            for row in &rows {
                s.push_str(&row.csv());
                s.push('\n');
            }
            s
        }
        Format::Plain => {
            let mut s = VERIFY_HEADER.replace(',', " ") + "\n";
            for row in &rows {
                s.push_str(&row.csv().replace(',', " "));
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CoeffRow {
    n: usize,
    closed_form: Option<f64>,
    pipeline: f64,
    delta: Option<f64>,
}

fn cmd_coeffs(args: &CoeffsArgs) -> Result<String> {
    let cfg = args.common.config()?;
    let n = args.common.terms.unwrap_or(2.max(cfg.terms.min(MAX_ORDER / 2)));
    let regime = Regime::new(args.function.into(), args.order.into());
    let ctx = SaddleContext::for_mu(regime, args.mu)?;
    let table = coefficient_table(&ctx, args.z, n)?;
    let rows: Vec<CoeffRow> = table
        .normalized
        .iter()
        .enumerate()
        .map(|(k, &pipeline)| {
            let closed = closed_form(regime, k, args.mu, args.z).ok();
            CoeffRow { n: k, closed_form: closed, pipeline, delta: closed.map(|c| pipeline - c) }
        })
        .collect();
    Ok(match args.common.format(Format::Csv) {
        Format::Json => to_json(&rows) + "\n",
        Format::Csv | Format::Plain => {
            let sep = if args.common.format(Format::Csv) == Format::Plain { " " } else { "," };
            let mut s = COEFFS_HEADER.replace(',', sep) + "\n";
            for r in &rows {
                let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
                let fields = [r.n.to_string(), opt(r.closed_form), num(r.pipeline), opt(r.delta)];
                s.push_str(&fields.join(sep));
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OracleRecord {
    function: Function,
    a: f64,
    b: f64,
    z: f64,
    digits: u32,
    route: Option<Route>,
    perturbation: f64,
    log_value: f64,
    value: String,
}

fn cmd_oracle(args: &OracleArgs) -> Result<String> {
    let cfg = args.common.config()?;
    let function = Function::from(args.function);
    let digits = cfg.precision;
    let (value, route, perturbation) = match function {
        Function::M => (oracle_m(args.a, args.b, args.z, digits)?, None, 0.0),
        Function::U => {
            let o = oracle_u(args.a, args.b, args.z, digits)?;
            (o.value, Some(o.route), o.perturbation)
        }
    };
    let rec = OracleRecord {
        function,
        a: args.a,
        b: args.b,
        z: args.z,
        digits,
        route,
        perturbation,
        log_value: value.ln_abs(),
        value: value.to_decimal(digits as usize),
    };
    let route_name = match rec.route {
        Some(Route::Quadrature) => "quadrature",
        Some(Route::Connection) => "connection",
        None => "series",
    };
    Ok(match args.common.format(Format::Plain) {
        Format::Json => to_json(&rec) + "\n",
        Format::Csv => format!(
            "{ORACLE_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
            rec.function,
            num(rec.a),
            num(rec.b),
            num(rec.z),
            rec.digits,
            route_name,
            num(rec.perturbation),
            num(rec.log_value),
            rec.value
        ),
        Format::Plain => format!(
            "value: {}\nlog_value: {}\nroute: {route_name}\nperturbation: {}\n",
            rec.value,
            num(rec.log_value),
            num(rec.perturbation)
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PathRow {
    theta: f64,
    r: f64,
    x: f64,
    y: f64,
}

fn cmd_path(args: &PathArgs) -> Result<String> {
    let rows: Vec<PathRow> = steepest_descent_path(args.mu, args.samples)?
        .into_iter()
        .map(|p| PathRow { theta: p.theta, r: p.r, x: p.r * p.theta.cos(), y: p.r * p.theta.sin() })
        .collect();
    Ok(match args.common.format(Format::Csv) {
        Format::Json => to_json(&rows) + "\n",
        fmt => {
            let sep = if fmt == Format::Plain { " " } else { "," };
            let mut s = PATH_HEADER.replace(',', sep) + "\n";
            for r in &rows {
                s.push_str(&[num(r.theta), num(r.r), num(r.x), num(r.y)].join(sep));
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::OrderOverflow { .. } => 2,
        Error::Convergence(_) | Error::Oracle(_) => 3,
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let rec = ErrorRecord { error: "usage", message: e.to_string().trim().to_string() };
                let _ = writeln!(err, "{}", to_json(&rec));
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Path(a) => cmd_path(a),
    };
    match result {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let rec = ErrorRecord { error: e.kind(), message: e.to_string() };
            let _ = writeln!(err, "{}", to_json(&rec));
            exit_code(&e)
        }
    }
}
