//! Command-line interface. [`run`] parses arguments, executes one command and
//! writes its output; the return value is the process exit code:
//! 0 success, 1 verification failure, 2 invalid parameters, 3 budget exceeded.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coding::{
    ball_volume, entropy_estimate, gv_lower_bound, gv_random_experiment, hamming_entropy,
    min_distance_exhaustive, GvParams, WeightKind, WeightModel,
};
use crate::density::{
    agi_product, agi_series, density_bounds, density_table, limit_density_length,
    limit_density_s2_closed, order_explore, order_violations, rank_density_trend, rank_table,
    TypeOrder,
};
use crate::error::{Error, Result};
use crate::modcount::{
    matrix_count_by_type, rect_unimodular_probability, ChainRingSpec, ModuleTypeCounts, Shape,
    SubmoduleCounter,
};
use crate::qseries::{ratio_to_f64, ApproxReal, ExactRatio, TruncationPolicy};
use crate::render::{approx_probability, fixed_f64, probability, scientific};
use crate::sim::{
    binomial_sigma, enumerate_submodules, formula_census, formula_matrix_census,
    monte_carlo_type_distribution, sample_matrix, within_sigma, ConcreteRing, RingMatrix,
};

/// Version of the JSON envelope layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "chainring",
    version,
    about = "Submodule counts, free-module densities and random codes over finite chain rings"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Decimal digits in rendered values (exact computations are unaffected).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Worker threads for Monte Carlo runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact submodule and matrix counts.
    #[command(subcommand)]
    Count(CountCmd),
    /// Exact probabilities of freeness.
    #[command(subcommand)]
    Prob(ProbCmd),
    /// Limit densities, bounds and tables.
    #[command(subcommand)]
    Density(DensityCmd),
    /// Brute-force enumeration and sampling over Z/p^s.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Ball volumes, growth rates and random codes.
    #[command(subcommand)]
    Code(CodeCmd),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct RingArgs {
    /// Residue field size (a prime power).
    #[arg(long)]
    pub q: u64,
    /// Nilpotency index of the maximal ideal.
    #[arg(long)]
    pub s: usize,
}

impl RingArgs {
    fn spec(&self) -> Result<ChainRingSpec> {
        ChainRingSpec::new(self.q, self.s)
    }
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct ConcreteArgs {
    /// Prime p of Z/p^s.
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub s: usize,
}

impl ConcreteArgs {
    fn ring(&self) -> Result<ConcreteRing> {
        ConcreteRing::new(self.p, self.s)
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountCmd {
    /// Submodules of R^n of a given type k_1,...,k_s.
    Type {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "type")]
        module_type: String,
    },
    /// Submodules of R^n of a given shape (weakly decreasing parts).
    Shape {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        shape: String,
    },
    /// Submodules of R^n of a given length.
    Length {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        ell: u64,
    },
    /// Submodules of R^n of a given rank.
    Rank {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "K")]
        rank: u64,
    },
    /// Free submodules of R^n of a given rank.
    Free {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "K")]
        rank: u64,
    },
    /// m x n matrices whose row module has a given type.
    Matrix {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "type")]
        module_type: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbCmd {
    /// Fraction of free submodules among those of length ell.
    FreeLength {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        ell: u64,
    },
    /// Fraction of free submodules among those of rank K.
    FreeRank {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long = "K")]
        rank: u64,
    },
    /// Probability that a uniform k x n matrix is rectangular unimodular.
    Unimodular {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        s: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityCmd {
    /// Limit density of free submodules at fixed relative length.
    Limit {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Limit density with its Andrews-Gordon lower and upper bounds.
    Bounds {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Closed form of the limit density for s = 2.
    S2Closed {
        #[arg(long)]
        q: u64,
    },
    /// Andrews-Gordon series and product at x = 1/q.
    Agi {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Lower, exact and upper densities for s in {2,3,4}, q in {2,3,5,7,11}.
    Table1,
    /// Fixed-rank free probabilities on the reference grid.
    Table2,
    /// Free probability at rank R'n for a list of n.
    RankTrend {
        #[command(flatten)]
        ring: RingArgs,
        /// Relative rank, e.g. 3/5 or 0.6.
        #[arg(long)]
        rprime: String,
        /// Comma-separated lengths.
        #[arg(long, value_delimiter = ',')]
        ns: Vec<u64>,
    },
    /// Types of length ell sorted by submodule count, with order violations.
    OrderExplore {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        ell: u64,
        /// Print only the first rows of the census.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCmd {
    /// Census of all submodules of (Z/p^s)^n by exhaustive enumeration.
    Enumerate {
        #[command(flatten)]
        ring: ConcreteArgs,
        #[arg(long)]
        n: usize,
    },
    /// Compare the exhaustive census with the counting formula.
    Verify {
        #[command(flatten)]
        ring: ConcreteArgs,
        #[arg(long)]
        n: usize,
    },
    /// A uniform random matrix from a seeded stream.
    Sample {
        #[command(flatten)]
        ring: ConcreteArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Type frequencies of random matrices against the exact distribution.
    MonteCarlo {
        #[command(flatten)]
        ring: ConcreteArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long, value_parser = parse_metric)]
    pub metric: WeightKind,
    #[command(flatten)]
    pub ring: ConcreteArgs,
}

impl MetricArgs {
    fn model(&self) -> Result<WeightModel> {
        WeightModel::new(self.metric, self.ring.ring()?)
    }
}

fn parse_metric(s: &str) -> std::result::Result<WeightKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeCmd {
    /// Number of vectors within weight w of the origin.
    Ball {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        n: u64,
        /// Radius, e.g. 3 or 3/2.
        #[arg(long)]
        w: String,
        /// Count weight <= w instead of weight < w.
        #[arg(long)]
        closed: bool,
    },
    /// Gilbert-Varshamov lower bound (p^s)^n / V(n, d).
    Gv {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: String,
    },
    /// Finite-length growth rate g_n(delta).
    Entropy {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
    },
    /// Minimum distance of the code generated by the rows of a matrix.
    MinDistance {
        #[command(flatten)]
        metric: MetricArgs,
        /// Rows separated by ';', entries by ',', e.g. "1,1;0,2".
        #[arg(long)]
        matrix: String,
    },
    /// Random generator matrices against the probabilistic GV bound.
    GvExperiment {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

/// A tabular result.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| -> String {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.header
                            .iter()
                            .cloned()
                            .zip(row.iter().map(|c| Value::String(c.clone())))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// What a command produced, before formatting.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub result: Value,
    pub table: Option<Table>,
    /// Overrides the CSV rendering of `table`.
    pub csv: Option<String>,
    pub status: i32,
}

impl Output {
    fn new(text: impl Into<String>, result: Value) -> Self {
        Output {
            text: text.into(),
            result,
            table: None,
            csv: None,
            status: 0,
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::NonConvergent(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::IdentityViolation(_) => 1,
    }
}

/// Parses and executes one invocation, writing results to `out` and
/// diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::invalid(format!("cannot build thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok((output, policy)) => {
            let text = format_output(&cli, &output, &policy);
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            output.status
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// `(group, subcommand, params)` from the serialized command, which is
/// always `{group: {sub: params}}` or `{group: "sub"}`.
fn command_parts(command: &Command) -> (String, String, Value) {
    let value = serde_json::to_value(command).expect("serializable");
    let (group, inner) = value
        .as_object()
        .and_then(|m| m.iter().next())
        .expect("externally tagged");
    match inner {
        Value::String(sub) => (group.clone(), sub.clone(), json!({})),
        Value::Object(m) => {
            let (sub, params) = m.iter().next().expect("externally tagged");
            (group.clone(), sub.clone(), params.clone())
        }
        _ => (group.clone(), String::new(), json!({})),
    }
}

fn command_name(command: &Command) -> String {
    let (group, sub, _) = command_parts(command);
    format!("{group} {sub}")
}

fn command_params(command: &Command) -> Value {
    command_parts(command).2
}

fn format_output(cli: &Cli, output: &Output, policy: &TruncationPolicy) -> String {
    match cli.format {
        Format::Text => {
            let mut text = output.text.clone();
            if let Some(table) = &output.table {
                text.push_str(&table.to_text());
            }
            text
        }
        Format::Csv => {
            if let Some(csv) = &output.csv {
                return csv.clone();
            }
            if let Some(table) = &output.table {
                return table.to_csv();
            }
            let mut table = Table::new(&["field", "value"]);
            if let Value::Object(map) = &output.result {
                for (k, v) in map {
                    let cell = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    table.push(vec![k.clone(), cell]);
                }
            }
            table.to_csv()
        }
        Format::Json => {
            let mut result = output.result.clone();
            if let (Some(table), Value::Object(map)) = (&output.table, &mut result) {
                map.insert("rows".to_string(), table.to_json());
            }
            let envelope = json!({
                "schema_version": SCHEMA_VERSION,
                "tool": {"name": "chainring", "version": env!("CARGO_PKG_VERSION")},
                "command": command_name(&cli.command),
                "params": command_params(&cli.command),
                "precision": cli.precision,
                "truncation_policy": policy,
                "status": if output.status == 0 { "ok" } else { "fail" },
                "result": result,
            });
            serde_json::to_string_pretty(&envelope).expect("serializable") + "\n"
        }
    }
}

fn execute(cli: &Cli) -> Result<(Output, TruncationPolicy)> {
    let policy = TruncationPolicy::from_env()?;
    let output = match &cli.command {
        Command::Count(c) => count(c)?,
        Command::Prob(c) => prob(c, cli.precision.unwrap_or(6))?,
        Command::Density(c) => density(c, cli.precision, &policy)?,
        Command::Oracle(c) => oracle(c)?,
        Command::Code(c) => code(c, cli.precision.unwrap_or(6))?,
    };
    Ok((output, policy))
}

fn parse_type(text: &str, s: usize) -> Result<ModuleTypeCounts> {
    let t = ModuleTypeCounts::parse(text)?;
    if t.s() != s {
        return Err(Error::invalid(format!(
            "type {t} has {} entries but s = {s}",
            t.s()
        )));
    }
    Ok(t)
}

fn parse_shape(text: &str) -> Result<Shape> {
    let parts = text
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad shape part '{p}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Shape::new(parts)
}

/// Parses `3/5`, `0.6` or `2` exactly.
pub fn parse_ratio(text: &str) -> Result<ExactRatio> {
    let text = text.trim();
    let bad = || Error::invalid(format!("'{text}' is not a rational number"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() && int.is_empty() {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        return Ok(BigRational::new(
            digits,
            BigInt::from(10u32).pow(frac.len() as u32),
        ));
    }
    Ok(BigRational::from_integer(text.parse().map_err(|_| bad())?))
}

fn count_output(c: num_bigint::BigUint) -> Output {
    let s = c.to_string();
    Output::new(format!("{s}\n"), json!({ "count": s }))
}

fn count(cmd: &CountCmd) -> Result<Output> {
    Ok(match cmd {
        CountCmd::Type {
            n,
            ring,
            module_type,
        } => {
            let t = parse_type(module_type, ring.s)?;
            count_output(SubmoduleCounter::new(*n, ring.spec()?).count_by_type(&t)?)
        }
        CountCmd::Shape { n, ring, shape } => count_output(
            SubmoduleCounter::new(*n, ring.spec()?).count_by_shape(&parse_shape(shape)?)?,
        ),
        CountCmd::Length { n, ring, ell } => {
            count_output(SubmoduleCounter::new(*n, ring.spec()?).total_by_length(*ell)?)
        }
        CountCmd::Rank { n, ring, rank } => {
            count_output(SubmoduleCounter::new(*n, ring.spec()?).total_by_rank(*rank)?)
        }
        CountCmd::Free { n, ring, rank } => {
            count_output(SubmoduleCounter::new(*n, ring.spec()?).count_free(*rank)?)
        }
        CountCmd::Matrix {
            m,
            n,
            ring,
            module_type,
        } => {
            let t = parse_type(module_type, ring.s)?;
            count_output(matrix_count_by_type(*m, *n, ring.spec()?, &t)?)
        }
    })
}

fn ratio_output(r: &ExactRatio, precision: u32) -> Output {
    let rendered = probability(r, precision);
    Output::new(
        format!("{rendered}\nexact: {r}\n"),
        json!({ "decimal": rendered, "exact": r.to_string(), "value": ratio_to_f64(r) }),
    )
}

fn prob(cmd: &ProbCmd, precision: u32) -> Result<Output> {
    let r = match cmd {
        ProbCmd::FreeLength { n, ring, ell } => {
            SubmoduleCounter::new(*n, ring.spec()?).psi_free_given_length(*ell)?
        }
        ProbCmd::FreeRank { n, ring, rank } => {
            SubmoduleCounter::new(*n, ring.spec()?).phi_free_given_rank(*rank)?
        }
        ProbCmd::Unimodular { k, n, q, s } => {
            rect_unimodular_probability(*k, *n, ChainRingSpec::new(*q, *s)?)?
        }
    };
    Ok(ratio_output(&r, precision))
}

fn approx_json(x: &ApproxReal) -> Value {
    json!({ "value": x.value, "abs_error": x.abs_error })
}

fn error_text(x: &ApproxReal) -> String {
    format!("{:.1e}", x.abs_error)
}

fn density(cmd: &DensityCmd, precision: Option<u32>, policy: &TruncationPolicy) -> Result<Output> {
    // limit densities are quoted to 5 decimals, finite-n probabilities to 6
    let digits = |finite: bool| precision.unwrap_or(if finite { 6 } else { 5 });
    let precision = digits(matches!(
        cmd,
        DensityCmd::Table2 | DensityCmd::RankTrend { .. }
    ));
    Ok(match cmd {
        DensityCmd::Limit { ring } => {
            let spec = ring.spec()?;
            let value = limit_density_length(spec, policy)?;
            let complement = if spec.s() == 1 {
                ApproxReal::exact(0.0)
            } else {
                density_bounds(spec, policy)?.value_complement
            };
            let rendered = approx_probability(&value, &complement, precision);
            Output::new(
                format!("{rendered} ± {}\n", error_text(&value)),
                json!({ "decimal": rendered, "density": approx_json(&value), "complement": approx_json(&complement) }),
            )
        }
        DensityCmd::Bounds { ring } => {
            let r = density_bounds(ring.spec()?, policy)?;
            let lower = approx_probability(&r.lower_bound, &r.lower_complement, precision);
            let exact = approx_probability(&r.value, &r.value_complement, precision);
            let upper = approx_probability(&r.upper_bound, &r.upper_complement, precision);
            Output::new(
                format!("lower {lower}\nexact {exact}\nupper {upper}\n"),
                json!({
                    "lower": lower, "exact": exact, "upper": upper,
                    "lower_bound": approx_json(&r.lower_bound),
                    "density": approx_json(&r.value),
                    "upper_bound": approx_json(&r.upper_bound),
                    "lower_complement": approx_json(&r.lower_complement),
                    "density_complement": approx_json(&r.value_complement),
                    "upper_complement": approx_json(&r.upper_complement),
                }),
            )
        }
        DensityCmd::S2Closed { q } => {
            let v = limit_density_s2_closed(*q, policy)?;
            let rendered = fixed_f64(v.value, precision);
            Output::new(
                format!("{rendered} ± {}\n", error_text(&v)),
                json!({ "decimal": rendered, "density": approx_json(&v) }),
            )
        }
        DensityCmd::Agi { ring } => {
            let x = 1.0 / ring.q as f64;
            let series = agi_series(x, ring.s, policy)?;
            let product = agi_product(x, ring.s, policy)?;
            let agree = series.agrees_with(&product);
            Output::new(
                format!(
                    "series  {} ± {}\nproduct {} ± {}\nagree {agree}\n",
                    fixed_f64(series.value, precision + 5),
                    error_text(&series),
                    fixed_f64(product.value, precision + 5),
                    error_text(&product)
                ),
                json!({ "series": approx_json(&series), "product": approx_json(&product), "agree": agree }),
            )
        }
        DensityCmd::Table1 => {
            let mut table = Table::new(&[
                "s",
                "q",
                "lower",
                "exact",
                "upper",
                "lower_complement",
                "exact_complement",
                "upper_complement",
                "max_error",
            ]);
            for r in density_table(policy)? {
                let max_error = [
                    r.lower_bound.abs_error,
                    r.value.abs_error,
                    r.upper_bound.abs_error,
                    r.lower_complement.abs_error,
                    r.value_complement.abs_error,
                    r.upper_complement.abs_error,
                ]
                .into_iter()
                .fold(0.0, f64::max);
                let sci = |x: &ApproxReal| format!("{:.3e}", x.value);
                table.push(vec![
                    r.ring.s().to_string(),
                    r.ring.q().to_string(),
                    approx_probability(&r.lower_bound, &r.lower_complement, precision),
                    approx_probability(&r.value, &r.value_complement, precision),
                    approx_probability(&r.upper_bound, &r.upper_complement, precision),
                    sci(&r.lower_complement),
                    sci(&r.value_complement),
                    sci(&r.upper_complement),
                    format!("{max_error:.1e}"),
                ]);
            }
            Output::new("", json!({})).with_table(table)
        }
        DensityCmd::Table2 => {
            let mut table = Table::new(&["q", "s", "K", "n", "probability", "value", "complement"]);
            for ((q, s, k, n), v) in rank_table()? {
                let one = ExactRatio::from_integer(1.into());
                table.push(vec![
                    q.to_string(),
                    s.to_string(),
                    k.to_string(),
                    n.to_string(),
                    probability(&v, precision),
                    scientific(&v, 12),
                    scientific(&(one - &v), 12),
                ]);
            }
            Output::new("", json!({})).with_table(table)
        }
        DensityCmd::RankTrend { ring, rprime, ns } => {
            let r = parse_ratio(rprime)?;
            let values = rank_density_trend(ring.spec()?, &r, ns)?;
            let mut table = Table::new(&["n", "K", "probability", "exact"]);
            for (n, v) in ns.iter().zip(values) {
                let k = (&r * BigRational::from_integer(BigInt::from(*n))).to_integer();
                table.push(vec![
                    n.to_string(),
                    k.to_string(),
                    probability(&v, precision),
                    v.to_string(),
                ]);
            }
            Output::new("", json!({ "rprime": r.to_string() })).with_table(table)
        }
        DensityCmd::OrderExplore {
            n,
            ring,
            ell,
            limit,
        } => {
            let census = order_explore(*n, ring.spec()?, *ell)?;
            let mut table = Table::new(&["position", "type", "count", "rank", "shape_energy"]);
            for (i, (t, c)) in census.iter().enumerate().take(limit.unwrap_or(usize::MAX)) {
                table.push(vec![
                    (i + 1).to_string(),
                    t.to_string(),
                    c.to_string(),
                    t.rank().to_string(),
                    t.shape_energy().to_string(),
                ]);
            }
            let mut text = String::new();
            let mut summary = serde_json::Map::new();
            for order in [
                TypeOrder::Lexicographic,
                TypeOrder::Rank,
                TypeOrder::ShapeEnergy,
            ] {
                let v = order_violations(&census, order);
                let name = serde_json::to_value(order).expect("unit enum");
                let name = name.as_str().expect("string").to_string();
                match v.first() {
                    Some(first) => text.push_str(&format!(
                        "{name}: {} violating pairs, e.g. {} > {} but N = {} < {}\n",
                        v.len(),
                        first.greater,
                        first.lesser,
                        first.greater_count,
                        first.lesser_count
                    )),
                    None => text.push_str(&format!("{name}: consistent with counts\n")),
                }
                summary.insert(
                    name,
                    json!({
                        "violations": v.len(),
                        "first": v.first().map(|f| json!({
                            "greater": f.greater.to_string(),
                            "greater_count": f.greater_count.to_string(),
                            "lesser": f.lesser.to_string(),
                            "lesser_count": f.lesser_count.to_string(),
                        })),
                    }),
                );
            }
            Output::new(text, json!({ "types": census.len(), "orders": summary })).with_table(table)
        }
    })
}

fn oracle(cmd: &OracleCmd) -> Result<Output> {
    Ok(match cmd {
        OracleCmd::Enumerate { ring, n } => {
            let r = ring.ring()?;
            let census = enumerate_submodules(r, *n)?;
            let exact = formula_census(r.spec(), *n as u64)?;
            let mut out = census_output(&census, &exact, r.s());
            out.text = format!("{} submodules of ({r})^{n}\n", census.total());
            out
        }
        OracleCmd::Verify { ring, n } => {
            let r = ring.ring()?;
            let census = enumerate_submodules(r, *n)?;
            let exact = formula_census(r.spec(), *n as u64)?;
            let mismatches: Vec<_> = census
                .compare(&exact)
                .into_iter()
                .filter(|row| !row.matches)
                .collect();
            let mut out = census_output(&census, &exact, r.s());
            if mismatches.is_empty() {
                out.text = format!(
                    "PASS: {} types, {} submodules of ({r})^{n}\n",
                    census.len(),
                    census.total()
                );
            } else {
                out.text = String::from("FAIL\n");
                for m in &mismatches {
                    out.text.push_str(&format!(
                        "type {}: enumerated {} formula {}\n",
                        m.module_type, m.count, m.exact_formula
                    ));
                }
                out.status = 1;
            }
            if let Value::Object(map) = &mut out.result {
                map.insert("pass".into(), json!(mismatches.is_empty()));
            }
            out
        }
        OracleCmd::Sample {
            ring,
            m,
            n,
            seed,
            stream,
        } => {
            let mat = sample_matrix(*m, *n, ring.ring()?, *seed, *stream);
            let mut table = Table::new(
                &(0..*n)
                    .map(|j| format!("c{j}"))
                    .collect::<Vec<_>>()
                    .iter()
                    .map(String::as_str)
                    .collect::<Vec<_>>(),
            );
            for i in 0..*m {
                table.push(mat.row(i).iter().map(u64::to_string).collect());
            }
            Output {
                text: mat.to_string(),
                result: json!({ "rows": (0..*m).map(|i| mat.row(i).to_vec()).collect::<Vec<_>>(),
                               "type": crate::sim::matrix_type(&mat).to_string() }),
                table: None,
                csv: Some(table.to_csv()),
                status: 0,
            }
        }
        OracleCmd::MonteCarlo {
            ring,
            m,
            n,
            trials,
            seed,
        } => {
            let r = ring.ring()?;
            let census = monte_carlo_type_distribution(*m, *n, r, *trials, *seed)?;
            let exact = formula_matrix_census(r.spec(), *m as u64, *n as u64)?;
            let total = exact.total().clone();
            let mut table = Table::new(&[
                "type",
                "observed",
                "frequency",
                "exact_probability",
                "sigma",
                "within_4sigma",
            ]);
            let mut all_ok = true;
            for row in census.compare(&exact) {
                let p = ratio_to_f64(&BigRational::new(
                    row.exact_formula.clone().into(),
                    total.clone().into(),
                ));
                let observed = row.count.to_u64().expect("at most trials");
                let ok = within_sigma(observed, *trials, p, 4.0);
                all_ok &= ok;
                table.push(vec![
                    row.module_type.to_string(),
                    observed.to_string(),
                    format!("{:.6}", observed as f64 / *trials as f64),
                    format!("{p:.6}"),
                    format!("{:.2e}", binomial_sigma(p, *trials)),
                    ok.to_string(),
                ]);
            }
            let mut out = Output::new(
                format!("{} trials, all types within 4 sigma: {all_ok}\n", trials),
                json!({ "trials": trials, "within_4sigma": all_ok }),
            )
            .with_table(table);
            out.status = if all_ok { 0 } else { 1 };
            out
        }
    })
}

fn census_output(
    census: &crate::sim::TypeCensus,
    exact: &crate::sim::TypeCensus,
    s: usize,
) -> Output {
    let mut header: Vec<String> = (1..=s).map(|i| format!("k_{i}")).collect();
    header.extend(["count", "exact_formula", "match"].map(String::from));
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    for row in census.compare(exact) {
        let mut cells: Vec<String> = row
            .module_type
            .counts()
            .iter()
            .map(u64::to_string)
            .collect();
        cells.extend([
            row.count.to_string(),
            row.exact_formula.to_string(),
            row.matches.to_string(),
        ]);
        table.push(cells);
    }
    Output::new(
        "",
        json!({ "total": census.total().to_string(), "types": census.len() }),
    )
    .with_table(table)
}

fn parse_matrix(text: &str, ring: ConcreteRing) -> Result<RingMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::invalid(format!("bad matrix entry '{x}'")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RingMatrix::from_rows(ring, &rows)
}

fn code(cmd: &CodeCmd, precision: u32) -> Result<Output> {
    Ok(match cmd {
        CodeCmd::Ball {
            metric,
            n,
            w,
            closed,
        } => {
            let model = metric.model()?;
            count_output(ball_volume(*n, &parse_ratio(w)?, &model, *closed)?)
        }
        CodeCmd::Gv { metric, n, d } => {
            let model = metric.model()?;
            let bound = gv_lower_bound(*n, &parse_ratio(d)?, &model)?;
            let decimal = fixed_f64(ratio_to_f64(&bound), precision);
            Output::new(
                format!("{bound}\n{decimal}\n"),
                json!({ "exact": bound.to_string(), "decimal": decimal }),
            )
        }
        CodeCmd::Entropy { metric, n, delta } => {
            let model = metric.model()?;
            let g = entropy_estimate(*n, *delta, &model)?;
            let mut text = format!("{} ± {}\n", fixed_f64(g.value, precision), error_text(&g));
            let mut result = json!({ "g_n": approx_json(&g), "d_threshold": model.d_threshold() });
            if metric.metric == WeightKind::Hamming {
                let h = hamming_entropy(*delta, model.ring().modulus())?;
                text.push_str(&format!("closed form {}\n", fixed_f64(h, precision)));
                result["closed_form"] = json!(h);
            }
            Output::new(text, result)
        }
        CodeCmd::MinDistance { metric, matrix } => {
            let model = metric.model()?;
            let d = min_distance_exhaustive(&parse_matrix(matrix, *model.ring())?, &model)?;
            Output::new(format!("{d}\n"), json!({ "min_distance": d.to_string() }))
        }
        CodeCmd::GvExperiment {
            metric,
            n,
            delta,
            eps,
            trials,
            seed,
        } => {
            let model = metric.model()?;
            let report = gv_random_experiment(
                GvParams {
                    n: *n,
                    delta: *delta,
                    epsilon: *eps,
                    trials: *trials,
                    seed: *seed,
                },
                &model,
            )?;
            let text = format!(
                "k = {} (g_n = {:.6})\nfree fraction {:.4} (exact {:.6})\nfar fraction {:.4}\njoint fraction {:.4} vs bound {:.6}{} (4 sigma = {:.4})\n{}\n",
                report.k,
                report.g_n,
                report.fractions.free,
                report.unimodular_probability,
                report.fractions.far,
                report.fractions.joint,
                report.bound_decimal,
                if report.vacuous { " (vacuous)" } else { "" },
                4.0 * report.sigma.joint,
                if report.pass && report.free_pass { "PASS" } else { "FAIL" },
            );
            let mut out = Output::new(text, serde_json::to_value(&report).expect("serializable"));
            out.csv = Some(report.trials_csv());
            out.status = if report.pass && report.free_pass {
                0
            } else {
                1
            };
            out
        }
    })
}
