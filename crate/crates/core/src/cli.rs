//! Command-line front end.
//!
//! Reports go to the output stream as compact JSON (CSV for curves) with
//! numbers rounded to 12 significant digits; diagnostics go to the error
//! stream as a single line. Exit codes: 0 success, 1 domain error, 2 I/O,
//! parse or usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::distribution::DiscreteDistribution;
use crate::dominance::{first_order, p_order, spectral_order, verify_dominance_with, DominanceVerdict};
use crate::error::RiskError;
use crate::expectile::{expectile, expectile_kusuoka, higher_order_expectile};
use crate::higher_order::{higher_order_risk, NormSpec};
use crate::optimize::grid_point;
use crate::spectral::{spectral_risk, KusuokaMixture};

/// Probability sums in input files must be within this of one.
pub const FILE_PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] RiskError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

const NORM_HELP: &str = "norm: lp:<p|inf>, avar:<alpha>, spectral:<mixture.json>, expectile:<alpha>";

#[derive(Parser, Debug)]
#[command(
    name = "riskorder",
    version,
    about = "Higher-order risk measures, expectiles and stochastic dominance for discrete distributions",
    after_help = "Distribution files: JSON {\"atoms\":[{\"x\":..,\"p\":..}]} or CSV with header value,probability.\n\
                  Mixture files: JSON {\"kusuoka\":[{\"alpha\":..,\"w\":..}]}."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Risk R(Y) of the norm's base measure (expectation for lp norms).
    Risk {
        #[arg(long, help = NORM_HELP)]
        norm: String,
        #[command(flatten)]
        input: Input,
    },
    /// Higher-order risk R_beta(Y) with its minimizer.
    Higher {
        #[arg(long, help = NORM_HELP)]
        norm: String,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        input: Input,
    },
    /// Expectile, its Kusuoka value and optionally the higher-order expectile.
    Expectile {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        input: Input,
    },
    /// Decide whether X is dominated by Y.
    ///
    /// Inputs are gains: X ≼ Y means ‖(t−X)₊‖ ≥ ‖(t−Y)₊‖ for all t, so Y is
    /// preferred. Risk profiles are evaluated on the losses −X and −Y.
    Dominance {
        /// first | p:<order> | spectral:<mixture.json> | verify
        #[arg(long)]
        order: String,
        /// Norm for --order verify.
        #[arg(long, default_value = "lp:1", help = NORM_HELP)]
        norm: String,
        /// Beta grid spacing for norms without exact critical levels.
        #[arg(long, default_value_t = crate::dominance::DEFAULT_RESOLUTION)]
        resolution: f64,
        /// Treat probabilities as raw weights and renormalize.
        #[arg(long)]
        weights: bool,
        x: PathBuf,
        y: PathBuf,
    },
    /// CSV of value, minimizer, derivative and (1−beta)·value over beta.
    Curve {
        #[arg(long, help = NORM_HELP)]
        norm: String,
        /// lo:hi:n (inclusive, n points) or a comma-separated list.
        #[arg(long)]
        betas: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
    /// Re-emit a distribution with full precision plus its summary.
    Info {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(clap::Args, Debug)]
struct Input {
    /// Treat probabilities as raw weights and renormalize.
    #[arg(long)]
    weights: bool,
    path: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Deserialize)]
struct AtomsFile {
    atoms: Vec<AtomRecord>,
}

#[derive(Deserialize)]
struct AtomRecord {
    x: f64,
    p: f64,
}

#[derive(Deserialize)]
struct CsvRecord {
    value: f64,
    probability: f64,
}

#[derive(Deserialize)]
struct MixtureFile {
    kusuoka: Vec<MixtureRecord>,
}

#[derive(Deserialize)]
struct MixtureRecord {
    alpha: f64,
    w: f64,
}

#[derive(Serialize)]
struct ValueReport {
    value: f64,
}

#[derive(Serialize)]
struct HigherReport {
    value: f64,
    t_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_beta: Option<f64>,
}

#[derive(Serialize)]
struct ExpectileReport {
    expectile: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kusuoka: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    higher_order: Option<f64>,
}

#[derive(Serialize)]
struct VerdictReport {
    outcome: &'static str,
    witness: Option<f64>,
    margin: f64,
    levels: Vec<f64>,
}

/// Rounds to 12 significant digits.
fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn finite12(x: f64) -> Option<f64> {
    x.is_finite().then(|| round12(x))
}

/// Shortest round-trip rendering of the 12-digit value, e.g. `4.0`.
fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:?}", round12(x))
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_distribution(path: &Path, weights: bool) -> CliResult<DiscreteDistribution> {
    let text = read_text(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    let pairs: Vec<(f64, f64)> = if is_json {
        let file: AtomsFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        file.atoms.into_iter().map(|a| (a.x, a.p)).collect()
    } else {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        reader
            .deserialize::<CsvRecord>()
            .map(|r| r.map(|r| (r.value, r.probability)))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
    };
    Ok(if weights {
        DiscreteDistribution::from_atoms(&pairs)?
    } else {
        DiscreteDistribution::from_probabilities(&pairs, FILE_PROBABILITY_TOLERANCE)?
    })
}

fn read_mixture(path: &Path) -> CliResult<KusuokaMixture> {
    let text = read_text(path)?;
    let file: MixtureFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let pairs: Vec<(f64, f64)> = file.kusuoka.into_iter().map(|r| (r.alpha, r.w)).collect();
    Ok(KusuokaMixture::new(&pairs)?)
}

fn parse_number(text: &str, what: &str) -> CliResult<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Parse(format!("malformed {what}: '{text}'")))
}

fn parse_norm(spec: &str) -> CliResult<NormSpec> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Parse(format!("malformed norm '{spec}' ({NORM_HELP})")))?;
    let norm = match kind {
        "lp" => {
            let p = match arg.trim() {
                "inf" | "infinity" => f64::INFINITY,
                other => parse_number(other, "norm exponent")?,
            };
            NormSpec::Holder(p)
        }
        "avar" => NormSpec::Spectral(KusuokaMixture::avar_level(parse_number(arg, "avar level")?)?),
        "spectral" => NormSpec::Spectral(read_mixture(Path::new(arg))?),
        "expectile" => NormSpec::Expectile(parse_number(arg, "expectile level")?),
        _ => return Err(CliError::Parse(format!("unknown norm kind '{kind}' ({NORM_HELP})"))),
    };
    norm.validate()?;
    Ok(norm)
}

fn parse_betas(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let lo = parse_number(parts[0], "beta grid start")?;
        let hi = parse_number(parts[1], "beta grid end")?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("malformed beta grid size '{}'", parts[2])))?;
        if n < 2 || lo >= hi {
            return Err(CliError::Parse(format!("beta grid '{spec}' needs lo < hi and n ≥ 2")));
        }
        return Ok((0..n).map(|i| grid_point(lo, hi, i, n)).collect());
    }
    spec.split(',').map(|b| parse_number(b, "beta")).collect()
}

fn risk_value(norm: &NormSpec, d: &DiscreteDistribution) -> CliResult<f64> {
    Ok(match norm {
        NormSpec::Holder(_) => d.mean(),
        NormSpec::Spectral(m) => spectral_risk(m, d),
        NormSpec::Expectile(a) => expectile(*a, d)?,
        NormSpec::KusuokaSup(_) => higher_order_risk(norm, 0.0, d)?.value,
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

fn verdict_report(v: &DominanceVerdict) -> VerdictReport {
    VerdictReport {
        outcome: v.outcome.as_str(),
        witness: v.witness.and_then(finite12),
        margin: round12(v.margin),
        levels: v.levels.iter().map(|&b| round12(b)).collect(),
    }
}

fn curve_csv(norm: &NormSpec, d: &DiscreteDistribution, betas: &[f64]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(["beta", "value", "t_star", "derivative", "f"]).map_err(io)?;
    for point in crate::higher_order::minimizer_curve(norm, d, betas)? {
        let derivative = (point.value - point.t_star) / (1.0 - point.beta);
        let f = (1.0 - point.beta) * point.value;
        writer
            .write_record([
                format_number(point.beta),
                format_number(point.value),
                format_number(point.t_star),
                format_number(derivative),
                format_number(f),
            ])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// 17 significant digits: parses back to the identical `f64`.
fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

fn info_text(d: &DiscreteDistribution, format: Format) -> String {
    match format {
        Format::Json => {
            let atoms: Vec<String> = d
                .atoms()
                .map(|(x, p)| format!("{{\"x\":{},\"p\":{}}}", exact(x), exact(p)))
                .collect();
            let s = d.summary();
            format!(
                "{{\"atoms\":[{}],\"mean\":{},\"essinf\":{},\"esssup\":{}}}\n",
                atoms.join(","),
                format_number(s.mean),
                format_number(s.essinf),
                format_number(s.esssup)
            )
        }
        Format::Csv => {
            let mut out = String::from("value,probability\n");
            for (x, p) in d.atoms() {
                out.push_str(&format!("{},{}\n", exact(x), exact(p)));
            }
            out
        }
    }
}

fn write_output(text: &str, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Risk { norm, input } => {
            let norm = parse_norm(&norm)?;
            let d = read_distribution(&input.path, input.weights)?;
            let value = round12(risk_value(&norm, &d)?);
            write_output(&json_line(&ValueReport { value }), None, out)
        }
        Command::Higher { norm, beta, input } => {
            let norm = parse_norm(&norm)?;
            let d = read_distribution(&input.path, input.weights)?;
            let r = higher_order_risk(&norm, beta, &d)?;
            let report = HigherReport {
                value: round12(r.value),
                t_star: finite12(r.t_star),
                u_beta: r.u_beta.map(round12),
            };
            write_output(&json_line(&report), None, out)
        }
        Command::Expectile { alpha, beta, input } => {
            let d = read_distribution(&input.path, input.weights)?;
            let e = expectile(alpha, &d)?;
            let kusuoka = if alpha >= 0.5 { Some(round12(expectile_kusuoka(alpha, &d)?)) } else { None };
            let higher_order = match beta {
                Some(b) => Some(round12(higher_order_expectile(alpha, b, &d)?)),
                None => None,
            };
            let report = ExpectileReport {
                expectile: round12(e),
                kusuoka,
                higher_order,
            };
            write_output(&json_line(&report), None, out)
        }
        Command::Dominance {
            order,
            norm,
            resolution,
            weights,
            x,
            y,
        } => {
            let dx = read_distribution(&x, weights)?;
            let dy = read_distribution(&y, weights)?;
            let verdict = match order.split_once(':') {
                None if order == "first" => first_order(&dx, &dy),
                None if order == "verify" => verify_dominance_with(&dx, &dy, &parse_norm(&norm)?, resolution)?,
                Some(("p", p)) => p_order(&dx, &dy, parse_number(p, "order")?)?,
                Some(("spectral", path)) => spectral_order(&dx, &dy, &read_mixture(Path::new(path))?),
                _ => {
                    return Err(CliError::Parse(format!(
                        "unknown order '{order}' (first | p:<order> | spectral:<file> | verify)"
                    )))
                }
            };
            write_output(&json_line(&verdict_report(&verdict)), None, out)
        }
        Command::Curve {
            norm,
            betas,
            output,
            input,
        } => {
            let norm = parse_norm(&norm)?;
            let betas = parse_betas(&betas)?;
            let d = read_distribution(&input.path, input.weights)?;
            write_output(&curve_csv(&norm, &d, &betas)?, output.as_deref(), out)
        }
        Command::Info { format, output, input } => {
            let d = read_distribution(&input.path, input.weights)?;
            write_output(&info_text(&d, format), output.as_deref(), out)
        }
    }
}

/// Runs the tool on `args` (including the program name), writing reports to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let line = text.lines().next().unwrap_or("error: invalid arguments");
                    let _ = writeln!(err, "{line}");
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the tool against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(args, &mut out, &mut err);
    let _ = out.flush();
    code
}
