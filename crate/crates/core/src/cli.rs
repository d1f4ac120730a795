//! Command-line front end: `simulate`, `estimate`, `profile` and `montecarlo`.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 invalid flags or config,
//! 3 autocovariance not embeddable, 4 series too short, 5 degenerate input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimators::{
    alpha_profile, closest_fourier_index, estimate_known_pole, estimate_pipeline,
    log_periodogram_alpha, log_periodogram_pole, BandWeights, BoundaryRegime, EstimatorConfig,
    MIN_PIPELINE_LEN,
};
use crate::inference::{alpha_ci, pole_ci, BiasInputs};
use crate::io::{fmt17, read_series, write_series};
use crate::montecarlo::{run_mc_with_workers, BandwidthOverrides, MCConfig};
use crate::simulate::{simulate, SimFamily, SimModel};
use crate::spectral::{averaged_periodogram, fourier_frequency, periodogram, TimeSeries};
use crate::weights::WeightSpec;

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "polefinder", version, about = "Spectral pole and memory parameter estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a Gaussian test series by circulant embedding.
    Simulate(SimulateArgs),
    /// Estimate the pole location and memory parameter of a series.
    Estimate(EstimateArgs),
    /// Export the pole-search profile over the Fourier grid.
    Profile(ProfileArgs),
    /// Run a Monte Carlo design from a JSON config.
    Montecarlo(MontecarloArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Farima,
    Gegenbauer,
    FlippedPi,
}

impl From<ModelArg> for SimFamily {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Farima => SimFamily::FarimaZeroPole,
            ModelArg::Gegenbauer => SimFamily::GegenbauerHalfPi,
            ModelArg::FlippedPi => SimFamily::FlippedPi,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in the open interval (0, 1), got {a}"))
    }
}

fn parse_level(s: &str) -> std::result::Result<f64, String> {
    let l: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if l > 0.5 && l < 1.0 {
        Ok(l)
    } else {
        Err(format!("level must lie in the open interval (0.5, 1), got {l}"))
    }
}

fn parse_pole(s: &str) -> std::result::Result<f64, String> {
    let l: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=std::f64::consts::PI).contains(&l) {
        Ok(l)
    } else {
        Err(format!("pole frequency must lie in [0, π], got {l}"))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BandwidthArgs {
    /// Pole-search band count.
    #[arg(long, conflicts_with = "auto_bandwidth")]
    pub k: Option<usize>,
    /// Smoothing span of the pole search.
    #[arg(long, conflicts_with = "auto_bandwidth")]
    pub k1: Option<usize>,
    /// Two-step band count.
    #[arg(long, conflicts_with = "auto_bandwidth")]
    pub m: Option<usize>,
    /// Smoothing span of the two-step estimator.
    #[arg(long, conflicts_with = "auto_bandwidth")]
    pub m1: Option<usize>,
    /// Use the default bandwidth rule (also the behaviour when no bandwidth is given).
    #[arg(long)]
    pub auto_bandwidth: bool,
    /// Two-column CSV (u, value) replacing the pole-search weight.
    #[arg(long)]
    pub psi_table: Option<PathBuf>,
    /// Two-column CSV (u, value) replacing the two-step weight.
    #[arg(long)]
    pub w_table: Option<PathBuf>,
}

impl BandwidthArgs {
    fn resolve(&self, n: usize) -> Result<EstimatorConfig> {
        if n < MIN_PIPELINE_LEN {
            return Err(Error::SeriesTooShort { n, min: MIN_PIPELINE_LEN });
        }
        let mut cfg = BandwidthOverrides {
            k: self.k,
            k1: self.k1,
            m: self.m,
            m1: self.m1,
        }
        .resolve(n)?;
        if let Some(p) = &self.psi_table {
            cfg.psi = WeightSpec::from_csv_path(p)?;
        }
        if let Some(p) = &self.w_table {
            cfg.w = WeightSpec::from_csv_path(p)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Column to read when the file has a header.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bandwidths: BandwidthArgs,
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Known pole frequency in radians; skips the search.
    #[arg(long, value_parser = parse_pole)]
    pub known_pole: Option<f64>,
    /// Also report the log-periodogram comparators.
    #[arg(long)]
    pub with_log_periodogram: bool,
    /// Rate constant c in m = c n^{4/5}, for the bias-corrected interval.
    #[arg(long, requires = "bias_log_g_dd")]
    pub bias_c: Option<f64>,
    /// Second derivative of log g at the pole, for the bias-corrected interval.
    #[arg(long, requires = "bias_c")]
    pub bias_log_g_dd: Option<f64>,
    /// Write the result here (with a manifest beside it) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bandwidths: BandwidthArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "POLEFINDER_WORKERS")]
    pub workers: Option<usize>,
}

/// Command, resolved parameters, version and time of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub artifact_version: &'static str,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value) -> Self {
        Self {
            command: command.to_owned(),
            parameters,
            artifact_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Writes `<output>.manifest.json` next to `output`.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::DomainError { .. }
        | Error::BandwidthTooLarge { .. }
        | Error::InvalidWeight(_)
        | Error::Json(_) => 2,
        Error::NotEmbeddable { .. } => 3,
        Error::SeriesTooShort { .. } => 4,
        Error::DegenerateBand(_) | Error::NonFiniteInput { .. } | Error::AlphaNonPositive(_) => 5,
        Error::QuadratureFailure { .. } | Error::Io(_) | Error::Csv(_) => 1,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code, writing results to `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Estimate(a) => cmd_estimate(&a, stdout),
        Command::Profile(a) => cmd_profile(&a),
        Command::Montecarlo(a) => cmd_montecarlo(&a, stdout),
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let model = SimModel::new(a.model.into(), a.alpha, a.n as usize, a.seed)?;
    let x = simulate(&model)?;
    write_series(&a.out, &x)?;
    RunManifest::new("simulate", serde_json::to_value(model)?).write_beside(&a.out)?;
    Ok(())
}

fn load(input: &InputArgs) -> Result<TimeSeries> {
    read_series(&input.input, input.column.as_deref())
}

fn input_params(input: &InputArgs, cfg: &EstimatorConfig) -> Value {
    json!({
        "input": input.input,
        "column": input.column,
        "bandwidths": cfg.bandwidths(),
        "psi_weight": cfg.psi.kind(),
        "w_weight": cfg.w.kind(),
    })
}

fn cmd_estimate(a: &EstimateArgs, stdout: &mut dyn Write) -> Result<()> {
    let x = load(&a.input)?;
    let n = x.len();
    let cfg = a.bandwidths.resolve(n)?;
    let bias = match (a.bias_c, a.bias_log_g_dd) {
        (Some(c), Some(log_g_dd)) => Some(BiasInputs { c, log_g_dd }),
        _ => None,
    };

    let mut out = serde_json::Map::new();
    out.insert("schema_version".into(), json!(OUTPUT_SCHEMA_VERSION));
    out.insert("n".into(), json!(n));
    let memory = match a.known_pole {
        Some(lambda0) => {
            let q = closest_fourier_index(lambda0, n);
            out.insert("known_pole".into(), json!(lambda0));
            out.insert("q_hat".into(), json!(q));
            out.insert("lambda_hat".into(), json!(fourier_frequency(q as i64, n)));
            out.insert("regime".into(), json!(BoundaryRegime::classify(q, n)));
            out.insert("pole_ci".into(), Value::Null);
            estimate_known_pole(&x, &cfg, lambda0)?
        }
        None => {
            let est = estimate_pipeline(&x, &cfg)?;
            out.insert("q_hat".into(), json!(est.pole.q_hat));
            out.insert("lambda_hat".into(), json!(est.pole.lambda_hat));
            out.insert("regime".into(), json!(est.pole.boundary_regime));
            let ci = pole_ci(&est.pole, est.memory.alpha, n, cfg.k, cfg.psi.constants(), a.level);
            match ci {
                Ok(ci) => out.insert("pole_ci".into(), serde_json::to_value(ci)?),
                Err(e @ Error::AlphaNonPositive(_)) => {
                    out.insert("pole_ci_unavailable".into(), json!(e.to_string()));
                    out.insert("pole_ci".into(), Value::Null)
                }
                Err(e) => return Err(e),
            };
            est.memory
        }
    };
    out.insert("alpha_two_step".into(), json!(memory.alpha));
    out.insert("alpha_out_of_range".into(), json!(memory.out_of_range));
    out.insert("anchor_q".into(), json!(memory.anchor_q));
    let aci = alpha_ci(&memory, cfg.m, cfg.w.constants(), a.level, bias)?;
    out.insert("alpha_ci".into(), serde_json::to_value(aci)?);
    out.insert("bandwidths".into(), serde_json::to_value(cfg.bandwidths())?);

    if a.with_log_periodogram {
        let grid = periodogram(&x);
        let pole = log_periodogram_pole(&grid, cfg.k)?;
        let anchor = match a.known_pole {
            Some(l) => closest_fourier_index(l, n),
            None => pole.q_hat,
        };
        let alpha_log = log_periodogram_alpha(anchor, &grid, cfg.m)?;
        out.insert(
            "log_periodogram".into(),
            json!({
                "q_tilde": pole.q_hat,
                "lambda_tilde": pole.lambda_hat,
                "alpha": alpha_log.alpha,
                "anchor_q": alpha_log.anchor_q,
            }),
        );
    }

    let mut params = input_params(&a.input, &cfg);
    params["level"] = json!(a.level);
    params["known_pole"] = json!(a.known_pole);
    params["with_log_periodogram"] = json!(a.with_log_periodogram);
    params["bias"] = json!(bias);
    let manifest = RunManifest::new("estimate", params);

    let text = match a.format {
        Format::Json => {
            if a.out.is_none() {
                out.insert("manifest".into(), serde_json::to_value(&manifest)?);
            }
            serde_json::to_string_pretty(&Value::Object(out))? + "\n"
        }
        Format::Csv => estimate_csv(&out),
    };
    match &a.out {
        Some(path) => {
            fs::write(path, text)?;
            manifest.write_beside(path)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Flattens the estimate object into one header row and one value row.
fn estimate_csv(out: &serde_json::Map<String, Value>) -> String {
    fn flatten(prefix: &str, v: &Value, cols: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}_{k}") };
                    flatten(&key, v, cols);
                }
            }
            Value::Number(x) if !x.is_u64() && !x.is_i64() => {
                cols.push((prefix.to_owned(), fmt17(x.as_f64().unwrap_or(f64::NAN))))
            }
            Value::String(s) => cols.push((prefix.to_owned(), s.clone())),
            Value::Null => cols.push((prefix.to_owned(), String::new())),
            other => cols.push((prefix.to_owned(), other.to_string())),
        }
    }
    let mut cols = Vec::new();
    flatten("", &Value::Object(out.clone()), &mut cols);
    let header: Vec<&str> = cols.iter().map(|(k, _)| k.as_str()).collect();
    let values: Vec<&str> = cols.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn cmd_profile(a: &ProfileArgs) -> Result<()> {
    let x = load(&a.input)?;
    let n = x.len();
    let cfg = a.bandwidths.resolve(n)?;
    // Same checks as the estimator, so the argmax row matches `estimate`.
    let q_hat = estimate_pipeline(&x, &cfg)?.pole.q_hat;
    let spectrum = averaged_periodogram(&periodogram(&x), cfg.k1)?;
    let profile = alpha_profile(&spectrum, &BandWeights::new(&cfg.psi, cfg.k)?)?;
    debug_assert_eq!(profile.argmax(), q_hat);
    let mut text = String::from("q,lambda_q,alpha_hat\n");
    for (q, v) in profile.values.iter().enumerate() {
        text.push_str(&format!("{q},{},{}\n", fmt17(fourier_frequency(q as i64, n)), fmt17(*v)));
    }
    fs::write(&a.out, text)?;
    RunManifest::new("profile", input_params(&a.input, &cfg)).write_beside(&a.out)?;
    Ok(())
}

fn cmd_montecarlo(a: &MontecarloArgs, stdout: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&a.config)?;
    let cfg = MCConfig::from_json(&text)?;
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if workers == 0 {
        return Err(Error::InvalidParameter("--workers must be at least 1".into()));
    }
    let report = run_mc_with_workers(&cfg, workers)?;
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("report.csv"), report.to_csv())?;
    fs::write(a.out.join("report.json"), report.to_json()? + "\n")?;
    let timings: serde_json::Map<String, Value> = report
        .timings()
        .into_iter()
        .map(|(k, t)| (k, json!(t)))
        .collect();
    let manifest = RunManifest::new(
        "montecarlo",
        json!({
            "config": cfg,
            "config_path": a.config,
            "workers": workers,
            "bandwidths": report.provenance.bandwidths,
            "wall_time_seconds": timings,
        }),
    );
    fs::write(
        a.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    stdout.write_all(report.to_table().as_bytes())?;
    Ok(())
}
