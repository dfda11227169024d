//! Command-line experiment runner: TOML configs in, CSV traces and JSON summaries out.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 run contract violation or
//! failed verification.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::lowerbound::{lb_instances, lb_statistic};
use crate::model::{random_normalized, ConstraintKind, InstanceSpec, ValueMatrix};
use crate::opt::DEFAULT_GRID_CAP;
use crate::policies::{GridConfig, PolicyConfig, PolicyKind};
use crate::sim::{self, RunResult, RunSummary};
use crate::verify::{run_suite, Suite};

/// Bumped whenever a CSV or JSON schema changes.
pub const ARTIFACT_VERSION: &str = "fairdiv-artifacts/1";
pub const OUTPUT_DIR_ENV: &str = "FAIRDIV_OUTPUT_DIR";
pub const RUN_CSV_HEADER: [&str; 8] = ["t", "k_t", "i_t", "v_t", "regret_inc", "cum_regret", "min_slack", "event_e_flag"];
pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "param",
    "value",
    "seed",
    "policy",
    "final_regret",
    "max_violation",
    "disproportionality",
    "event_e_fraction",
    "pipeline_rounds",
    "error",
];
pub const LOWERBOUND_CSV_HEADER: [&str; 4] = ["instance", "seed", "statistic", "final_regret"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("run failed: {0}")]
    Run(#[from] Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Run(Error::InvalidArgument(_)) => 1,
            CliError::Run(_) | CliError::Verification(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuStarSpec {
    Rows(Vec<Vec<f64>>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub a: f64,
    pub b: f64,
    pub mu_star: MuStarSpec,
    /// Seed for `mu_star = "random_normalized"`; defaults to `seed`.
    #[serde(default)]
    pub mu_seed: Option<u64>,
    #[serde(default = "default_concentration")]
    pub concentration: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_concentration() -> f64 {
    1.0
}

fn default_scale() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    #[serde(default = "default_kind")]
    pub kind: PolicyKind,
    #[serde(default = "default_scale")]
    pub warmup_scale: f64,
    #[serde(default = "default_scale")]
    pub etc_scale: f64,
}

fn default_kind() -> PolicyKind {
    PolicyKind::UcbFair
}

impl Default for PolicySection {
    fn default() -> Self {
        PolicySection {
            kind: default_kind(),
            warmup_scale: 1.0,
            etc_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsSection {
    #[serde(default = "default_constraint_kind")]
    pub kind: ConstraintKind,
    /// Intersect confidence boxes with `[a, b]`.
    #[serde(default = "default_true")]
    pub clamp: bool,
}

fn default_constraint_kind() -> ConstraintKind {
    ConstraintKind::Proportionality
}

impl Default for ConstraintsSection {
    fn default() -> Self {
        ConstraintsSection {
            kind: default_constraint_kind(),
            clamp: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spacing {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cap {
    Count(u64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
    #[serde(default = "default_cap")]
    pub cap: Cap,
    #[serde(default)]
    pub sample_seed: u64,
}

fn default_spacing() -> Spacing {
    Spacing::Keyword("auto".into())
}

fn default_cap() -> Cap {
    Cap::Count(DEFAULT_GRID_CAP as u64)
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            spacing: default_spacing(),
            cap: default_cap(),
            sample_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub record_full_allocations: bool,
}

fn default_directory() -> PathBuf {
    PathBuf::from("fairdiv-out")
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            record_full_allocations: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub instance: InstanceSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub constraints: ConstraintsSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn instance_spec(&self) -> Result<InstanceSpec, CliError> {
        let ins = &self.instance;
        let mu_star = match &ins.mu_star {
            MuStarSpec::Rows(rows) => {
                ValueMatrix::from_rows(rows).map_err(|e| CliError::Config(format!("mu_star: {e}")))?
            }
            MuStarSpec::Named(name) if name == "random_normalized" => {
                let mut rng = ChaCha8Rng::seed_from_u64(ins.mu_seed.unwrap_or(ins.seed));
                random_normalized(ins.n, ins.m, ins.a, ins.b, ins.concentration, &mut rng)
                    .map_err(|e| CliError::Config(format!("mu_star: {e}")))?
            }
            MuStarSpec::Named(other) => {
                return Err(CliError::Config(format!(
                    "mu_star must be a list of rows or \"random_normalized\", got {other:?}"
                )))
            }
        };
        let spec = InstanceSpec {
            n: ins.n,
            m: ins.m,
            horizon: ins.horizon,
            a: ins.a,
            b: ins.b,
            mu_star,
            noise_sigma: ins.noise_sigma,
            seed: ins.seed,
            constraint_kind: self.constraints.kind,
        };
        if let Err(v) = spec.validate() {
            let msgs: Vec<String> = v.iter().map(|e| e.to_string()).collect();
            return Err(CliError::Config(msgs.join("; ")));
        }
        Ok(spec)
    }

    pub fn policy_config(&self) -> Result<PolicyConfig, CliError> {
        let spacing = match &self.grid.spacing {
            Spacing::Value(v) if *v > 0.0 && v.is_finite() => Some(*v),
            Spacing::Value(v) => return Err(CliError::Config(format!("grid.spacing must be positive, got {v}"))),
            Spacing::Keyword(k) if k == "auto" => None,
            Spacing::Keyword(k) => {
                return Err(CliError::Config(format!("grid.spacing must be a number or \"auto\", got {k:?}")))
            }
        };
        let cap = match &self.grid.cap {
            Cap::Count(0) => return Err(CliError::Config("grid.cap must be >= 1".into())),
            Cap::Count(c) => usize::try_from(*c).unwrap_or(usize::MAX),
            Cap::Keyword(k) if k == "inf" => usize::MAX,
            Cap::Keyword(k) => {
                return Err(CliError::Config(format!("grid.cap must be an integer or \"inf\", got {k:?}")))
            }
        };
        if !(self.policy.warmup_scale >= 0.0 && self.policy.etc_scale >= 0.0) {
            return Err(CliError::Config("policy scales must be nonnegative".into()));
        }
        Ok(PolicyConfig {
            kind: self.policy.kind,
            warmup_scale: self.policy.warmup_scale,
            etc_scale: self.policy.etc_scale,
            grid: GridConfig {
                spacing,
                cap,
                sample_seed: self.grid.sample_seed,
            },
            clamp: self.constraints.clamp,
        })
    }

    /// `--output-dir` beats the environment variable, which beats the config.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output.directory.clone(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fairdiv", version, about = "Online fair division experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configured run; writes run.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Vary one parameter over values and seeds; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of T, noise_sigma, policy.kind.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run a property suite and print a JSON report.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Lower-bound statistic on the hard envy-free instance pair; CSV on stdout.
    Lowerbound {
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, default_value = "ucb_fair")]
        policy: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        warmup_scale: f64,
    },
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes the per-round trace in the documented column order.
pub fn write_run_csv<W: Write>(result: &RunResult, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_CSV_HEADER)?;
    for (r, cum) in result.records.iter().zip(&result.cumulative_regret) {
        w.write_record([
            r.t.to_string(),
            r.k.to_string(),
            r.i.to_string(),
            fmt_f64(r.v),
            fmt_f64(r.regret_inc),
            fmt_f64(*cum),
            fmt_f64(r.min_slack),
            (r.in_box as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SummaryJson<'a> {
    pub artifact_version: &'a str,
    pub final_regret: f64,
    pub max_violation: f64,
    pub disproportionality: f64,
    pub event_e_fraction: f64,
    pub pipeline_rounds: usize,
    pub fallback_rounds: usize,
    pub warmup_rounds: usize,
    pub wall_time_s: f64,
    pub config: &'a RunConfigFile,
}

pub fn cmd_run(config: &Path, output_dir: Option<&Path>) -> Result<PathBuf, CliError> {
    let cfg = RunConfigFile::load(config)?;
    let spec = cfg.instance_spec()?;
    let policy = cfg.policy_config()?;
    let dir = cfg.output_dir(output_dir);
    let start = Instant::now();
    let result = sim::run(&spec, &policy, cfg.output.record_full_allocations)?;
    let summary = sim::summarize(&result)?;
    let wall = start.elapsed().as_secs_f64();
    fs::create_dir_all(&dir)?;
    write_run_csv(&result, fs::File::create(dir.join("run.csv"))?)?;
    let json = SummaryJson {
        artifact_version: ARTIFACT_VERSION,
        final_regret: summary.final_regret,
        max_violation: summary.max_violation,
        disproportionality: summary.disproportionality,
        event_e_fraction: summary.event_e_fraction,
        pipeline_rounds: summary.pipeline_rounds,
        fallback_rounds: summary.fallback_rounds,
        warmup_rounds: result.warmup_rounds,
        wall_time_s: wall,
        config: &cfg,
    };
    let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(dir.join("summary.json"), format!("{text}\n"))?;
    Ok(dir)
}

fn apply_sweep_value(
    param: &str,
    value: &str,
    spec: &InstanceSpec,
    policy: &PolicyConfig,
) -> Result<(InstanceSpec, PolicyConfig), CliError> {
    let bad = |e: String| CliError::Config(format!("sweep value {value:?} for {param}: {e}"));
    let (mut s, mut p) = (spec.clone(), *policy);
    match param {
        "T" => s.horizon = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
        "noise_sigma" => {
            s.noise_sigma = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?
        }
        "policy.kind" => p.kind = value.parse().map_err(|e: Error| bad(e.to_string()))?,
        other => {
            return Err(CliError::Config(format!(
                "unknown sweep parameter {other:?} (expected T, noise_sigma or policy.kind)"
            )))
        }
    }
    if let Err(v) = s.validate() {
        return Err(bad(v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")));
    }
    Ok((s, p))
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let h = v.len() / 2;
    if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    }
}

/// One row per `(value, seed)` followed by a median row for that value.
pub fn cmd_sweep(
    config: &Path,
    param: &str,
    values: &[String],
    seeds: &[u64],
    output_dir: Option<&Path>,
) -> Result<PathBuf, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    if seeds.is_empty() {
        return Err(CliError::Config("sweep needs at least one seed".into()));
    }
    let cfg = RunConfigFile::load(config)?;
    let spec = cfg.instance_spec()?;
    let policy = cfg.policy_config()?;
    let jobs = values
        .iter()
        .map(|v| apply_sweep_value(param, v, &spec, &policy))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = cfg.output_dir(output_dir);
    fs::create_dir_all(&dir)?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(SWEEP_CSV_HEADER)?;
    for (value, (s, p)) in values.iter().zip(&jobs) {
        let rows = sim::batch(std::slice::from_ref(s), std::slice::from_ref(p), seeds);
        let mut finals = Vec::new();
        let mut stats: [Vec<f64>; 4] = Default::default();
        for row in &rows {
            let (cols, err) = match &row.summary {
                Some(sm) => {
                    finals.push(sm.final_regret);
                    stats[0].push(sm.max_violation);
                    stats[1].push(sm.disproportionality);
                    stats[2].push(sm.event_e_fraction);
                    stats[3].push(sm.pipeline_rounds as f64);
                    (summary_cols(sm), String::new())
                }
                None => (vec![String::new(); 5], row.error.clone().unwrap_or_default()),
            };
            let mut rec = vec![param.to_string(), value.clone(), row.seed.to_string(), row.policy.to_string()];
            rec.extend(cols);
            rec.push(err);
            w.write_record(&rec)?;
        }
        let mut rec = vec![param.to_string(), value.clone(), "median".into(), p.kind.to_string()];
        rec.push(fmt_f64(median(finals)));
        for s in stats {
            rec.push(fmt_f64(median(s)));
        }
        rec.push(String::new());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(path)
}

fn summary_cols(sm: &RunSummary) -> Vec<String> {
    vec![
        fmt_f64(sm.final_regret),
        fmt_f64(sm.max_violation),
        fmt_f64(sm.disproportionality),
        fmt_f64(sm.event_e_fraction),
        sm.pipeline_rounds.to_string(),
    ]
}

pub fn cmd_verify<W: Write>(suite: &str, mut out: W) -> Result<bool, CliError> {
    let suite: Suite = suite.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    let report = run_suite(suite)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(report.passed)
}

pub fn cmd_lowerbound<W: Write>(
    horizon: usize,
    seeds: &[u64],
    policy: &str,
    sigma: f64,
    warmup_scale: f64,
    out: W,
) -> Result<(), CliError> {
    let kind: PolicyKind = policy.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    let pair = lb_instances(horizon).map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = PolicyConfig {
        warmup_scale,
        ..PolicyConfig::with_kind(kind)
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LOWERBOUND_CSV_HEADER)?;
    for (which, name) in [(1, "mu1"), (2, "mu2")] {
        for &seed in seeds {
            let r = sim::run(&pair.spec(which, sigma, seed), &cfg, true)?;
            w.write_record([
                name.to_string(),
                seed.to_string(),
                fmt_f64(lb_statistic(&r)?),
                fmt_f64(r.final_regret()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, output_dir } => {
            let dir = cmd_run(&config, output_dir.as_deref())?;
            eprintln!("wrote {}", dir.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            seeds,
            output_dir,
        } => {
            let path = cmd_sweep(&config, &param, &values, &seeds, output_dir.as_deref())?;
            eprintln!("wrote {}", path.display());
        }
        Command::Verify { suite } => {
            if !cmd_verify(&suite, std::io::stdout().lock())? {
                return Err(CliError::Verification(format!("suite {suite} reported failures")));
            }
        }
        Command::Lowerbound {
            horizon,
            seeds,
            policy,
            sigma,
            warmup_scale,
        } => cmd_lowerbound(horizon, &seeds, &policy, sigma, warmup_scale, std::io::stdout().lock())?,
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[instance]
n = 2
m = 2
T = 50
a = 0.2
b = 0.8
mu_star = [[0.8, 0.2], [0.2, 0.8]]
noise_sigma = 0.1
seed = 3
"#;

    #[test]
    fn parses_defaults() {
        let cfg = RunConfigFile::parse(BASE).unwrap();
        assert_eq!(cfg.policy.kind, PolicyKind::UcbFair);
        let p = cfg.policy_config().unwrap();
        assert_eq!(p.grid.cap, 512);
        assert_eq!(p.grid.spacing, None);
        assert!(cfg.instance_spec().is_ok());
    }

    #[test]
    fn unknown_key_is_named() {
        let text = BASE.replace("noise_sigma = 0.1", "sigma = 0.1");
        match RunConfigFile::parse(&text) {
            Err(CliError::Config(msg)) => assert!(msg.contains("sigma"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
        let text = format!("{BASE}\n[grid]\nwidth = 3\n");
        assert!(matches!(RunConfigFile::parse(&text), Err(CliError::Config(m)) if m.contains("width")));
    }

    #[test]
    fn grid_keywords() {
        let text = format!("{BASE}\n[grid]\nspacing = 0.05\ncap = \"inf\"\n");
        let p = RunConfigFile::parse(&text).unwrap().policy_config().unwrap();
        assert_eq!(p.grid.spacing, Some(0.05));
        assert_eq!(p.grid.cap, usize::MAX);
        let text = format!("{BASE}\n[grid]\ncap = \"lots\"\n");
        assert!(RunConfigFile::parse(&text).unwrap().policy_config().is_err());
    }

    #[test]
    fn random_mu_star_is_seeded() {
        let text = BASE.replace("mu_star = [[0.8, 0.2], [0.2, 0.8]]", "mu_star = \"random_normalized\"");
        let a = RunConfigFile::parse(&text).unwrap().instance_spec().unwrap();
        let b = RunConfigFile::parse(&text).unwrap().instance_spec().unwrap();
        assert_eq!(a.mu_star, b.mu_star);
        assert!(a.mu_star.is_normalized());
        let bad = BASE.replace("mu_star = [[0.8, 0.2], [0.2, 0.8]]", "mu_star = \"diagonal\"");
        assert!(RunConfigFile::parse(&bad).unwrap().instance_spec().is_err());
    }

    #[test]
    fn invalid_instance_is_config_error() {
        let text = BASE.replace("[0.2, 0.8]]", "[0.3, 0.8]]");
        let e = RunConfigFile::parse(&text).unwrap().instance_spec().unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("row 1"));
    }

    #[test]
    fn sweep_parameters() {
        let cfg = RunConfigFile::parse(BASE).unwrap();
        let (s, p) = (cfg.instance_spec().unwrap(), cfg.policy_config().unwrap());
        assert_eq!(apply_sweep_value("T", "70", &s, &p).unwrap().0.horizon, 70);
        assert_eq!(apply_sweep_value("policy.kind", "oracle", &s, &p).unwrap().1.kind, PolicyKind::Oracle);
        assert!(apply_sweep_value("noise_sigma", "-1", &s, &p).is_err());
        assert!(apply_sweep_value("a", "0.1", &s, &p).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(vec![]).is_nan());
    }
}
