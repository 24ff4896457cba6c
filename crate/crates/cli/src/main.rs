//! `blaschke-lab`: batch runner for Blaschke product experiments.
//!
//! Exit status: 0 when every verification passes, 1 on a failed
//! verification, 2 on configuration or input errors, 3 when a hypothesis
//! certificate fails, 4 when quadrature misses its tolerance.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use blaschke_core::Error;
use commands::{run_experiment, Artifacts, Command};
use config::{config_error, Config, ConfigError};

#[derive(Debug, Parser)]
#[command(name = "blaschke-lab", version, about = "Integral means of Blaschke products: experiments and reports")]
struct Cli {
    /// Experiment file (`key = value` lines, `[command]` sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving the reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true)]
    quad_tol: Option<f64>,

    #[arg(long, global = true)]
    slope_tol: Option<f64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Extra `key=value` setting, applied on top of the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate a zero sequence and write it as a zero file.
    GenZeros,
    /// Blaschke, weighted and separation conditions of a sequence.
    Check,
    /// Integral means of B^(l) over the radial grid.
    Means,
    /// Estimation-lemma sums and their normalised ratios.
    Lemma,
    /// Growth exponent of the means in a report CSV.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Measure a theorem's growth exponent and compare with the prediction.
    Verify,
    /// Model-space derivative means and their normalised constant.
    Model,
    /// Log-log SVG chart of a report CSV.
    Chart {
        #[arg(long)]
        input: Option<PathBuf>,
        /// File name of the chart inside the output directory.
        #[arg(long)]
        output: Option<String>,
    },
}

impl Cmd {
    fn command(&self) -> Command {
        match self {
            Cmd::GenZeros => Command::GenZeros,
            Cmd::Check => Command::Check,
            Cmd::Means => Command::Means,
            Cmd::Lemma => Command::Lemma,
            Cmd::Fit { .. } => Command::Fit,
            Cmd::Verify => Command::Verify,
            Cmd::Model => Command::Model,
            Cmd::Chart { .. } => Command::Chart,
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Hypothesis(_) | Error::Divergent(_) | Error::Inconclusive(_) => 3,
                Error::ToleranceNotMet { .. } => 4,
                Error::Domain(_) | Error::Pole { .. } | Error::Order(_) | Error::Degenerate(_) | Error::Parse(_) => 2,
            };
        }
    }
    2
}

fn load_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for set in &cli.sets {
        let (k, v) = set.split_once('=').ok_or_else(|| config_error(format!("--set {set:?}: expected KEY=VALUE")))?;
        cfg.override_key(k.trim(), v.trim());
    }
    let cwd = std::env::current_dir().context("current directory")?;
    let absolute = |p: &Path| cwd.join(p).display().to_string();
    if let Some(x) = cli.quad_tol {
        cfg.override_key("quad_tol", &x.to_string());
    }
    if let Some(x) = cli.slope_tol {
        cfg.override_key("slope_tol", &x.to_string());
    }
    if let Some(x) = cli.seed {
        cfg.override_key("seed", &x.to_string());
    }
    match &cli.command {
        Cmd::Fit { input: Some(p) } | Cmd::Chart { input: Some(p), .. } => cfg.override_key("input", &absolute(p)),
        _ => {}
    }
    if let Cmd::Chart { output: Some(o), .. } = &cli.command {
        cfg.override_key("output", o);
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Rejects section names that belong to no command and global keys no
/// command understands.
fn validate(cfg: &Config) -> anyhow::Result<()> {
    for name in cfg.section_names() {
        let head = name.split_once('.').map_or(name, |(h, _)| h);
        if !Command::ALL.iter().any(|c| c.name() == head) {
            return Err(config_error(format!("unknown section [{name}]")));
        }
    }
    let all: Vec<&str> = Command::ALL.iter().flat_map(|c| c.known_keys()).collect();
    for k in cfg.global_keys() {
        if !all.contains(&k) {
            return Err(config_error(format!("unknown key {k:?}")));
        }
    }
    Ok(())
}

fn write_atomic(path: &Path, body: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| config_error(format!("output directory {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| config_error(format!("output directory {} not writable: {e}", dir.display())))?;
    tmp.write_all(body).with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path).map_err(|e| config_error(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load_config(cli)?;
    let cmd = cli.command.command();
    let known = cmd.known_keys();
    let experiments = cfg.experiments(cmd.name());
    // all keys are checked before anything is computed
    for sec in &experiments {
        sec.check_known(&known)?;
    }
    let mut art = Artifacts::new();
    for sec in &experiments {
        let label = sec.label.as_deref().map_or_else(|| cmd.name().to_string(), |l| format!("{}.{l}", cmd.name()));
        run_experiment(cmd, sec, &cli.out, &mut art).with_context(|| format!("experiment [{label}]"))?;
    }
    for (path, body) in &art.files {
        write_atomic(path, body)?;
    }
    for line in &art.lines {
        println!("{line}");
    }
    Ok(art.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
