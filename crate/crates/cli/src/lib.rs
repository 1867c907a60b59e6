//! `bbell`: sweeps, reports and Monte Carlo runs for Bell tests with
//! entangled Bernoulli states of two cavities.
//!
//! Each run writes its report to `--out` (or stdout) and a manifest next to
//! it; `bbell replay <manifest>` repeats the run and rewrites the same files.

pub mod commands;
pub mod manifest;
pub mod parse;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bernoulli_bell::DEFAULT_N_MAX;
use clap::{Parser, Subcommand};

use commands::{CovarianceArgs, GenerateArgs, PscanArgs, ScanArgs, SensitivityArgs, SimulateArgs};
use manifest::{RunManifest, VERSION};
use report::{Format, Rendered, Report};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "bbell",
    version,
    about = "Bell tests with entangled Bernoulli cavity states"
)]
pub struct Cli {
    /// Seed of the Monte Carlo random streams.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Photon-number cutoff of each cavity.
    #[arg(long = "n-max", global = true, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Output file; `<out>.manifest` (and `<out>.summary` for CSV tables with
    /// extra results) are written alongside. Without it the report goes to
    /// stdout and the manifest to stderr.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Defaults to csv for tabular reports and keyvalue otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// S_B against the degree of entanglement G at p = 1/2.
    Scan(ScanArgs),
    /// S_B against p with the argmax.
    Pscan(PscanArgs),
    /// Field expectations, correlation and covariance.
    Covariance(CovarianceArgs),
    /// Monte Carlo CHSH experiment with probe atoms.
    Simulate(SimulateArgs),
    /// Fidelity of the atom-cavity generation sequence.
    Generate(GenerateArgs),
    /// Timing-error sweep of fidelity and S_B.
    Sensitivity(SensitivityArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scan(_) => "scan",
            Command::Pscan(_) => "pscan",
            Command::Covariance(_) => "covariance",
            Command::Simulate(_) => "simulate",
            Command::Generate(_) => "generate",
            Command::Sensitivity(_) => "sensitivity",
            Command::Replay { .. } => "replay",
        }
    }
}

/// A computed run: rendered text plus the manifest describing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub report: Report,
    pub rendered: Rendered,
    pub manifest: RunManifest,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn summary_path(out: &Path) -> PathBuf {
    with_suffix(out, ".summary")
}

pub fn manifest_path(out: &Path) -> PathBuf {
    with_suffix(out, ".manifest")
}

/// Runs the computation without any I/O.
pub fn execute(cli: &Cli) -> Result<Execution> {
    let (report, params) = match &cli.command {
        Command::Scan(a) => (a.run(cli.n_max)?, a.params()),
        Command::Pscan(a) => (a.run()?, a.params()),
        Command::Covariance(a) => (a.run(cli.n_max)?, a.params()),
        Command::Simulate(a) => (a.run(cli.seed, cli.n_max)?, a.params()),
        Command::Generate(a) => (a.run(cli.n_max)?, a.params()),
        Command::Sensitivity(a) => (a.run(cli.n_max)?, a.params()),
        Command::Replay { .. } => anyhow::bail!("replay has no report of its own"),
    };
    let format = cli.format.unwrap_or_else(|| report.default_format());
    let rendered = report.render(format);
    let mut outputs = Vec::new();
    if let Some(out) = &cli.out {
        outputs.push(out.clone());
        if rendered.summary.is_some() {
            outputs.push(summary_path(out));
        }
    }
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        version: VERSION.to_string(),
        seed: cli.seed,
        n_max: cli.n_max,
        format: format.name().to_string(),
        params,
        outputs,
    };
    Ok(Execution {
        report,
        rendered,
        manifest,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Executes `cli` and writes its outputs.
pub fn run(cli: &Cli) -> Result<()> {
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest);
    }
    let exec = execute(cli)?;
    match &cli.out {
        Some(out) => {
            write_file(out, &exec.rendered.main)?;
            if let Some(summary) = &exec.rendered.summary {
                write_file(&summary_path(out), summary)?;
            }
            write_file(&manifest_path(out), &exec.manifest.render())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(exec.rendered.main.as_bytes())?;
            if let Some(summary) = &exec.rendered.summary {
                stdout.write_all(b"\n")?;
                stdout.write_all(summary.as_bytes())?;
            }
            eprint!("{}", exec.manifest.render());
        }
    }
    Ok(())
}

/// Parses a manifest and repeats its run.
pub fn replay(manifest: &Path) -> Result<()> {
    let text =
        fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let recorded = RunManifest::parse(&text)?;
    let cli = Cli::try_parse_from(recorded.to_args())
        .context("manifest parameters are not a valid command line")?;
    anyhow::ensure!(
        !matches!(cli.command, Command::Replay { .. }),
        "a manifest cannot record a replay"
    );
    run(&cli)
}
