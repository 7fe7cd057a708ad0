//! Command-line front end: `run` evaluates a TOML sweep config, `scenario`
//! evaluates a built-in bundle.
//!
//! Exit codes: 0 on a clean run, 2 when some points failed (their rows carry
//! the message in the error column), 1 for config or I/O problems.

use std::error::Error;
use std::fs;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use udn_sweep::emit::write_table;
use udn_sweep::scenario::{builtin_scenarios, find_scenario};
use udn_sweep::{run_sweep, OutputFormat, ResultRow, SweepOutcome, SweepSpec};

#[derive(Parser)]
#[command(
    name = "udn-sweep",
    version,
    about = "Coverage and ASE sweeps over BS density for dense small-cell networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Run {
        /// Path to the sweep config.
        #[arg(long)]
        config: PathBuf,
        /// Output file; defaults to the config's output path, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output encoding (csv or json); overrides the config.
        #[arg(long, value_parser = OutputFormat::from_str)]
        format: Option<OutputFormat>,
        /// Worker threads; defaults to UDN_SWEEP_THREADS, else all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a built-in scenario bundle.
    Scenario {
        /// Scenario name; see --list.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// List the available scenarios and exit.
        #[arg(long, conflicts_with = "name")]
        list: bool,
        /// Output file; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output encoding (csv or json).
        #[arg(long, value_parser = OutputFormat::from_str)]
        format: Option<OutputFormat>,
        /// Worker threads; defaults to UDN_SWEEP_THREADS, else all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether any point failed.
fn dispatch(cli: Cli) -> Result<bool, Box<dyn Error>> {
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            threads,
        } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let spec = SweepSpec::parse(&text)?;
            let path = out.or_else(|| spec.output_path.clone());
            let format = format.unwrap_or(spec.format);
            let outcome = run_on_pool(resolve_threads(threads)?, std::slice::from_ref(&spec))?;
            finish(&outcome, format, path.as_deref())
        }
        Command::Scenario {
            name,
            list,
            out,
            format,
            threads,
        } => {
            if list {
                for s in builtin_scenarios() {
                    println!("{:24}{}", s.name, s.description);
                }
                return Ok(false);
            }
            let name = name.expect("clap enforces name unless --list");
            let scenario = find_scenario(&name).ok_or_else(|| {
                let known: Vec<_> = builtin_scenarios().iter().map(|s| s.name).collect();
                format!("unknown scenario `{name}`; available: {}", known.join(", "))
            })?;
            let outcome = run_on_pool(resolve_threads(threads)?, &scenario.sweeps)?;
            finish(&outcome, format.unwrap_or_default(), out.as_deref())
        }
    }
}

fn finish(
    outcome: &SweepOutcome,
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<bool, Box<dyn Error>> {
    match path {
        Some(p) => {
            let file =
                fs::File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?;
            write_table(&outcome.rows, format, BufWriter::new(file))?;
        }
        None => write_table(&outcome.rows, format, io::stdout().lock())?,
    }
    if outcome.any_failed {
        let failed = outcome.rows.iter().filter(|r| point_failed(r)).count();
        eprintln!(
            "{failed} of {} points failed; see the error column",
            outcome.rows.len()
        );
    }
    Ok(outcome.any_failed)
}

fn point_failed(row: &ResultRow) -> bool {
    row.p_cov.is_none()
        && row.ase_bps_hz_km2.is_none()
        && !row.error.is_empty()
        && !row.error.starts_with("skipped:")
}

fn resolve_threads(cli: Option<usize>) -> Result<Option<usize>, Box<dyn Error>> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var("UDN_SWEEP_THREADS") {
        Ok(v) => {
            let n = v
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("UDN_SWEEP_THREADS must be a thread count, got `{v}`"))?;
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn run_on_pool(
    threads: Option<usize>,
    specs: &[SweepSpec],
) -> Result<SweepOutcome, Box<dyn Error>> {
    match threads {
        None => Ok(run_sweep(specs)),
        Some(0) => Err("thread count must be at least 1".into()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(|| run_sweep(specs)))
        }
    }
}
