use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sobolev_banach::suite::{self, OutputFormat, RunConfig, RunOverrides, CATALOG};

const SEED_ENV: &str = "SOBOLEV_BANACH_SEED";

#[derive(Parser)]
#[command(
    name = "sobolev-banach",
    version,
    about = "Run the Sobolev-Banach verification suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the entries of a JSON manifest.
    Run {
        /// Path to the manifest.
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run seed (overrides the manifest and SOBOLEV_BANACH_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = ["json", "csv", "both"])]
        format: Option<String>,
        /// Run only this entry; may be repeated.
        #[arg(long = "entry")]
        entries: Vec<String>,
        /// Number of refinement levels for default ladders.
        #[arg(long)]
        refine: Option<usize>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List every catalog entry with its anchor.
    ListEntries,
    /// Print the parameters, metrics and anchor of one entry.
    Describe { op: String },
}

fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV}={s:?} is not an unsigned integer")),
        Err(_) => Ok(None),
    }
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    format: Option<String>,
    entries: Vec<String>,
    refine: Option<usize>,
    workers: Option<usize>,
) -> Result<bool, String> {
    let cfg = RunConfig::from_path(&config).map_err(|e| e.to_string())?;
    let format: OutputFormat = match format {
        Some(f) => f.parse().map_err(|e: sobolev_banach::Error| e.to_string())?,
        None => cfg.format,
    };
    let overrides = RunOverrides {
        seed: seed.or(env_seed()?),
        output_dir: out,
        format: Some(format),
        entries,
        refine,
        workers,
    };
    let (report, meta) = suite::run_suite(&cfg, &overrides).map_err(|e| e.to_string())?;
    let dir = overrides.output_dir.clone().unwrap_or(cfg.output_dir.clone());
    report.write(&dir, format).map_err(|e| e.to_string())?;
    meta.write(&dir).map_err(|e| e.to_string())?;
    for e in &report.entries {
        println!("{:<28} {}", e.entry, if e.pass { "PASS" } else { "FAIL" });
    }
    for (entry, m) in report.failures() {
        eprintln!(
            "{entry}: {} = {} violates {} {}",
            m.metric,
            m.value,
            m.cmp.symbol(),
            m.threshold
        );
    }
    println!(
        "{} entries, {} failed metrics, seed {}, {:.1}s, reports in {}",
        report.entries.len(),
        report.failures().len(),
        report.seed,
        meta.total_seconds,
        dir.display()
    );
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListEntries => {
            for e in CATALOG {
                println!("{:<28} {:<16} {}", e.op, e.module, e.anchor);
            }
            ExitCode::SUCCESS
        }
        Command::Describe { op } => match suite::lookup(&op) {
            Some(e) => {
                print!("{}", suite::describe(e));
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown entry {op:?}; see list-entries");
                ExitCode::from(1)
            }
        },
        Command::Run {
            config,
            out,
            seed,
            format,
            entries,
            refine,
            workers,
        } => match run(config, out, seed, format, entries, refine, workers) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
