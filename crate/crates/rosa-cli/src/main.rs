use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rosa_cli::commands::{
    self, RunConfig, EXIT_INTERNAL, EXIT_MISSION, EXIT_OK, EXIT_VALIDATION,
};
use rosa_core::sim::MissionResult;

/// Knowledge-based task-and-architecture co-adaptation engine.
#[derive(Parser)]
#[command(name = "rosa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario file and report its element counts.
    Validate {
        /// Scenario file path.
        scenario: PathBuf,
    },
    /// Run a scenario deterministically.
    Run {
        /// Scenario file path.
        #[arg(long)]
        scenario: PathBuf,
        /// Tick budget.
        #[arg(long, default_value_t = 1000)]
        ticks: i64,
        /// Random seed (only soak-test plant modes consume randomness).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the run trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the metrics summary to this file.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Suppress the metrics summary on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// Load a model and print a derived set.
    Query {
        /// Scenario file path.
        scenario: PathBuf,
        /// One of: selectable-actions, adaptable-functions,
        /// adaptable-components, selectable-designs, selectable-configs.
        query: String,
        /// Owner name for selectable-designs / selectable-configs.
        owner: Option<String>,
        /// Measurement override, e.g. --set battery_level=0.2 (repeatable).
        #[arg(long = "set", value_parser = parse_override)]
        set: Vec<(String, f64)>,
    },
    /// Generate a hypothetical minimal-adaptation scenario.
    Generate {
        /// Number of actions.
        #[arg(long, default_value_t = 1)]
        actions: u32,
        /// Structural adaptations per action.
        #[arg(long, default_value_t = 0)]
        sa: u32,
        /// Parameter adaptations per action.
        #[arg(long, default_value_t = 0)]
        pa: u32,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let value: f64 = v.parse().map_err(|_| format!("bad number '{v}'"))?;
    if !value.is_finite() {
        return Err(format!("value must be finite, got '{v}'"));
    }
    Ok((k.to_string(), value))
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario } => match commands::cmd_validate(&scenario) {
            Ok(report) => {
                println!(
                    "{} entities, {} relations, {} total",
                    report.counts.entities,
                    report.counts.relations,
                    report.counts.total()
                );
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                EXIT_VALIDATION
            }
        },
        Command::Run { scenario, ticks, seed, trace, metrics, quiet } => {
            let config = RunConfig {
                scenario: &scenario,
                max_ticks: ticks,
                seed,
                trace_out: trace.as_deref(),
                metrics_out: metrics.as_deref(),
                quiet,
            };
            match commands::cmd_run(&config) {
                Ok(report) => {
                    if !quiet {
                        print!("{}", report.metrics_text);
                    }
                    match report.result {
                        MissionResult::Success => EXIT_OK,
                        MissionResult::Failure | MissionResult::Timeout => EXIT_MISSION,
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_VALIDATION
                }
            }
        }
        Command::Query { scenario, query, owner, set } => {
            match commands::cmd_query(&scenario, &query, owner.as_deref(), &set) {
                Ok(names) => {
                    println!("{}", names.join(", "));
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_VALIDATION
                }
            }
        }
        Command::Generate { actions, sa, pa, out } => {
            match commands::cmd_generate(actions, sa, pa, &out) {
                Ok(report) => {
                    println!("predicted {} = counted {}", report.predicted, report.counted);
                    if report.predicted == report.counted {
                        EXIT_OK
                    } else {
                        EXIT_INTERNAL
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_VALIDATION
                }
            }
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(u8::try_from(run()).unwrap_or(3))
}
