//! Thin CLI over the experiment harness: run suites, list them, replay a
//! recorded failure, or plot a report CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use maxlab::harness::{self, svg, ExperimentConfig};

#[derive(Parser)]
#[command(name = "maxlab", about = "Numerical experiments for local fractional maximal operators", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (or `all`) and write reports to the output directory.
    Run {
        /// Experiment name; see `maxlab list`.
        experiment: String,
        /// TOML configuration file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for CSV/JSON/SVG artifacts.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// List the available experiments.
    List,
    /// Re-execute the check stored in a failure record JSON file.
    Replay {
        /// Path to a failure_NNN.json produced by the invariant suite.
        file: PathBuf,
    },
    /// Render a report CSV (value column per case) as an SVG line plot.
    Plot {
        /// Report CSV written by `maxlab run`.
        csv: PathBuf,
        /// Output SVG path; defaults to the CSV path with extension .svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> maxlab::Result<bool> {
    match cli.command {
        Command::Run {
            experiment,
            config,
            out,
        } => {
            let cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::default(),
            };
            let names: Vec<&str> = if experiment == "all" {
                harness::EXPERIMENTS.to_vec()
            } else {
                vec![experiment.as_str()]
            };
            let mut all_passed = true;
            for name in names {
                let rep = harness::run(name, &cfg, &out)?;
                println!("{}", rep.summary());
                for row in rep.failures() {
                    println!(
                        "  FAIL {} [{}] value {:.6e} bound {:.6e} {}",
                        row.case_id, row.invariant, row.value, row.bound, row.flags
                    );
                }
                all_passed &= rep.passed();
            }
            Ok(all_passed)
        }
        Command::List => {
            for name in harness::EXPERIMENTS {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Replay { file } => {
            let (ok, msg) = harness::experiments::replay(&file)?;
            println!("{msg}");
            println!("{}", if ok { "check passes" } else { "check still fails" });
            Ok(ok)
        }
        Command::Plot { csv, out } => {
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            let series = series_from_report_csv(&csv)?;
            svg::plot_series(&series, &out)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
    }
}

/// Reads a report CSV and groups the value column into one series per
/// invariant, indexed by row order.
fn series_from_report_csv(path: &std::path::Path) -> maxlab::Result<Vec<(String, Vec<(f64, f64)>)>> {
    let text = std::fs::read_to_string(path)?;
    let mut series: std::collections::BTreeMap<String, Vec<(f64, f64)>> =
        std::collections::BTreeMap::new();
    for (i, line) in text.lines().skip(1).enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 6 {
            continue;
        }
        let (invariant, value) = (cols[3], cols[4]);
        if let Ok(v) = value.parse::<f64>() {
            if v.is_finite() {
                series
                    .entry(invariant.to_string())
                    .or_default()
                    .push((i as f64, v));
            }
        }
    }
    if series.is_empty() {
        return Err(maxlab::MaxlabError::Parse(format!(
            "no plottable rows in {}",
            path.display()
        )));
    }
    Ok(series.into_iter().collect())
}
