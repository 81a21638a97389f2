use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dra_synth::scenario::{load_scenario, run, ReportFormat, ResultsTable, RowStatus, RunOptions};

#[derive(Parser)]
#[command(name = "dra-synth", version, about = "GA subarray thinning for GEO direct radiating arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize every beam of a scenario file into an output directory.
    Synthesize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Base seed; overrides the scenario's `ga.rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated 1-based beam positions.
        #[arg(long, value_delimiter = ',')]
        beams: Option<Vec<usize>>,
        /// Worker threads (0 = all cores).
        #[arg(long, env = "DRA_SYNTH_THREADS")]
        threads: Option<usize>,
        /// Measure the reported beams at half the search cut step.
        #[arg(long)]
        fine_report: bool,
        /// Write per-beam wall time into results.csv (breaks byte-identical reruns).
        #[arg(long)]
        wall_time: bool,
    },
    /// Render a run directory's results table.
    Report {
        /// Run directory written by `synthesize`.
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    #[value(alias = "md")]
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

fn synthesize(
    scenario: PathBuf,
    out: PathBuf,
    options: RunOptions,
    threads: Option<usize>,
) -> Result<bool, dra_synth::Error> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| dra_synth::Error::Config(format!("thread pool: {e}")))?;
    }
    let scenario = load_scenario(&scenario)?;
    let table = run(&scenario, &out, &options)?;
    let mut all_met = true;
    for row in &table.rows {
        let spec = &scenario
            .beams
            .iter()
            .find(|b| b.id == row.scenario)
            .expect("row comes from scenario")
            .spec;
        match (&row.status, &row.metrics) {
            (RowStatus::Ok, Some(m)) => {
                let met = m.sll_db >= spec.sll_min_db;
                all_met &= met;
                eprintln!(
                    "beam {}: bw {:.3}/{:.3}° SLL {:.2} dB EIRP {:.2} dBW, {} chains, cost {:.4}{}",
                    row.scenario,
                    m.bw_az_deg,
                    m.bw_el_deg,
                    m.sll_db,
                    m.eirp_dbw,
                    m.active_chains,
                    m.cost,
                    if met { "" } else { "  [SLL below minimum]" }
                );
            }
            (RowStatus::Error(msg), _) => {
                all_met = false;
                eprintln!("beam {}: failed: {msg}", row.scenario);
            }
            (RowStatus::Ok, None) => unreachable!("ok rows carry metrics"),
        }
    }
    print!("{}", table.to_markdown());
    Ok(all_met)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synthesize {
            scenario,
            out,
            seed,
            beams,
            threads,
            fine_report,
            wall_time,
        } => {
            let options = RunOptions {
                seed,
                beams,
                fine_report,
                record_wall_time: wall_time,
                ..RunOptions::default()
            };
            synthesize(scenario, out, options, threads)
        }
        Command::Report { dir, format } => ResultsTable::load(&dir).map(|t| {
            print!("{}", t.render(format.into()));
            true
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
