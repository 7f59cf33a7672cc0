//! Command-line harness for the cosmosim engine.
//!
//! Exit codes: 0 success, 1 runtime error, 2 validation rejection,
//! 3 bad arguments.

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use cosmosim::engine::{
    export_relationship_dot, relationship_at, BackendConfig, Universe, UniverseConfig,
};
use cosmosim::experiment::{
    run_experiment_delay_contrast, run_experiment_survival, write_run_artifacts, ExperimentSpec,
};
use cosmosim::protocol::RawDecisionText;
use cosmosim::secretary::{validate, CivSnapshot, SecretaryVerdict};
use cosmosim::stick::read_stick_dir;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cosmosim", version, about = "Multi-civilization simulation engine and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write sticks, relationship maps and a summary
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured number of rounds
        #[arg(long)]
        rounds: Option<u32>,
        /// Override the configured seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a decision text file against a civilization snapshot
    Validate {
        /// Decision text in the response template
        #[arg(long)]
        decision: PathBuf,
        /// Civilization snapshot as JSON
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Re-run a recorded simulation deterministically from its transcript
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment from a spec file and write CSV tables
    Experiment {
        #[command(subcommand)]
        kind: ExperimentCommand,
    },
    /// Print a finished run's relationship map as DOT
    #[command(name = "export-map")]
    ExportMap {
        /// A run output directory (as written by `run`)
        #[arg(long)]
        stick: PathBuf,
        #[arg(long)]
        round: u32,
        #[arg(long, value_parser = ["dot"], default_value = "dot")]
        format: String,
    },
    /// Print per-civilization production-capability trajectories as CSV
    Growth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rounds: Option<u32>,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Survival rates across development stages and constellations
    Survival {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decision changes between paired real-time and delayed runs
    Delay {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: &Path, rounds: Option<u32>, seed: Option<u64>) -> Result<UniverseConfig> {
    let mut config = UniverseConfig::load(path)
        .with_context(|| format!("loading config {}", path.display()))?;
    if let Some(rounds) = rounds {
        config.rounds = rounds;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run {
            config,
            rounds,
            seed,
            out,
        } => {
            let config = load_config(&config, rounds, seed)?;
            let mut universe = Universe::new(config)?;
            let run_result = universe.run();
            // Flush whatever completed, even after a failed round.
            write_run_artifacts(&out, &universe)?;
            run_result.with_context(|| "run aborted; partial archive was written")?;
            println!(
                "completed {} rounds; artifacts in {}",
                universe.rounds_executed(),
                out.display()
            );
            Ok(0)
        }
        Command::Validate { decision, snapshot } => {
            let text = fs::read_to_string(&decision)
                .with_context(|| format!("reading decision {}", decision.display()))?;
            let snapshot: CivSnapshot = serde_json::from_str(
                &fs::read_to_string(&snapshot)
                    .with_context(|| format!("reading snapshot {}", snapshot.display()))?,
            )
            .context("snapshot is not valid JSON")?;
            match validate(&RawDecisionText::new(text), &snapshot) {
                (SecretaryVerdict::Approved, _) => {
                    println!("Approved");
                    Ok(0)
                }
                (verdict @ SecretaryVerdict::Rejected { .. }, _) => {
                    println!("Rejected: {}", verdict.rejection_reason());
                    Ok(2)
                }
            }
        }
        Command::Replay {
            transcript,
            config,
            out,
        } => {
            let mut config = load_config(&config, None, None)?;
            for civ in &mut config.civs {
                if matches!(civ.backend, BackendConfig::Llm { .. }) {
                    civ.backend = BackendConfig::Replay {
                        transcript: transcript.clone(),
                    };
                }
            }
            let mut universe = Universe::new(config)?;
            universe.run()?;
            if let Some(out) = &out {
                write_run_artifacts(out, &universe)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&universe.summary()).context("summary")?
            );
            Ok(0)
        }
        Command::Experiment { kind } => match kind {
            ExperimentCommand::Survival { spec, out } => {
                let spec = ExperimentSpec::load(&spec)?;
                let ExperimentSpec::Survival(spec) = spec else {
                    anyhow::bail!("spec file is not a survival experiment");
                };
                let report = run_experiment_survival(&spec)?;
                fs::create_dir_all(&out)?;
                let csv = report.to_csv();
                fs::write(out.join("survival.csv"), &csv)?;
                print!("{csv}");
                Ok(0)
            }
            ExperimentCommand::Delay { spec, out } => {
                let spec = ExperimentSpec::load(&spec)?;
                let ExperimentSpec::Delay(spec) = spec else {
                    anyhow::bail!("spec file is not a delay experiment");
                };
                fs::create_dir_all(&out)?;
                let table = run_experiment_delay_contrast(&spec, Some(&out))?;
                let csv = table.to_csv();
                fs::write(out.join("delay_metrics.csv"), &csv)?;
                print!("{csv}");
                Ok(0)
            }
        },
        Command::ExportMap {
            stick,
            round,
            format: _,
        } => {
            let config = UniverseConfig::load(&stick.join("config.json"))
                .with_context(|| format!("reading {}/config.json", stick.display()))?;
            let archive = read_stick_dir(&stick.join("sticks"))?;
            let map = relationship_at(&config, &archive, round);
            let names: Vec<String> = config.civs.iter().map(|c| c.name.clone()).collect();
            print!("{}", export_relationship_dot(&map, &names));
            Ok(0)
        }
        Command::Growth { config, rounds } => {
            let config = load_config(&config, rounds, None)?;
            let mut universe = Universe::new(config)?;
            universe.run()?;
            let mut csv = String::from("civ,round,production_capability\n");
            for (name, records) in universe.stick() {
                for record in records {
                    csv.push_str(&format!(
                        "{},{},{:?}\n",
                        name,
                        record.round,
                        record.resources.production()
                    ));
                }
            }
            print!("{csv}");
            Ok(0)
        }
    }
}
