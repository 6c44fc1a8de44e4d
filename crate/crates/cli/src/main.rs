use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oltr_cli::experiment::default_workers;
use oltr_cli::output::{render_table, ttest_files};
use oltr_cli::{emit_outputs, load_config, run_experiment, CliError, CliResult, OutputPaths, RunOptions, WORKERS_ENV};
use oltr_core::letor::{generate_synthetic, write_letor, SyntheticSpec};
use oltr_core::Dataset64;

#[derive(Parser)]
#[command(name = "oltr-sim", version, about = "Seeded online learning to rank simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write curves, summary and table.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Output directory; defaults to the config's output.dir or ./results.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write each run's final model.
        #[arg(long)]
        dump_model: bool,
    },
    /// Load and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic dataset in LETOR format.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-tailed t-test on one column of two CSV files.
    Ttest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        column: String,
    },
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Run {
            config,
            seed,
            repeats,
            workers,
            out,
            dump_model,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(r) = repeats {
                cfg.repeats = r;
            }
            let dir = out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let opts = RunOptions {
                workers: workers.unwrap_or_else(default_workers),
                out_dir: Some(dir.clone()),
                dump_models: dump_model || cfg.output.dump_models,
            };
            let experiment = run_experiment(&cfg, &opts)?;
            let paths = OutputPaths::in_dir(&dir, &experiment.summary);
            emit_outputs(&experiment.summary, &experiment.results, &paths)?;
            print!("{}", render_table(&experiment.summary));
            eprintln!("wrote {}", dir.display());
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!(
                "{}: ok ({} conditions, {} repeats, {} impressions)",
                config.display(),
                cfg.conditions.len(),
                cfg.repeats,
                cfg.impressions
            );
        }
        Command::Synth { spec, out } => {
            let text = fs::read_to_string(&spec).map_err(|e| CliError::io(&spec, e))?;
            let spec: SyntheticSpec = serde_json::from_str(&text).map_err(|e| CliError::invalid("spec", e))?;
            let ds: Dataset64 = generate_synthetic(&spec)?;
            let file = File::create(&out).map_err(|e| CliError::io(&out, e))?;
            write_letor(&ds, BufWriter::new(file))?;
        }
        Command::Ttest { a, b, column } => {
            let report = ttest_files(&a, &b, &column)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("reports always serialize")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
