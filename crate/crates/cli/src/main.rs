use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entclass::{run_explain, run_gen, run_reduce, run_report, run_rotation_study, run_train};
use entclass::{PipelineError, RunConfig};

#[derive(Parser)]
#[command(
    name = "entclass",
    about = "Entanglement-classification pipeline: dataset generation, training, Shapley attribution, measurement reduction",
    version
)]
struct Cli {
    /// Run configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output run directory
    #[arg(long, global = true, default_value = "run")]
    out: PathBuf,
    /// Override the configured global seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the labeled dataset and manifest
    Gen,
    /// Train the configured model(s) on the stored dataset
    Train,
    /// Compute Shapley attributions and importance rankings
    Explain,
    /// Run measurement-reduction curves and subset studies
    Reduce,
    /// Collate artifacts into summary.json
    Report,
    /// Empirical studies
    Study {
        #[command(subcommand)]
        kind: StudyKind,
    },
}

#[derive(Subcommand)]
enum StudyKind {
    /// Held-initialization input-rotation experiment
    Rotation,
}

fn load_config(cli: &Cli) -> Result<RunConfig, PipelineError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| PipelineError::usage("--config is required for this command"))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    if let Some(n) = cli.threads {
        // ignore the error if a pool already exists (e.g. repeated calls in
        // tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Gen => {
            run_gen(&load_config(cli)?, &cli.out)?;
        }
        Command::Train => {
            run_train(&load_config(cli)?, &cli.out)?;
        }
        Command::Explain => {
            run_explain(&load_config(cli)?, &cli.out)?;
        }
        Command::Reduce => {
            run_reduce(&load_config(cli)?, &cli.out)?;
        }
        Command::Report => {
            run_report(&cli.out)?;
        }
        Command::Study { kind } => match kind {
            StudyKind::Rotation => {
                run_rotation_study(&load_config(cli)?, &cli.out)?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class.exit_code() as u8)
        }
    }
}
