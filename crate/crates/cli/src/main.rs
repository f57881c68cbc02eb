use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use landfall_cli::pipeline::{self, StageOutcome};
use landfall_cli::{report, CliError, CliResult, ErrorKind, RunConfig};

#[derive(Parser)]
#[command(
    name = "landfall",
    version,
    about = "Community emotional response to hurricane landfall"
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(
        long,
        global = true,
        value_name = "PATH",
        default_value = "landfall.toml"
    )]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Do not render figures.
    #[arg(long, global = true)]
    no_figures: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Read, filter and period-label the corpus.
    Ingest,
    /// Score valence and word-category ratios per post.
    Score,
    /// Daily bootstrap against the trailing null window.
    Stats,
    /// Exponential fits around the landfall minimum.
    Fit,
    /// Term clustering and rank correlations between periods.
    Lexshift,
    /// Generate a synthetic corpus with known ground truth.
    Synth,
    /// Render SVG figures from existing tables.
    Report,
    /// All stages in order.
    Run,
}

fn execute(cmd: Command, cfg: &RunConfig) -> CliResult<()> {
    let mut notes = Vec::new();
    let outcome = match cmd {
        Command::Ingest => pipeline::ingest(cfg),
        Command::Score => pipeline::score(cfg),
        Command::Stats => pipeline::stats(cfg),
        Command::Fit => match pipeline::fit(cfg) {
            Ok(StageOutcome::Skipped(reason)) => {
                notes.push(format!("fit skipped: {reason}"));
                Ok(())
            }
            Ok(StageOutcome::Done) => Ok(()),
            Err(e) => Err(e),
        },
        Command::Lexshift => pipeline::lexshift(cfg),
        Command::Synth => pipeline::synth(cfg),
        Command::Report => {
            if cfg.figures {
                report::render(cfg).map(|_| ())
            } else {
                log::info!("figures disabled");
                Ok(())
            }
        }
        Command::Run => return pipeline::run(cfg),
    };
    match outcome {
        Ok(()) => pipeline::manifest(cfg, &notes),
        Err(e) if e.kind == ErrorKind::Fit => {
            notes.push(format!("fit failed: {}", e.message));
            pipeline::manifest(cfg, &notes)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = RunConfig::load(&cli.config).and_then(|mut cfg| {
        cfg.apply_overrides(cli.seed, cli.out.clone(), cli.no_figures);
        cfg.validate()?;
        execute(cli.command, &cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> ExitCode {
    log::error!("{e}");
    ExitCode::from(e.exit_code())
}
