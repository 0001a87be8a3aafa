use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use delaycert_cli::{resolve_config, run, Command, Overrides, PipelineKind};

/// Stability certificates and decay envelopes for homogeneous time-delay systems.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; the built-in reference scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the pipeline of the config.
    #[arg(long, global = true, value_enum)]
    pipeline: Option<PipelineKind>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        config: cli.config,
        seed: cli.seed,
        pipeline: cli.pipeline,
    };
    let result = resolve_config(&overrides)
        .and_then(|cfg| run(cli.command, &cfg, cli.out.is_some()))
        .and_then(|text| {
            match &cli.out {
                Some(path) => std::fs::write(path, text)?,
                None => match std::io::stdout().lock().write_all(text.as_bytes()) {
                    Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                },
            }
            Ok(())
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
