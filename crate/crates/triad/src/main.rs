use std::panic;
use std::process::ExitCode;

use clap::Parser;

use triad::cli::Cli;
use triad::commands;
use triad::error::CliError;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = panic::catch_unwind(|| {
        let cfg = cli.global.resolve()?;
        commands::run(&cli.command, &cfg)
    });
    match outcome {
        Ok(Ok(summary)) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
        Err(_) => CliError::Internal("panicked".into()).exit_code(),
    }
}
