use std::process::ExitCode;

use clap::Parser;

use zerocap::cli::{run, Cli, CliError, EXIT_VERIFY};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|out| {
        match &cli.output {
            Some(path) => std::fs::write(path, &out.text).map_err(CliError::Io)?,
            None => print!("{}", out.text),
        }
        Ok(out.failed_check)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("zerocap: verification failed");
            ExitCode::from(EXIT_VERIFY as u8)
        }
        Err(e) => {
            eprintln!("zerocap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
