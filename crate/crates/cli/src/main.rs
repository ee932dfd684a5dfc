use std::process::ExitCode;

use clap::Parser;
use hpconc_cli::{run, CliError, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&config, &mut stdout) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            if let CliError::Core(hpconc::Error::SpaceTooLarge { .. }) = err {
                eprintln!("hint: raise the cap with --cap or {}", hpconc_cli::CAP_ENV);
            }
            ExitCode::from(1)
        }
    }
}
