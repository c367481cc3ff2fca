use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qsep::cli::{execute, Cli, EXIT_PARSE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE as u8) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = execute(&cli);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.exit as u8)
}
