use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nekrasov_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("nekrasov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
