use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use graphlim::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if !text.is_empty() {
                let _ = out.write_all(text.as_bytes());
                if !text.ends_with('\n') {
                    let _ = out.write_all(b"\n");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!("{}", graphlim::io::to_pretty(&e.to_json()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
