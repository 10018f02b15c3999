use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rpifs_cli::{output_path, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let artifact = match run(&cli) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(notice) = &artifact.notice {
        eprintln!("{notice}");
    }
    let written = match output_path(&cli) {
        Some(path) => std::fs::write(path, &artifact.text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            std::io::stdout().write_all(artifact.text.as_bytes()).map_err(|e| format!("cannot write to stdout: {e}"))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(artifact.exit_code as u8)
}
