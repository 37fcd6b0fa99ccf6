use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dynsym_cli::config::{Cli, Format, RunConfig};
use dynsym_cli::run::run;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, flags) = cli.command.split();
    let cfg = match RunConfig::from_flags(command, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dynsym: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("dynsym: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match cfg.format {
        Format::Json => outcome.report.to_json(),
        Format::Csv => outcome.report.to_csv(),
        Format::Text => outcome.report.to_text(),
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("dynsym: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.exit as u8)
}
