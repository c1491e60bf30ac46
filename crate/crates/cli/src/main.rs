use std::process::ExitCode;

use clap::Parser;
use cone_verify_cli::args::{Cli, Command};
use cone_verify_cli::report::emit;
use cone_verify_cli::run::execute;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = match &cli.command {
        Command::Catalog(a) => a.out.clone(),
        Command::CheckPoint(a)
        | Command::CheckRegion(a)
        | Command::Classify(a)
        | Command::ExtractSplitting(a)
        | Command::LpfCheck(a) => a.out.clone(),
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&outcome.text, out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if let Some(r) = &outcome.report {
        eprintln!("{}: {:?} over {} samples", r.command, r.verdict, r.samples.len());
    }
    ExitCode::from(outcome.exit_code as u8)
}
