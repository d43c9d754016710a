use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod config;
mod error;
mod jobs;
mod output;
mod selftest;

use args::Cli;
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let job = config::resolve(cli)?;
    if let Some(n) = job.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    if job.selftest {
        let checks = selftest::run(job.command.as_ref());
        for c in &checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            println!("{tag} {}: deviation {:.3e} (limit {:.0e})", c.name, c.deviation, c.limit);
        }
        let failed = checks.iter().filter(|c| !c.passed()).count();
        if failed > 0 {
            return Err(CliError::Numerical(format!("{failed} selftest check(s) failed")));
        }
        return Ok(());
    }
    let artifacts = jobs::execute(&job)?;
    output::emit(&job, artifacts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genzernike: {e}");
            ExitCode::from(e.code())
        }
    }
}
