mod args;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Exit status for each failure family.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Invariant(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Invariant(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Invariant(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<symtest::Error> for Failure {
    fn from(e: symtest::Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Invariant(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(n) = std::env::var("SYMTEST_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: SYMTEST_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(1);
            }
        }
    }
    match run::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
