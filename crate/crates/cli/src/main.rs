use clap::Parser;
use cmc_bifurcate::cli::Cli;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cmc_bifurcate::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cmc-bifurcate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
