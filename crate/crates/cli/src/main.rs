use clap::Parser;
use std::process::ExitCode;
use svpn_cli::app::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr();
    match execute(&cli, &mut out, &mut err) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("svpn: error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
