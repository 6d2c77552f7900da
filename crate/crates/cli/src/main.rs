use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = csev_cli::Cli::parse();
    let out = std::io::stdout();
    let code = csev_cli::run(cli, &mut out.lock());
    ExitCode::from(code as u8)
}
