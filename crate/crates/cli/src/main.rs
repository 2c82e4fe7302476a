use std::process::ExitCode;

use clap::Parser;
use rela_cli::{install_interrupt_handler, run, Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    install_interrupt_handler();
    let code = match cli.command {
        Command::Check(config) => run(&config),
    };
    ExitCode::from(code as u8)
}
