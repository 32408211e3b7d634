use std::process::ExitCode;

use clap::Parser;

use bffkit_cli::config::CONFIG_ENV;
use bffkit_cli::{run, Cli, Config};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Config::from_env_value(std::env::var_os(CONFIG_ENV).map(Into::into))
        .and_then(|config| run(&cli, &config));
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
