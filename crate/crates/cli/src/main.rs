use std::process::ExitCode;

use clap::Parser;
use negaffirm_cli::{dispatch, parse_config, Cli, ConfigError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = parse_config(cli.command, &cli.opts)
        .map_err(anyhow::Error::from)
        .and_then(|config| dispatch(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("negaffirm: {e:#}");
            let code = e.downcast_ref::<ConfigError>().map_or(1, ConfigError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
