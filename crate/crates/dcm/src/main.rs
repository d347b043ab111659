use std::process::ExitCode;

use clap::Parser;

use dcm::commands::{cmd_mine, cmd_simulate, Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are validation errors; 2 is reserved for IO.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(3);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }

    let result = match &cli.command {
        Command::Mine(args) => cmd_mine(args).map(|r| log::info!("wrote {} clique(s)", r.cliques.len())),
        Command::Simulate(args) => cmd_simulate(args).map(|r| log::info!("wrote {} row(s)", r.rows.len())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
