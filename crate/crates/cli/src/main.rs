use clap::Parser;
use transversal_cli::{init_threads, run, Cli, EnvOverrides};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = EnvOverrides::from_env().and_then(|env| init_threads(&env)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(run(&cli));
}
