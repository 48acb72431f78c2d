use clap::Parser;
use motivsim_cli::{execute, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(f) = execute(&cli) {
        eprintln!("motivsim: {}", f.msg);
        std::process::exit(f.code);
    }
}
