use clap::Parser;
use hybrid_ww_cli::{execute, Args};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    if let Err(e) = execute(args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
