use clap::Parser;

fn main() {
    let cli = ellbethe::cli::Cli::parse();
    let env_seed = std::env::var(ellbethe::cli::SEED_ENV).ok();
    std::process::exit(ellbethe::cli::run(&cli, env_seed.as_deref()));
}
