use clap::Parser;
use showfinder_service::cli::{run, Cli};

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt().with_env_filter(tracing_subscriber::EnvFilter::from_default_env()).init();
    run(Cli::parse())
}
