use clap::Parser;
use lqdlab::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
