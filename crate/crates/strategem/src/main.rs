//! Thin binary wrapper around [`strategem::cli`].

use clap::Parser;

use strategem::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
