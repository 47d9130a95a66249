use clap::Parser;

use qread::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
