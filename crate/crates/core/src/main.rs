use clap::Parser;

use wigwork::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("wigwork: {}", e.message);
        std::process::exit(e.code);
    }
}
