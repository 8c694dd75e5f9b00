use clap::Parser;

fn main() {
    std::process::exit(photonwave::cli::run(photonwave::cli::Cli::parse()));
}
