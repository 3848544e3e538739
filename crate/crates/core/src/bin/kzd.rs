use clap::Parser;

fn main() {
    std::process::exit(kzd::cli::main_with(kzd::cli::Args::parse()));
}
