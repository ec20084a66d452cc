use clap::Parser;

fn main() {
    let cli = scriptometrics::cli::Cli::parse();
    std::process::exit(scriptometrics::cli::run(&cli));
}
