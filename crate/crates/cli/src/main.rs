use clap::Parser;

fn main() {
    let cli = ffs_cli::run::Cli::parse();
    std::process::exit(ffs_cli::run::execute(cli));
}
