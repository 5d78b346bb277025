use clap::Parser;

fn main() {
    let cli = weylwalk_cli::Cli::parse();
    std::process::exit(weylwalk_cli::main_with(cli));
}
