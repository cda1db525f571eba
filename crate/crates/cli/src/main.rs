use clap::Parser;
use rlsheaf_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let report = run(&cli);
    print!("{}", report.render(cli.format));
    std::process::exit(report.exit_code());
}
