use clap::Parser;

fn main() -> anyhow::Result<()> {
    let cli = grpsis_cli::Cli::parse();
    grpsis_cli::run(cli)
}
