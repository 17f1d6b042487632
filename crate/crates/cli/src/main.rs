use clap::Parser;
use rallyforge::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = run(cli, &mut stdout) {
        eprintln!("rallyforge: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
