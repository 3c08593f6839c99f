use clap::Parser;

fn main() {
    let cli = viscwave_cli::Cli::parse();
    match viscwave_cli::execute(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
