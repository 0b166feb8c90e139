use clap::Parser;
use holo_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for note in &outcome.report.notes {
                println!("note: {note}");
            }
            for flag in &outcome.report.flags {
                eprintln!("FLAGGED: {flag}");
            }
            println!("wrote {} and {}", outcome.json.display(), outcome.csv.display());
            std::process::exit(outcome.exit_code());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
