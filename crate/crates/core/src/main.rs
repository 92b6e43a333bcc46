use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use knot_su2::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    match run(&cli, argv) {
        Ok(mut outcome) => {
            if cli.global.timing {
                outcome.certificate.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
            }
            if cli.global.json {
                println!("{}", outcome.certificate.to_json());
            } else {
                print!("{}", outcome.human);
                if let Some(t) = outcome.certificate.wall_clock_seconds {
                    println!("wall clock: {t:.3} s");
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
