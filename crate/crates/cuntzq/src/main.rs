use std::process::ExitCode;

use clap::Parser;
use cuntzq::run::EXIT_INPUT;
use cuntzq::{run, Settings};

fn main() -> ExitCode {
    let cli = Settings::parse();
    let settings = match cli.config.clone() {
        Some(path) => match Settings::load(&path) {
            Ok(file) => cli.over(file),
            Err(e) => {
                eprintln!("cuntzq: {e}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        },
        None => cli,
    };
    let outcome = run(settings);
    let r = &outcome.report;
    if let Some(e) = &r.error {
        eprintln!("cuntzq: {e}");
    } else {
        println!(
            "{}: {} asserted checks, {} passed, {} failed ({} informational); report in {}",
            r.mode.unwrap_or("-"),
            r.summary.asserted,
            r.summary.passed,
            r.summary.failed,
            r.summary.informational,
            outcome.out_dir.join("report.json").display()
        );
        for c in r.checks.iter().filter(|c| c.asserted && !c.pass) {
            eprintln!("FAILED {} (max deviation {:e})", c.identity, c.max_abs_deviation);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
