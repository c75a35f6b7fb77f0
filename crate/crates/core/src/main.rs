use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eulerchar::report::{self, Outcome};
use eulerchar::scenario;
use eulerchar::selftest::{self, Options, TableFixture};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "eulerchar", version, about = "Euler characteristics of finite Galois modules over number fields")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Seed for the randomized invariant corpora.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every scenario in a file.
    Run { file: PathBuf },
    /// Evaluate the bundled example scenarios.
    VerifyExamples,
    /// Run the invariant suites.
    Selftest {
        #[arg(long)]
        filter: Option<String>,
        /// Validate a group table fixture instead of the builtin tables.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

fn emit(outcomes: &[Outcome], format: Format) -> ExitCode {
    match format {
        Format::Json => {
            let v: Vec<_> = outcomes.iter().map(Outcome::to_json).collect();
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        }
        Format::Text => {
            for (i, o) in outcomes.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", report::render_text(&o.to_json()));
            }
        }
    }
    ExitCode::from(report::batch_exit_code(outcomes) as u8)
}

fn schema_failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return schema_failure(format!("{}: {e}", file.display())),
            };
            match scenario::parse_file(&text) {
                Ok(f) => emit(&report::run_batch(&f.scenarios), cli.format),
                Err(e) => schema_failure(e),
            }
        }
        Command::VerifyExamples => emit(&report::run_batch(&selftest::bundled_scenarios()), cli.format),
        Command::Selftest { filter, table } => {
            let table = match table {
                None => None,
                Some(path) => {
                    let parsed = std::fs::read_to_string(&path)
                        .map_err(|e| e.to_string())
                        .and_then(|t| serde_json::from_str::<TableFixture>(&t).map_err(|e| e.to_string()));
                    match parsed {
                        Ok(t) => Some(t),
                        Err(e) => return schema_failure(format!("{}: {e}", path.display())),
                    }
                }
            };
            let results = match selftest::run(&Options { seed: cli.seed, filter, table }) {
                Ok(r) => r,
                Err(e) => return schema_failure(e),
            };
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&results).expect("serializable")),
                Format::Text => {
                    for r in &results {
                        let status = if r.passed() { "pass" } else { "FAIL" };
                        println!("{status} {}: {} checks, {} failures", r.name, r.checks, r.failures.len());
                        for f in &r.failures {
                            println!("  {f}");
                        }
                    }
                }
            }
            if results.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
