use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use octolyze_core::analyzer::{analyze, check_asserts, Verdict};
use octolyze_core::lang::{parse, pretty, Location, Program};
use octolyze_core::report::{build_report, render_text, ReportOptions};

/// Octagon-based invariant inference and assertion checking.
#[derive(Parser, Debug)]
#[command(name = "octolyze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the invariant at every location and the assertion verdicts.
    Analyze(AnalyzeArgs),
    /// Print assertion verdicts only.
    Check(CheckArgs),
    /// Parse the program and print it with its locations.
    Dump { file: PathBuf },
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also print the raw matrix stored at each location.
    #[arg(long)]
    show_matrix: bool,
    /// Print invariants as stored instead of strongly closed.
    #[arg(long)]
    raw: bool,
    /// Only print these locations (e.g. `--loc l3`); repeatable.
    #[arg(long = "loc", value_name = "LOCATION")]
    locs: Vec<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

const UNKNOWN_ASSERT: u8 = 1;
const USAGE: u8 = 2;

fn load(path: &Path) -> Result<Program, String> {
    let src = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => format!("{}: no such file", path.display()),
        _ => format!("{}: {e}", path.display()),
    })?;
    parse(&src).map_err(|e| format!("{}:{e}", path.display()))
}

fn locations(p: &Program, raw: &[String]) -> Result<Vec<Location>, String> {
    raw.iter()
        .map(|s| match s.parse::<Location>() {
            Ok(l) if l.0 < p.n_locations => Ok(l),
            _ => Err(format!(
                "no location `{s}` (program has l0..l{})",
                p.n_locations - 1
            )),
        })
        .collect()
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Dump { file } => {
            println!("{}", pretty(&load(&file)?));
            Ok(0)
        }
        Command::Analyze(args) => {
            let p = load(&args.file)?;
            let opts = ReportOptions {
                raw: args.raw,
                matrix: args.show_matrix,
                only: locations(&p, &args.locs)?,
            };
            let inv = analyze(&p);
            let asserts = check_asserts(&p, &inv);
            let report = build_report(&p, &inv, &asserts, &opts);
            match args.format {
                Format::Text => print!("{}", render_text(&p, &inv, &report, &opts)),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                ),
            }
            Ok(status(asserts.iter().map(|a| a.verdict)))
        }
        Command::Check(args) => {
            let p = load(&args.file)?;
            let inv = analyze(&p);
            let asserts = check_asserts(&p, &inv);
            let opts = ReportOptions::default();
            let mut report = build_report(&p, &inv, &asserts, &opts);
            report.locations.clear();
            match args.format {
                Format::Text => print!("{}", render_text(&p, &inv, &report, &opts)),
                Format::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report.asserts).expect("serializable")
                    )
                }
            }
            Ok(status(asserts.iter().map(|a| a.verdict)))
        }
    }
}

fn status(verdicts: impl Iterator<Item = Verdict>) -> u8 {
    let mut v = verdicts;
    if v.all(|v| v == Verdict::Proved) {
        0
    } else {
        UNKNOWN_ASSERT
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}
