use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use knead::cli_harness::{self, corpus, Command, HarnessError, MapDefinition, OutputFormat, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    /// Validate maps and print their graph and homology data.
    Check,
    /// Lap counts, variation and negative-type crossings of F^n.
    Laps,
    /// Fixed points of negative type, with glued-point corrections.
    Fix,
    /// Kneading matrices M, N and determinants D, L.
    Kneading,
    /// Negative, Lefschetz and Milnor-Thurston zeta functions.
    Zeta,
    /// Entropy estimates.
    Entropy,
    /// Every exact identity, entropy agreement and expected values.
    Verify,
    /// Randomized finite-rank pair self-test.
    AppendixSelftest,
    /// List the bundled maps.
    List,
    /// Print map definitions as TOML.
    Dump,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Kneading determinants, zeta functions and entropy of piecewise monotone graph maps.
///
/// FILES are map-definition TOML files or names of bundled maps; with no
/// FILES the whole bundled corpus is used.
#[derive(Parser, Debug)]
#[command(name = "knead", version)]
struct Args {
    command: Cmd,
    files: Vec<String>,
    /// Truncation degree of power series.
    #[arg(long, default_value_t = 64)]
    degree: usize,
    /// Largest iterate for lap and fixed-point tables.
    #[arg(long = "max-iter", visible_alias = "n", default_value_t = 12)]
    max_iter: usize,
    /// Degree of the series identities checked against lap counts.
    #[arg(long = "identity-degree", default_value_t = 20)]
    identity_degree: usize,
    /// Tolerance for root-based entropy values.
    #[arg(long, default_value_t = 1e-3)]
    tolerance: f64,
    /// Tolerance for growth-rate fits.
    #[arg(long = "fit-tolerance", default_value_t = 5e-2)]
    fit_tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for the randomized self-test.
    #[arg(long, default_value_t = cli_harness::DEFAULT_SEED)]
    seed: u64,
    /// Number of random pairs in the self-test.
    #[arg(long, default_value_t = 50)]
    pairs: usize,
    /// Laps allowed per iterate.
    #[arg(long = "lap-budget", default_value_t = knead::pm_domain::DEFAULT_LAP_BUDGET)]
    lap_budget: usize,
    /// Maps processed in parallel (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn load(arg: &str) -> Result<MapDefinition, HarnessError> {
    let path = Path::new(arg);
    if path.exists() || arg.ends_with(".toml") {
        cli_harness::parse_map_file(path)
    } else {
        corpus::get(arg)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inputs = || -> Vec<Result<MapDefinition, HarnessError>> {
        if args.files.is_empty() {
            corpus::names().into_iter().map(corpus::get).collect()
        } else {
            args.files.iter().map(|f| load(f)).collect()
        }
    };
    let command = match args.command {
        Cmd::List => {
            for d in corpus::all() {
                println!("{:<24} {}", d.name, d.description.unwrap_or_default());
            }
            return ExitCode::SUCCESS;
        }
        Cmd::Dump => {
            let mut code = ExitCode::SUCCESS;
            for d in inputs() {
                match d {
                    Ok(d) => print!("{}", d.to_toml()),
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = ExitCode::from(2);
                    }
                }
            }
            return code;
        }
        Cmd::Check => Command::Check,
        Cmd::Laps => Command::Laps,
        Cmd::Fix => Command::Fix,
        Cmd::Kneading => Command::Kneading,
        Cmd::Zeta => Command::Zeta,
        Cmd::Entropy => Command::Entropy,
        Cmd::Verify => Command::Verify,
        Cmd::AppendixSelftest => Command::AppendixSelftest,
    };
    let format = match args.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
        Format::Text => OutputFormat::Text,
    };
    let defaults = RunConfig::default();
    let config = RunConfig {
        degree: args.degree,
        max_iter: args.max_iter,
        identity_degree: args.identity_degree.min(args.degree),
        lap_budget: args.lap_budget,
        root_tolerance: args.tolerance,
        fit_tolerance: args.fit_tolerance,
        format,
        jobs: args.jobs.unwrap_or(defaults.jobs),
        seed: args.seed,
        selftest_pairs: args.pairs,
        ..defaults
    };
    match cli_harness::run(command, inputs(), &config) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
