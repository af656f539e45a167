//! Runs figure scenarios and writes series.csv, events.csv, report.txt and
//! params.json per scenario.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rayon::prelude::*;

use discord_witness::scenario::{emit, load_scenario, parse_measures, run_with, RunOptions, Scenario};
use discord_witness::Error;

#[derive(Debug, Parser)]
#[command(name = "discord-scenario", version, about = "Discord sudden-change scenarios")]
struct Cli {
    /// Built-in scenario (fig1..fig5); repeatable.
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<String>,
    /// JSON scenario file; repeatable.
    #[arg(long = "config", value_name = "FILE")]
    configs: Vec<PathBuf>,
    /// Output directory; each scenario writes into OUT/<name>.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Grid points, overriding the scenario window.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    points: Option<u64>,
    /// Comma-separated subset of geometric,info-numeric,info-closed-form.
    #[arg(long)]
    measures: Option<String>,
    /// Relative tolerance of crossing refinement.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    refine_tol: f64,
    /// Evaluate the numerical information discord at every K-th point.
    #[arg(long, default_value_t = 1, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    down_sample_info: u64,
    /// Scenarios run concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_parse_error() {
        2
    } else if e.is_io_error() {
        1
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let mut scenarios: Vec<Scenario> = Vec::new();
    let mut load = |src: Result<String, Error>| -> Result<(), Error> {
        scenarios.push(load_scenario(&src?)?);
        Ok(())
    };
    let sources = cli
        .scenarios
        .iter()
        .map(|n| Ok(n.clone()))
        .chain(cli.configs.iter().map(|p| {
            std::fs::read_to_string(p).map_err(|e| Error::InvalidField {
                field: "config".into(),
                message: format!("{}: {e}", p.display()),
            })
        }));
    for src in sources {
        if let Err(e) = load(src) {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    }
    if scenarios.is_empty() {
        eprintln!("error: give at least one --scenario or --config");
        return ExitCode::from(2);
    }

    let measures = match cli.measures.as_deref().map(parse_measures).transpose() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        points: cli.points.map(|n| n as usize),
        measures,
        refine_tol: cli.refine_tol,
        down_sample_info: cli.down_sample_info as usize,
        ..RunOptions::default()
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let results: Vec<Result<String, Error>> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|s| {
                let report = run_with(s, &opts)?;
                let dir = cli.out.join(&s.name);
                emit(&report, &dir).map_err(|e| Error::Scenario {
                    scenario: s.name.clone(),
                    source: Box::new(e),
                })?;
                Ok(format!(
                    "{}: {} rows, {} sudden changes -> {}",
                    s.name,
                    report.series.len(),
                    report.events.iter().filter(|e| e.sudden_change).count(),
                    dir.display()
                ))
            })
            .collect()
    });

    let mut code = 0u8;
    for r in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(exit_code(&e));
            }
        }
    }
    ExitCode::from(code)
}
