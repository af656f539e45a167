// Runs a built-in scenario and a JSON-configured one, then writes the CSV
// series, the event table and the report.

use discord_witness::scenario::{builtin, emit, load_scenario, report_text, run_with, RunOptions};

const CONFIG: &str = r#"{
  "scenario": {
    "name": "fig2",
    "window": { "start": 0.0, "end": 1.0, "points": 400 },
    "measures": ["geometric"]
  }
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = RunOptions {
        points: Some(500),
        ..RunOptions::default()
    };
    let report = run_with(&builtin("fig1")?, &opts)?;
    print!("{}", report_text(&report));

    let custom = load_scenario(CONFIG)?;
    let report = run_with(&custom, &RunOptions::default())?;
    let out = std::env::temp_dir().join("discord-witness-example").join(&custom.name);
    for path in emit(&report, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
