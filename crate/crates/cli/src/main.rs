use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hessval::harness::{load_scene, run, Command, RunOptions};

/// Hessian measures and valuations of convex functions.
#[derive(Parser, Debug)]
#[command(name = "hessval", version)]
struct Args {
    /// One of measures, valuation, verify, separation, report.
    command: String,
    /// Scene file (JSON, schema "hessval/1").
    #[arg(long)]
    scene: PathBuf,
    /// Property suite to run; repeatable. Defaults to the scene's verify experiments.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "hessval-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance override `key=value`; repeatable.
    #[arg(long = "tol")]
    tolerances: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = args.command.parse::<Command>().and_then(|cmd| {
        let scene = load_scene(&args.scene)?;
        let opts = RunOptions { suites: args.suites, out: args.out, seed: args.seed, tolerances: args.tolerances };
        run(cmd, &scene, &opts)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::from(outcome.exit_code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
