use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qwlimits::{describe, resolve, run, CliError, ConfigSources, Experiment};

/// Exit status: 0 pass, 1 tolerance failure, 2 configuration or I/O error.
#[derive(Parser, Debug)]
#[command(name = "qwlimits", version, about = "Continuum-limit experiments for discrete-time quantum walks")]
struct Args {
    experiment: Experiment,

    /// Flat `key = value` file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Parameter override, wins over the config file. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for the ChaCha20 generator used by randomized sweeps.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for independent probe points.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Print what the experiment checks and its parameters, then exit.
    #[arg(long)]
    describe: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.describe {
        print!("{}", describe(args.experiment));
        return ExitCode::SUCCESS;
    }
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qwlimits: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let file = match &args.config {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
        None => None,
    };
    let src = ConfigSources { file, overrides: args.params.clone(), output_dir: args.out.clone(), seed: args.seed };
    let cfg = resolve(args.experiment, &src)?;
    if args.jobs == 0 {
        return Err(CliError::config("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let summary = pool.install(|| run(&cfg))?;
    let verdict = if summary.pass { "PASS" } else { "FAIL" };
    println!(
        "{verdict} {} ({:.3} s) -> {}",
        summary.experiment,
        summary.wall_time,
        cfg.output_dir.join("summary.json").display()
    );
    Ok(summary.pass)
}
