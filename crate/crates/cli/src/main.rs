use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use starframe_cli::report::{digest, Report};
use starframe_cli::{load_scenario, run, Command, Flags};

/// Continuous *-g-frames over matrix Hilbert C*-modules.
///
/// Exit status: 0 when the report has no REFUTED, VIOLATED, NOT_FRAME or
/// failed check; 1 when it has; 2 on input or runtime errors.
#[derive(Parser, Debug)]
#[command(name = "starframe", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (JSON). Optional for `selftest`.
    scenario: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random probes for sampled checks; random trials per check for `selftest`.
    #[arg(long)]
    samples: Option<usize>,
    /// Frame / invertibility tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Stability constant for `perturb` (default: computed from the bounds).
    #[arg(long)]
    m: Option<f64>,
    /// For `perturb` without an explicit `m`: use the larger stability constant,
    /// which always suffices for two frames, instead of the smaller one.
    #[arg(long)]
    guaranteed_m: bool,
    /// Emit the machine-readable JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
    /// CSV output for the `sweep` table.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Output scenario path for `dual`.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Grid sizes for `sweep`, e.g. `--levels 10,100,1000`.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let flags = Flags {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
        m: cli.m,
        output: cli.output,
        csv: cli.csv,
        levels: cli.levels,
        guaranteed_m: cli.guaranteed_m,
    };
    let report = match &cli.scenario {
        Some(path) => match load_scenario(path) {
            Ok((scenario, bytes)) => run(cli.command, Some(&scenario), Some(digest(&bytes)), &flags),
            Err(e) => {
                let digest = std::fs::read(path).ok().map(|b| digest(&b));
                let mut r = Report::new(cli.command.name(), digest, flags.seed.unwrap_or(0), flags.samples.unwrap_or(0));
                r.fail(e.to_string());
                r
            }
        },
        None => run(cli.command, None, None, &flags),
    };
    if cli.json {
        print!("{}", report.to_json());
    } else {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        print!("{}", report.to_human(Some(ms)));
    }
    if let Some(e) = &report.error {
        eprintln!("starframe: {e}");
    }
    ExitCode::from(report.status.exit_code() as u8)
}
