//! The `gradedq` command line.
//!
//! Exit codes: 0 all checks pass, 1 a check fails, 2 input error,
//! 3 an internal equivalence was violated.

pub mod expr;
pub mod job;
pub mod report;
pub mod run;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

pub use job::JobFile;
pub use report::{CheckReport, Report};
pub use run::{run_job, Overrides};

#[derive(Debug, Parser)]
#[command(name = "gradedq", version, about = "Checks blended homological vector fields and their deformations")]
pub struct Args {
    /// Job file (TOML, `schema = 1`).
    #[arg(long)]
    pub job: PathBuf,
    /// Comma-separated checks: coiso, courant, derived, q.
    #[arg(long, value_delimiter = ',')]
    pub check: Option<Vec<String>>,
    /// Truncation order for Maurer–Cartan sums.
    #[arg(long)]
    pub truncation: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random samples for property checks.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    pub machine_out: Option<PathBuf>,
    /// Print elapsed time to stderr.
    #[arg(long)]
    pub timing: bool,
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args(args: Args) -> i32 {
    let start = Instant::now();
    let src = match std::fs::read_to_string(&args.job) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.job.display());
            return 2;
        }
    };
    let job = match JobFile::parse(&src) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let overrides = Overrides {
        checks: args.check,
        truncation: args.truncation,
        seed: args.seed,
        samples: args.samples,
    };
    let report = match run_job(&job, &overrides) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    print!("{}", report.render());
    if let Some(path) = &args.machine_out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if args.timing {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    report.exit_code()
}
