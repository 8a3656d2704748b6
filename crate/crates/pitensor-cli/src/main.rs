//! Batch front door for the tensor-norm solvers: reads a JSON job from a
//! file or stdin, dispatches, and emits a JSON report plus a one-line
//! summary. Exit codes: 0 success, 2 inconclusive/heuristic, 3 refuted,
//! 4 input error, 5 budget exceeded.

mod jobs;
mod json;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Parser)]
#[command(name = "pitensor", version, about = "Projective tensor norm toolbox")]
struct Args {
    /// Job specification file (JSON); stdin when omitted.
    #[arg(long)]
    job: Option<PathBuf>,
    /// Report output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the plain-text summary on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();

    let raw = match &args.job {
        Some(path) => std::fs::read_to_string(path),
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).map(|_| buf)
        }
    };
    let raw = match raw {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cannot read job: {e}");
            return ExitCode::from(4);
        }
    };

    let report = match serde_json::from_str::<jobs::JobSpec>(&raw) {
        Ok(job) => jobs::run(&job),
        Err(e) => jobs::Report {
            command: "invalid".to_string(),
            result: serde_json::json!({ "error": format!("schema error: {e}") }),
            timing_ms: 0,
            warnings: vec![],
            exit_code: 4,
        },
    };

    let rendered = json::to_string_17(&report).expect("report serializes");
    let write_result = match &args.out {
        Some(path) => std::fs::write(path, rendered + "\n"),
        None => {
            println!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = write_result {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(4);
    }

    if !args.quiet {
        eprintln!("{}", jobs::summary(&report));
    }
    ExitCode::from(report.exit_code as u8)
}
