//! `rabi-ring`: phase diagrams, single-point solves, current sweeps, gap
//! scaling and phase census for the quantum Rabi ring.
//!
//! Exit status is 0 on success, 2 for bad arguments, 3 for solver failures and
//! 4 for I/O failures. Errors are printed to stderr as one line of JSON.

mod args;
mod commands;
mod failure;
mod output;

use clap::Parser;

use args::{Cli, Command};
use commands::Run;
use failure::Failure;

fn execute(cli: &Cli) -> Result<(), Failure> {
    let run = Run::new(&cli.common)?;
    let common = &cli.common;
    let text = match &cli.command {
        Command::PhaseDiagram {
            theta_min,
            theta_max,
            g1_min,
            g1_max,
        } => commands::phase_diagram_cmd(&run, common, theta_min.as_ref(), theta_max.as_ref(), *g1_min, *g1_max)?,
        Command::Solve => commands::solve_cmd(&run, common)?,
        Command::CurrentSweep { theta_min, theta_max } => {
            commands::current_sweep_cmd(&run, common, theta_min.as_ref(), theta_max.as_ref())?
        }
        Command::Scaling {
            side,
            delta_min,
            delta_max,
            points,
        } => commands::scaling_cmd(&run, common, *side, *delta_min, *delta_max, *points)?,
        Command::Census { n_min, n_max } => commands::census_cmd(&run, common, *n_min, *n_max)?,
    };
    output::emit(run.settings.out(common.out.as_ref()).as_deref(), &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let settings = args::Settings::new(&cli.common)?;
    let jobs = settings.get(cli.common.jobs, "jobs", 0)?;
    if jobs == 0 {
        return execute(&cli);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::arguments(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| execute(&cli))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return;
        }
        Err(e) => {
            let failure = Failure::arguments(e.to_string().trim_end().to_string());
            eprintln!("{}", failure.to_json());
            std::process::exit(failure.exit_code());
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("{}", failure.to_json());
        std::process::exit(failure.exit_code());
    }
}
