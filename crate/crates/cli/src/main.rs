use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlwr_cli::{check, resolve, run, sweep, weights_table, CliError, SweepGrid};

/// Nonlocal LWR traffic simulations with a leading-vehicle control.
#[derive(Parser)]
#[command(name = "nlwr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig1-const, fig1-lin, fig1-conc, fig2, fig3-micro) or a config file.
    Run {
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write density/speed snapshots at every output time.
        #[arg(long)]
        snapshots: bool,
    },
    /// Run every point of a parameter grid, e.g. `kernel.kind=constant,linear;grid.dx=0.01,0.005`.
    Sweep {
        template: String,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Audit a run directory; exit status 3 if a hard check fails.
    Check { dir: PathBuf },
    /// Print the cell weights of a kernel.
    Weights { kernel: String, dx: f64, eta: f64 },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            snapshots,
        } => {
            let m = run(&scenario, &out, snapshots)?;
            println!("{}", serde_json::to_string_pretty(&m)?);
        }
        Command::Sweep {
            template,
            grid,
            out,
            jobs,
        } => {
            let grid = SweepGrid::parse(&grid)?;
            let template = resolve(&template)?;
            let entries = sweep(&template, &grid, &out, jobs)?;
            let failed: Vec<_> = entries.iter().filter(|e| e.exit_status != 0).collect();
            println!(
                "{} runs, {} failed; index at {}",
                entries.len(),
                failed.len(),
                out.join(nlwr_cli::sweep::INDEX).display()
            );
            if let Some(worst) = failed.iter().map(|e| e.exit_status).max() {
                let kind = if worst == 1 {
                    CliError::validation
                } else {
                    CliError::runtime
                };
                return Err(kind(format!(
                    "{} of {} sweep runs failed",
                    failed.len(),
                    entries.len()
                )));
            }
        }
        Command::Check { dir } => {
            let report = check(&dir)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.passed {
                return Err(CliError::check("hard checks failed"));
            }
        }
        Command::Weights { kernel, dx, eta } => {
            print!("{}", weights_table(&kernel, dx, eta)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
