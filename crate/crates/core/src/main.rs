use std::process::ExitCode;

use ptqubit::scenario::{self, Command, ScenarioError};

fn run() -> Result<(), ScenarioError> {
    let cfg = scenario::load_config(std::env::args_os().skip(1))?;
    match cfg.command {
        Command::Run => {
            let traj = scenario::run_single(&cfg)?;
            println!(
                "wrote {} ({} samples)",
                cfg.output_path.display(),
                traj.len()
            );
        }
        Command::Compare => {
            scenario::run_compare(&cfg)?;
            println!("wrote {}", cfg.output_path.display());
        }
        Command::Sweep => {
            scenario::run_sweep(&cfg)?;
            println!(
                "wrote {} and {}",
                cfg.output_path.display(),
                scenario::steady_path_for(&cfg.output_path).display()
            );
        }
        Command::Figures => {
            for path in scenario::run_figures(&cfg.output_path)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(ScenarioError::Help(msg)) => {
            print!("{msg}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("ptqubit: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
