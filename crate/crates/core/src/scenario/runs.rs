use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::default_sweep;
use super::output::{compare_csv, single_csv, steady_csv, sweep_csv};
use super::{Command, ScenarioConfig, ScenarioError};
use crate::coherence;
use crate::dynamics::{self, DriveKind, Trajectory};
use crate::qmat::Mat2C;

/// Convergence tolerance for the steady-state summaries.
pub const STEADY_TOL: f64 = 1e-12;

/// Output names written by [`run_figures`], in figure order.
pub const FIGURE_FILES: [&str; 4] = ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadySummary {
    pub omega: f64,
    /// `tr L(ρ*)`, the asymptotic growth rate of the raw trace.
    pub growth_rate: f64,
    pub state: Mat2C,
    pub c_l1: f64,
    pub c_re: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub runs: Vec<(f64, Trajectory)>,
    pub steady: Vec<SteadySummary>,
}

fn write(path: &Path, text: &str) -> Result<(), ScenarioError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| ScenarioError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| ScenarioError::io(path, e))
}

/// `sweep.csv` → `sweep_steady.csv`.
pub fn steady_path_for(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_steady.csv"))
}

pub fn simulate_single(cfg: &ScenarioConfig) -> Result<Trajectory, ScenarioError> {
    let p = &cfg.params;
    Ok(dynamics::integrate(
        &p.initial_state(),
        p,
        cfg.t_end,
        cfg.dt,
        cfg.sample_every,
    )?)
}

/// One trajectory per drive kind, ordered none, real, imaginary.
pub fn simulate_compare(
    cfg: &ScenarioConfig,
) -> Result<Vec<(DriveKind, Trajectory)>, ScenarioError> {
    DriveKind::ALL
        .par_iter()
        .map(|&kind| {
            let sub = ScenarioConfig {
                params: cfg.params.with_drive(kind),
                ..cfg.clone()
            };
            simulate_single(&sub).map(|t| (kind, t))
        })
        .collect()
}

pub fn simulate_sweep(cfg: &ScenarioConfig) -> Result<SweepResult, ScenarioError> {
    let omegas = cfg.sweep.clone().unwrap_or_else(default_sweep);
    if omegas.is_empty() {
        return Err(ScenarioError::Usage("sweep list is empty".into()));
    }
    let per_omega: Vec<(f64, Trajectory, SteadySummary)> = omegas
        .par_iter()
        .map(|&omega| {
            let sub = ScenarioConfig {
                params: cfg.params.with_omega(omega),
                ..cfg.clone()
            };
            let traj = simulate_single(&sub)?;
            let state = dynamics::steady_state(&sub.params, STEADY_TOL)?;
            let pair = coherence::coherence_pair(&state).map_err(dynamics::DynamicsError::from)?;
            let summary = SteadySummary {
                omega,
                growth_rate: dynamics::rhs(&state, &sub.params).trace().re,
                state,
                c_l1: pair.c_l1,
                c_re: pair.c_re,
            };
            Ok((omega, traj, summary))
        })
        .collect::<Result<_, ScenarioError>>()?;
    let mut result = SweepResult {
        runs: Vec::with_capacity(per_omega.len()),
        steady: Vec::with_capacity(per_omega.len()),
    };
    for (omega, traj, summary) in per_omega {
        result.runs.push((omega, traj));
        result.steady.push(summary);
    }
    Ok(result)
}

pub fn run_single(cfg: &ScenarioConfig) -> Result<Trajectory, ScenarioError> {
    let traj = simulate_single(cfg)?;
    write(&cfg.output_path, &single_csv(&traj, cfg.log_base))?;
    Ok(traj)
}

pub fn run_compare(cfg: &ScenarioConfig) -> Result<Vec<(DriveKind, Trajectory)>, ScenarioError> {
    let runs = simulate_compare(cfg)?;
    write(&cfg.output_path, &compare_csv(&runs, cfg.log_base))?;
    Ok(runs)
}

/// Writes the long-format sweep file and its `_steady.csv` summary.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<SweepResult, ScenarioError> {
    let result = simulate_sweep(cfg)?;
    write(&cfg.output_path, &sweep_csv(&result.runs, cfg.log_base))?;
    write(
        &steady_path_for(&cfg.output_path),
        &steady_csv(&result.steady, cfg.log_base),
    )?;
    Ok(result)
}

/// Writes `fig1.csv` … `fig4.csv` (plus steady-state summaries for the
/// sweeps) into `output_dir`.
///
/// Figures 1 and 3 are imaginary-drive Ω sweeps from the ground state;
/// figures 2 and 4 compare the three drive kinds from `|+⟩` at Ω/γ₀ = 10/√2.
/// Odd figures are read for `c_l1`, even figures for `c_re`, but every file
/// carries all columns.
pub fn run_figures(output_dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    fs::create_dir_all(output_dir).map_err(|e| ScenarioError::io(output_dir, e))?;
    let base = ScenarioConfig::default();

    let sweep_cfg = ScenarioConfig {
        command: Command::Sweep,
        sweep: Some(default_sweep()),
        ..base.clone()
    };
    let sweep = simulate_sweep(&sweep_cfg)?;
    let compare_cfg = ScenarioConfig {
        command: Command::Compare,
        params: base.params.with_theta(FRAC_PI_4),
        ..base.clone()
    };
    let compare = simulate_compare(&compare_cfg)?;

    let sweep_text = sweep_csv(&sweep.runs, base.log_base);
    let steady_text = steady_csv(&sweep.steady, base.log_base);
    let compare_text = compare_csv(&compare, base.log_base);

    let mut written = Vec::new();
    for (name, text) in
        FIGURE_FILES
            .iter()
            .zip([&sweep_text, &compare_text, &sweep_text, &compare_text])
    {
        let path = output_dir.join(name);
        write(&path, text)?;
        written.push(path);
    }
    for name in [FIGURE_FILES[0], FIGURE_FILES[2]] {
        let path = steady_path_for(&output_dir.join(name));
        write(&path, &steady_text)?;
        written.push(path);
    }
    Ok(written)
}
