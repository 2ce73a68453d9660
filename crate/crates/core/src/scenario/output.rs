use std::fmt::Write as _;

use super::runs::SteadySummary;
use crate::coherence::LogBase;
use crate::dynamics::{DriveKind, Trajectory};

/// Per-sample columns shared by every trajectory file.
pub const CSV_COLUMNS: [&str; 8] = [
    "t",
    "raw_trace",
    "pop_e",
    "pop_g",
    "re_rho01",
    "im_rho01",
    "c_l1",
    "c_re",
];

/// 17 significant digits in scientific notation; round-trips any f64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(lead: Option<&str>) -> String {
    let mut h = String::new();
    if let Some(col) = lead {
        h.push_str(col);
        h.push(',');
    }
    h.push_str(&CSV_COLUMNS.join(","));
    h.push('\n');
    h
}

fn push_rows(out: &mut String, lead: Option<&str>, traj: &Trajectory, base: LogBase) {
    for k in 0..traj.len() {
        let rho = &traj.states[k];
        if let Some(v) = lead {
            out.push_str(v);
            out.push(',');
        }
        let fields = [
            traj.times[k],
            traj.raw_trace[k],
            rho[(0, 0)].re,
            rho[(1, 1)].re,
            rho[(0, 1)].re,
            rho[(0, 1)].im,
            traj.c_l1[k],
            base.from_bits(traj.c_re[k]),
        ];
        let line = fields.map(format_number).join(",");
        // writing to a String cannot fail
        let _ = writeln!(out, "{line}");
    }
}

pub fn single_csv(traj: &Trajectory, base: LogBase) -> String {
    let mut out = header(None);
    push_rows(&mut out, None, traj, base);
    out
}

pub fn compare_csv(runs: &[(DriveKind, Trajectory)], base: LogBase) -> String {
    let mut out = header(Some("drive"));
    for (kind, traj) in runs {
        push_rows(&mut out, Some(kind.as_str()), traj, base);
    }
    out
}

pub fn sweep_csv(runs: &[(f64, Trajectory)], base: LogBase) -> String {
    let mut out = header(Some("omega"));
    for (omega, traj) in runs {
        push_rows(&mut out, Some(&format_number(*omega)), traj, base);
    }
    out
}

pub fn steady_csv(summary: &[SteadySummary], base: LogBase) -> String {
    let mut out = String::from("omega,growth_rate,pop_e,re_rho01,im_rho01,c_l1,c_re\n");
    for s in summary {
        let fields = [
            s.omega,
            s.growth_rate,
            s.state[(0, 0)].re,
            s.state[(0, 1)].re,
            s.state[(0, 1)].im,
            s.c_l1,
            base.from_bits(s.c_re),
        ];
        let _ = writeln!(out, "{}", fields.map(format_number).join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -2.5e-300,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
    }
}
