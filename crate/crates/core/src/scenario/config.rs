use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use super::{Command, ScenarioConfig, ScenarioError};
use crate::coherence::LogBase;
use crate::dynamics::{self, DriveKind};

/// Ω/γ₀ values used for coupling sweeps when none are given.
pub fn default_sweep() -> Vec<f64> {
    vec![1.0, 3.0, 5.0, 10.0 * FRAC_1_SQRT_2, 10.0]
}

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigSource {
    Flag,
    File,
}

#[derive(Parser, Debug)]
#[command(
    name = "ptqubit",
    version,
    about = "Coherence dynamics of a driven dissipative qubit with a non-Hermitian drive"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// Drive kind: none | real | imaginary
    #[arg(long, global = true)]
    drive: Option<String>,
    /// Initial polar angle (radians, or pi/2, pi/4, ...)
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Initial relative phase (radians, or pi/2, ...)
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<String>,
    /// Mean thermal photon number N(ω₀)
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<String>,
    /// Coupling strength Ω/γ₀
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<String>,
    /// End time in units of 1/γ₀
    #[arg(long = "t-end", global = true, allow_hyphen_values = true)]
    t_end: Option<String>,
    /// Integration step in units of 1/γ₀
    #[arg(long, global = true, allow_hyphen_values = true)]
    dt: Option<String>,
    /// Steps between recorded samples
    #[arg(long = "sample-every", global = true, allow_hyphen_values = true)]
    sample_every: Option<String>,
    /// Comma-separated Ω/γ₀ values (sweep only)
    #[arg(long, global = true, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Output CSV file (or directory for `figures`)
    #[arg(long, global = true)]
    out: Option<String>,
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Logarithm base for the relative entropy column: 2 | e
    #[arg(long = "log-base", global = true)]
    log_base: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Single trajectory
    Run,
    /// All three drive kinds from the same initial state
    Compare,
    /// One imaginary-drive trajectory per Ω/γ₀ value, plus steady-state summary
    Sweep,
    /// All four figure datasets into the --out directory
    Figures,
}

const KEYS: [&str; 11] = [
    "drive",
    "theta",
    "phi",
    "n",
    "omega",
    "t-end",
    "dt",
    "sample-every",
    "sweep",
    "out",
    "log-base",
];

fn canonical_key(raw: &str) -> String {
    raw.trim().to_ascii_lowercase().replace('_', "-")
}

/// Parses `key = value` lines; `#` starts a comment.
fn parse_file(text: &str) -> Result<BTreeMap<String, String>, ScenarioError> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::Usage(format!(
                "config line {}: expected key=value, got '{line}'",
                lineno + 1
            )));
        };
        let key = canonical_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(ScenarioError::Usage(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Parses an angle: a float, or `[-][k]pi[/m]` such as `pi/2` or `3pi/4`.
pub fn parse_angle(token: &str) -> Option<f64> {
    let t = token.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let coef = num.strip_suffix("pi")?.trim().trim_end_matches('*');
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().ok()?
    };
    let den = match den {
        Some(d) => d.trim().parse::<f64>().ok().filter(|d| *d != 0.0)?,
        None => 1.0,
    };
    Some(sign * coef * PI / den)
}

struct Lookup<'a> {
    flags: BTreeMap<&'static str, &'a str>,
    file: BTreeMap<String, String>,
}

impl Lookup<'_> {
    fn get(&self, key: &'static str) -> Option<(&str, ConfigSource)> {
        if let Some(v) = self.flags.get(key) {
            return Some((v, ConfigSource::Flag));
        }
        self.file.get(key).map(|v| (v.as_str(), ConfigSource::File))
    }
}

fn bad_value(key: &str, value: &str, source: ConfigSource, why: &str) -> ScenarioError {
    let token = match source {
        ConfigSource::Flag => format!("--{key}={value}"),
        ConfigSource::File => format!("{key}={value} (config file)"),
    };
    ScenarioError::Usage(format!("{token}: {why}"))
}

fn number(lookup: &Lookup<'_>, key: &'static str) -> Result<Option<f64>, ScenarioError> {
    match lookup.get(key) {
        None => Ok(None),
        Some((v, src)) => match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(bad_value(key, v, src, "expected a finite number")),
        },
    }
}

fn angle(lookup: &Lookup<'_>, key: &'static str) -> Result<Option<f64>, ScenarioError> {
    match lookup.get(key) {
        None => Ok(None),
        Some((v, src)) => parse_angle(v)
            .map(Some)
            .ok_or_else(|| bad_value(key, v, src, "expected radians or a multiple of pi")),
    }
}

/// Builds a configuration from command-line tokens (without the program
/// name) and optional key=value file text.
///
/// Precedence is flags, then file, then defaults. When `file` is `None` and
/// `--config=<path>` is present, that file is read.
pub fn parse_config<I, S>(args: I, file: Option<&str>) -> Result<ScenarioConfig, ScenarioError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("ptqubit")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ScenarioError::Help(e.to_string()),
        _ => ScenarioError::Usage(e.to_string()),
    })?;

    let loaded;
    let file_text = match (file, &cli.config) {
        (Some(text), _) => Some(text),
        (None, Some(path)) => {
            loaded = std::fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
            Some(loaded.as_str())
        }
        (None, None) => None,
    };
    let file_map = match file_text {
        Some(text) => parse_file(text)?,
        None => BTreeMap::new(),
    };

    let mut flags = BTreeMap::new();
    let pairs: [(&'static str, &Option<String>); 11] = [
        ("drive", &cli.drive),
        ("theta", &cli.theta),
        ("phi", &cli.phi),
        ("n", &cli.n),
        ("omega", &cli.omega),
        ("t-end", &cli.t_end),
        ("dt", &cli.dt),
        ("sample-every", &cli.sample_every),
        ("sweep", &cli.sweep),
        ("out", &cli.out),
        ("log-base", &cli.log_base),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            flags.insert(key, v.as_str());
        }
    }
    let lookup = Lookup {
        flags,
        file: file_map,
    };

    let command = match cli.command {
        None | Some(Cmd::Run) => Command::Run,
        Some(Cmd::Compare) => Command::Compare,
        Some(Cmd::Sweep) => Command::Sweep,
        Some(Cmd::Figures) => Command::Figures,
    };

    let mut cfg = ScenarioConfig {
        command,
        output_path: PathBuf::from(command.default_output()),
        ..ScenarioConfig::default()
    };

    if let Some((v, src)) = lookup.get("drive") {
        cfg.params.drive = v
            .parse::<DriveKind>()
            .map_err(|why| bad_value("drive", v, src, &why))?;
    }
    if let Some(x) = angle(&lookup, "theta")? {
        cfg.params.theta = x;
    }
    if let Some(x) = angle(&lookup, "phi")? {
        cfg.params.phi = x;
    }
    if let Some(x) = number(&lookup, "n")? {
        if x < 0.0 {
            return Err(bad_value(
                "n",
                &x.to_string(),
                lookup.get("n").unwrap().1,
                "must be >= 0",
            ));
        }
        cfg.params.n_occ = x;
    }
    if let Some(x) = number(&lookup, "omega")? {
        if x < 0.0 {
            let src = lookup.get("omega").unwrap().1;
            return Err(bad_value("omega", &x.to_string(), src, "must be >= 0"));
        }
        cfg.params.omega_over_gamma = x;
    }
    if let Some(x) = number(&lookup, "t-end")? {
        cfg.t_end = x;
    }
    if let Some(x) = number(&lookup, "dt")? {
        cfg.dt = x;
    }
    if let Some((v, src)) = lookup.get("sample-every") {
        cfg.sample_every = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| bad_value("sample-every", v, src, "expected an integer >= 1"))?;
    }
    if let Some((v, src)) = lookup.get("sweep") {
        let values = v
            .split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad_value("sweep", v, src, "expected comma-separated numbers"))?;
        if values.is_empty() {
            return Err(bad_value("sweep", v, src, "sweep list is empty"));
        }
        if values.iter().any(|&x| x < 0.0) {
            return Err(bad_value("sweep", v, src, "sweep values must be >= 0"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad_value(
                "sweep",
                v,
                src,
                "sweep values must be strictly increasing",
            ));
        }
        cfg.sweep = Some(values);
    }
    if let Some((v, _)) = lookup.get("out") {
        cfg.output_path = PathBuf::from(v);
    }
    if let Some((v, src)) = lookup.get("log-base") {
        cfg.log_base = v
            .parse::<LogBase>()
            .map_err(|why| bad_value("log-base", v, src, &why))?;
    }

    if !(cfg.dt > 0.0) {
        let src = lookup.get("dt").map_or(ConfigSource::Flag, |(_, s)| s);
        return Err(bad_value("dt", &cfg.dt.to_string(), src, "must be > 0"));
    }
    if !(cfg.dt < cfg.t_end) {
        return Err(ScenarioError::Usage(format!(
            "--dt={} must be smaller than --t-end={}",
            cfg.dt, cfg.t_end
        )));
    }
    dynamics::step_count(cfg.t_end, cfg.dt).map_err(|e| ScenarioError::Usage(e.to_string()))?;

    let sweep_flag = lookup.flags.contains_key("sweep");
    match command {
        Command::Run | Command::Compare if sweep_flag => {
            return Err(ScenarioError::Conflict(format!(
                "--sweep only applies to the sweep subcommand, not {command:?}"
            )));
        }
        Command::Sweep if cfg.params.drive == DriveKind::NoDrive => {
            return Err(ScenarioError::Conflict(
                "--drive=none cannot be combined with an Ω sweep".into(),
            ));
        }
        Command::Sweep if cfg.sweep.is_none() => cfg.sweep = Some(default_sweep()),
        _ => {}
    }
    Ok(cfg)
}

/// [`parse_config`] without file text; `--config` is honoured.
pub fn load_config<I, S>(args: I) -> Result<ScenarioConfig, ScenarioError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    parse_config(args, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn parse(args: &[&str]) -> Result<ScenarioConfig, ScenarioError> {
        parse_config(args.iter().copied(), None)
    }

    #[test]
    fn figure_one_flags() {
        let cfg = parse(&[
            "run",
            "--drive=imaginary",
            "--theta=pi/2",
            "--n=5",
            "--omega=7.0710678",
        ])
        .unwrap();
        assert_eq!(cfg.command, Command::Run);
        assert_eq!(cfg.params.drive, DriveKind::ImaginaryDrive);
        assert_eq!(cfg.params.theta, FRAC_PI_2);
        assert_eq!(cfg.params.n_occ, 5.0);
        assert!((cfg.params.omega_over_gamma - 10.0 / 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn empty_args_give_defaults() {
        let cfg = parse(&[]).unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.params.drive, DriveKind::ImaginaryDrive);
        assert_eq!(cfg.params.theta, FRAC_PI_2);
        assert_eq!(cfg.params.n_occ, 5.0);
        assert_eq!(cfg.params.omega_over_gamma, 10.0 * FRAC_1_SQRT_2);
        assert_eq!(cfg.t_end, 10.0);
    }

    #[test]
    fn zero_dt_is_usage_error() {
        let err = parse(&["run", "--dt=0"]).unwrap_err();
        assert!(
            matches!(err, ScenarioError::Usage(ref m) if m.contains("--dt=0")),
            "{err}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn other_usage_errors() {
        for args in [
            &["run", "--dt=abc"][..],
            &["run", "--theta=banana"],
            &["run", "--drive=sideways"],
            &["run", "--n=-1"],
            &["run", "--sample-every=0"],
            &["run", "--dt=0.3", "--t-end=1"],
            &["run", "--t-end=0.0005"],
            &["sweep", "--sweep=3,1"],
            &["sweep", "--sweep=-1,2"],
            &["sweep", "--sweep=1,,2"],
            &["run", "--log-base=10"],
            &["explode"],
            &["run", "--nonsense=1"],
        ] {
            let err = parse(args).unwrap_err();
            assert!(matches!(err, ScenarioError::Usage(_)), "{args:?}: {err}");
        }
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = "# figure two\ntheta = pi/4\nn=3\ndt = 2e-3 # coarse\nt_end=4\n";
        let cfg = parse_config(["run", "--n=7"], Some(file)).unwrap();
        assert_eq!(cfg.params.theta, FRAC_PI_4);
        assert_eq!(cfg.params.n_occ, 7.0);
        assert_eq!(cfg.dt, 2e-3);
        assert_eq!(cfg.t_end, 4.0);
        assert_eq!(cfg.params.omega_over_gamma, 10.0 * FRAC_1_SQRT_2);
    }

    #[test]
    fn file_rejects_unknown_keys_and_bad_lines() {
        assert!(matches!(
            parse_config(["run"], Some("colour = red\n")),
            Err(ScenarioError::Usage(m)) if m.contains("colour")
        ));
        assert!(matches!(
            parse_config(["run"], Some("theta pi\n")),
            Err(ScenarioError::Usage(_))
        ));
    }

    #[test]
    fn conflicts() {
        let err = parse(&["run", "--sweep=1,2"]).unwrap_err();
        assert!(matches!(err, ScenarioError::Conflict(_)));
        let err = parse(&["sweep", "--drive=none"]).unwrap_err();
        assert!(matches!(err, ScenarioError::Conflict(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sweep_defaults_to_standard_set() {
        let cfg = parse(&["sweep"]).unwrap();
        assert_eq!(cfg.sweep, Some(default_sweep()));
        assert_eq!(cfg.output_path, PathBuf::from("sweep.csv"));
        let cfg = parse(&["sweep", "--sweep=0"]).unwrap();
        assert_eq!(cfg.sweep, Some(vec![0.0]));
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2"), Some(FRAC_PI_2));
        assert_eq!(parse_angle("pi/4"), Some(FRAC_PI_4));
        assert_eq!(parse_angle("PI"), Some(PI));
        assert_eq!(parse_angle("-pi/2"), Some(-FRAC_PI_2));
        assert!((parse_angle("3pi/4").unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-16);
        assert_eq!(parse_angle("0.25"), Some(0.25));
        assert_eq!(parse_angle("pi/0"), None);
        assert_eq!(parse_angle("tau"), None);
    }

    #[test]
    fn missing_config_file_is_io_error() {
        let err = parse(&["run", "--config=/definitely/not/here.cfg"]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
