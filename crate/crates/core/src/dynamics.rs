//! Master-equation dynamics of the driven dissipative qubit.
//!
//! Everything here lives in the interaction picture on resonance, so the
//! generator of the flow is linear and time independent:
//!
//! ```text
//! ϱ̇ = drive(ϱ) + γ₀(N+1)·D[σ₋](ϱ) + γ₀N·D[σ₊](ϱ)
//! ```
//!
//! The imaginary drive enters as an anticommutator, so `tr ϱ` is not
//! conserved. The integrator carries the unnormalized `ϱ` and only divides by
//! the trace when a sample is recorded.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::coherence::{self, CoherenceError};
use crate::liouville::{self, LiouvilleError};
use crate::qmat::{self, anticommutator, commutator, pauli, Complex, Mat2C, QmatError};

/// Negative normalized eigenvalue beyond which a step size is deemed too coarse.
pub const STEP_EIGENVALUE_FLOOR: f64 = -1e-6;
/// Raw trace magnitude that triggers an exact rescale of the integrator state.
pub const RESCALE_THRESHOLD: f64 = 1e100;
/// Default iteration cap for the steady-state search.
pub const STEADY_STATE_MAX_ITER: usize = 10_000;
/// Default integration step in units of `1/γ₀`.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default number of steps between recorded samples.
pub const DEFAULT_SAMPLE_EVERY: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("initial state is not Hermitian (defect {0:.3e})")]
    NonHermitianInitialState(f64),
    #[error("trace {0:.3e} is too small to normalize")]
    ZeroTrace(f64),
    #[error("normalized eigenvalue {eigenvalue:.3e} at t = {t}: step size too large")]
    StepTooLarge { t: f64, eigenvalue: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("steady state did not converge within {iterations} iterations (last change {last_change:.3e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
    #[error(transparent)]
    Linalg(#[from] QmatError),
}

/// Algebraic form of the drive term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DriveKind {
    /// Pure thermal dissipation.
    NoDrive,
    /// Hermitian drive `Γ`: `−i(Ω/2)[σx, ϱ]` (resonance fluorescence).
    RealDrive,
    /// Non-Hermitian drive `iΓ`: `(Ω/2){σx, ϱ}`.
    ImaginaryDrive,
}

impl DriveKind {
    pub const ALL: [DriveKind; 3] = [
        DriveKind::NoDrive,
        DriveKind::RealDrive,
        DriveKind::ImaginaryDrive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DriveKind::NoDrive => "none",
            DriveKind::RealDrive => "real",
            DriveKind::ImaginaryDrive => "imaginary",
        }
    }

    /// Whether the generator conserves `tr ϱ`.
    pub fn preserves_trace(self) -> bool {
        !matches!(self, DriveKind::ImaginaryDrive)
    }
}

impl fmt::Display for DriveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no" => Ok(DriveKind::NoDrive),
            "real" => Ok(DriveKind::RealDrive),
            "imaginary" | "imag" => Ok(DriveKind::ImaginaryDrive),
            other => Err(format!(
                "unknown drive kind '{other}' (expected none|real|imaginary)"
            )),
        }
    }
}

/// Physical parameters. Rates are in units of `γ₀`, times in units of `1/γ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub gamma0: f64,
    /// Mean thermal photon number `N(ω₀)`.
    pub n_occ: f64,
    /// Coupling strength `Ω/γ₀`.
    pub omega_over_gamma: f64,
    pub drive: DriveKind,
    /// Initial polar angle θ.
    pub theta: f64,
    /// Initial relative phase φ.
    pub phi: f64,
}

impl Default for SystemParams {
    /// `N = 5`, `Ω/γ₀ = 10/√2`, imaginary drive, ground-state start.
    fn default() -> Self {
        Self {
            gamma0: 1.0,
            n_occ: 5.0,
            omega_over_gamma: 10.0 * FRAC_1_SQRT_2,
            drive: DriveKind::ImaginaryDrive,
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }
}

impl SystemParams {
    pub fn with_drive(mut self, drive: DriveKind) -> Self {
        self.drive = drive;
        self
    }

    pub fn with_omega(mut self, omega_over_gamma: f64) -> Self {
        self.omega_over_gamma = omega_over_gamma;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Absolute drive strength `Ω`.
    pub fn omega(&self) -> f64 {
        self.omega_over_gamma * self.gamma0
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |msg: String| Err(DynamicsError::InvalidParams(msg));
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return bad(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if !(self.n_occ >= 0.0 && self.n_occ.is_finite()) {
            return bad(format!("n_occ must be non-negative, got {}", self.n_occ));
        }
        if !(self.omega_over_gamma >= 0.0 && self.omega_over_gamma.is_finite()) {
            return bad(format!(
                "omega_over_gamma must be non-negative, got {}",
                self.omega_over_gamma
            ));
        }
        if !(self.theta.is_finite() && self.phi.is_finite()) {
            return bad("initial angles must be finite".into());
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Mat2C {
        initial_state(self.theta, self.phi)
    }
}

/// `(sin θ, cos θ)` with exact zeros and ones at multiples of π/2.
fn sin_cos_snapped(theta: f64) -> (f64, f64) {
    let quarters = theta / std::f64::consts::FRAC_PI_2;
    let nearest = quarters.round();
    if (quarters - nearest).abs() <= 4.0 * f64::EPSILON * nearest.abs().max(1.0) {
        match (nearest as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        theta.sin_cos()
    }
}

/// Projector onto `cos θ|1⟩ + sin θ·e^{iφ}|0⟩`.
pub fn initial_state(theta: f64, phi: f64) -> Mat2C {
    let (s, c) = sin_cos_snapped(theta);
    let excited = Complex::new(c, 0.0);
    let ground = Complex::from_polar(s, phi);
    Mat2C::from_rows([
        [excited * excited.conj(), excited * ground.conj()],
        [ground * excited.conj(), ground * ground.conj()],
    ])
}

/// Thermal emission plus absorption Lindblad terms at occupancy `N`.
pub fn dissipator(rho: &Mat2C, p: &SystemParams) -> Mat2C {
    let sp = pauli::sigma_plus();
    let sm = pauli::sigma_minus();
    let down = sm * *rho * sp - anticommutator(&(sp * sm), rho).scale_re(0.5);
    let up = sp * *rho * sm - anticommutator(&(sm * sp), rho).scale_re(0.5);
    down.scale_re(p.gamma0 * (p.n_occ + 1.0)) + up.scale_re(p.gamma0 * p.n_occ)
}

pub fn drive_term(rho: &Mat2C, p: &SystemParams) -> Mat2C {
    let half_omega = 0.5 * p.omega();
    let sx = pauli::sigma_x();
    match p.drive {
        DriveKind::NoDrive => Mat2C::zeros(),
        DriveKind::RealDrive => commutator(&sx, rho).scale(Complex::new(0.0, -half_omega)),
        DriveKind::ImaginaryDrive => anticommutator(&sx, rho).scale_re(half_omega),
    }
}

/// Full right-hand side `ϱ̇`.
pub fn rhs(rho: &Mat2C, p: &SystemParams) -> Mat2C {
    drive_term(rho, p) + dissipator(rho, p)
}

/// Expected `tr ϱ̇`: `Ω·tr(σx ϱ)` for the imaginary drive, zero otherwise.
pub fn trace_rate(rho: &Mat2C, p: &SystemParams) -> f64 {
    match p.drive {
        DriveKind::ImaginaryDrive => p.omega() * (pauli::sigma_x() * *rho).trace().re,
        _ => 0.0,
    }
}

/// `ϱ / tr ϱ`, Hermitized, with the diagonal adjusted so the trace is exactly one.
pub fn normalize(rho_raw: &Mat2C) -> Result<Mat2C, DynamicsError> {
    let tr = rho_raw.trace().re;
    if !(tr.abs() > 1e-300) || !tr.is_finite() {
        return Err(DynamicsError::ZeroTrace(tr));
    }
    let mut out = rho_raw.scale_re(1.0 / tr).hermitize();
    let excited = out[(0, 0)].re;
    out[(0, 0)] = Complex::new(excited, 0.0);
    out[(1, 1)] = Complex::new(1.0 - excited, 0.0);
    Ok(out)
}

/// Sampled output of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times `γ₀t`.
    pub times: Vec<f64>,
    /// `tr ϱ` of the integrator state at each sample (after any rescales so far).
    pub raw_trace: Vec<f64>,
    /// Natural log of the true, unrescaled `tr ϱ`.
    pub ln_trace: Vec<f64>,
    /// Integrator state at each sample (after any rescales so far).
    pub raw_states: Vec<Mat2C>,
    /// Normalized density matrices.
    pub states: Vec<Mat2C>,
    pub c_l1: Vec<f64>,
    /// Relative entropy of coherence in bits.
    pub c_re: Vec<f64>,
    /// Number of overflow-guard rescales performed.
    pub rescales: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            raw_trace: Vec::with_capacity(n),
            ln_trace: Vec::with_capacity(n),
            raw_states: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            c_l1: Vec::with_capacity(n),
            c_re: Vec::with_capacity(n),
            rescales: 0,
        }
    }

    fn record(&mut self, t: f64, raw: &Mat2C, ln_scale: f64) -> Result<(), DynamicsError> {
        let tr = raw.trace().re;
        let rho = normalize(raw)?;
        let (_, lowest) = qmat::hermitian_eigenvalues(&rho)?;
        if lowest < STEP_EIGENVALUE_FLOOR {
            return Err(DynamicsError::StepTooLarge {
                t,
                eigenvalue: lowest,
            });
        }
        let pair = coherence::coherence_pair(&rho)?;
        self.times.push(t);
        self.raw_trace.push(tr);
        self.ln_trace.push(tr.abs().ln() + ln_scale);
        self.raw_states.push(*raw);
        self.states.push(rho);
        self.c_l1.push(pair.c_l1);
        self.c_re.push(pair.c_re);
        Ok(())
    }
}

/// Number of steps such that `steps·dt = t_end`.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidGrid(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_end >= dt && t_end.is_finite()) {
        return Err(DynamicsError::InvalidGrid(format!(
            "t_end must be at least dt, got t_end={t_end}, dt={dt}"
        )));
    }
    let steps = (t_end / dt).round();
    if (steps * dt - t_end).abs() > 1e-9 * t_end {
        return Err(DynamicsError::InvalidGrid(format!(
            "t_end={t_end} is not a whole number of steps of dt={dt}"
        )));
    }
    Ok(steps as usize)
}

fn rk4_step(rho: &Mat2C, p: &SystemParams, dt: f64) -> Mat2C {
    let k1 = rhs(rho, p);
    let k2 = rhs(&(*rho + k1.scale_re(0.5 * dt)), p);
    let k3 = rhs(&(*rho + k2.scale_re(0.5 * dt)), p);
    let k4 = rhs(&(*rho + k3.scale_re(dt)), p);
    *rho + (k1 + (k2 + k3).scale_re(2.0) + k4).scale_re(dt / 6.0)
}

/// Integrates the unnormalized master equation with classic fixed-step RK4.
///
/// Samples are taken at `t = 0`, every `sample_every` steps, and at `t_end`.
/// The initial state must be Hermitian with non-zero trace; it need not be
/// normalized.
pub fn integrate(
    rho0: &Mat2C,
    p: &SystemParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory, DynamicsError> {
    p.validate()?;
    if sample_every == 0 {
        return Err(DynamicsError::InvalidGrid(
            "sample_every must be at least 1".into(),
        ));
    }
    let steps = step_count(t_end, dt)?;
    let defect = rho0.hermiticity_defect();
    if !(defect <= qmat::HERMITIAN_TOL * rho0.max_abs().max(1.0)) {
        return Err(DynamicsError::NonHermitianInitialState(defect));
    }

    let mut traj = Trajectory::with_capacity(steps / sample_every + 2);
    let mut state = *rho0;
    let mut ln_scale = 0.0;
    traj.record(0.0, &state, ln_scale)?;

    for step in 1..=steps {
        state = rk4_step(&state, p, dt);
        let t = step as f64 * dt;
        if !state.is_finite() {
            return Err(DynamicsError::NonFiniteState { t });
        }
        let tr = state.trace().re;
        if tr.abs() > RESCALE_THRESHOLD {
            state = state.scale_re(1.0 / tr.abs());
            ln_scale += tr.abs().ln();
            traj.rescales += 1;
        }
        if step % sample_every == 0 || step == steps {
            traj.record(t, &state, ln_scale)?;
        }
    }
    Ok(traj)
}

/// Fixed point of the normalized flow `ρ̇ = L(ρ) − tr(L(ρ))·ρ`.
///
/// Power iteration with the exact propagator over unit intervals, starting
/// from `I/2`, until successive normalized iterates differ by less than `tol`
/// and the normalized-flow residual is at most `tol·γ₀`.
pub fn steady_state(p: &SystemParams, tol: f64) -> Result<Mat2C, DynamicsError> {
    steady_state_with_cap(p, tol, STEADY_STATE_MAX_ITER)
}

pub fn steady_state_with_cap(
    p: &SystemParams,
    tol: f64,
    max_iter: usize,
) -> Result<Mat2C, DynamicsError> {
    if !(tol > 0.0) {
        return Err(DynamicsError::InvalidParams(format!(
            "tol must be positive, got {tol}"
        )));
    }
    p.validate()?;
    let l = liouville::build_liouvillian(p);
    let start = Mat2C::from_real_diag([0.5, 0.5]);
    let found = liouville::power_iterate(&l, &start, tol, max_iter)?;
    match found {
        liouville::PowerOutcome::Converged(mode) => Ok(mode.state),
        liouville::PowerOutcome::Stalled {
            iterations,
            last_change,
        } => Err(DynamicsError::NoConvergence {
            iterations,
            last_change,
        }),
    }
}

/// `‖rhs(ρ) − tr(rhs(ρ))·ρ‖_max`, the residual of the normalized flow.
pub fn normalized_flow_residual(rho: &Mat2C, p: &SystemParams) -> f64 {
    let d = rhs(rho, p);
    (d - rho.scale(d.trace())).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn params(drive: DriveKind, omega: f64, n: f64) -> SystemParams {
        SystemParams {
            drive,
            omega_over_gamma: omega,
            n_occ: n,
            ..SystemParams::default()
        }
    }

    fn thermal(n: f64) -> Mat2C {
        Mat2C::from_real_diag([n / (2.0 * n + 1.0), (n + 1.0) / (2.0 * n + 1.0)])
    }

    fn plus() -> Mat2C {
        Mat2C::from_rows([[c(0.5, 0.0); 2]; 2])
    }

    #[test]
    fn initial_state_examples() {
        assert_eq!(
            initial_state(FRAC_PI_2, 0.0),
            Mat2C::from_real_diag([0.0, 1.0])
        );
        assert!(initial_state(FRAC_PI_4, 0.0).max_abs_diff(&plus()) < 1e-15);
        for phi in [0.0, 0.3, PI, -2.0] {
            assert!(
                initial_state(0.0, phi).max_abs_diff(&Mat2C::from_real_diag([1.0, 0.0])) < 1e-16
            );
        }
        let s = initial_state(0.4, 1.1);
        assert!(s.hermiticity_defect() < 1e-16);
        assert!((s.trace().re - 1.0).abs() < 1e-15);
        let want = Complex::from_polar(0.4f64.cos() * 0.4f64.sin(), -1.1);
        assert!((s[(0, 1)] - want).norm() < 1e-16);
    }

    #[test]
    fn dissipator_examples() {
        for n in [0.0, 1.0, 5.0] {
            let d = dissipator(
                &Mat2C::from_real_diag([0.5, 0.5]),
                &params(DriveKind::NoDrive, 0.0, n),
            );
            assert!(
                d.max_abs_diff(&Mat2C::from_real_diag([-0.5, 0.5])) < 1e-15,
                "n={n}"
            );
            let z = dissipator(&thermal(n), &params(DriveKind::NoDrive, 0.0, n));
            assert!(z.max_abs() < 1e-15);
        }
        // |+⟩⟨+| at N=5: coherence decays at (2N+1)/2
        let d = dissipator(&plus(), &params(DriveKind::NoDrive, 0.0, 5.0));
        assert!((d[(0, 1)] - c(-5.5 * 0.5, 0.0)).norm() < 1e-14);
        assert!(d.hermiticity_defect() < 1e-15 && d.trace().norm() < 1e-13);
    }

    #[test]
    fn drive_examples() {
        let omega = 1.7;
        let half = Mat2C::from_real_diag([0.5, 0.5]);
        let imag = params(DriveKind::ImaginaryDrive, omega, 5.0);
        let real = params(DriveKind::RealDrive, omega, 5.0);
        assert!(
            drive_term(&half, &imag).max_abs_diff(&pauli::sigma_x().scale_re(omega / 2.0)) < 1e-15
        );
        assert_eq!(drive_term(&half, &real), Mat2C::zeros());
        assert!(drive_term(&plus(), &imag).max_abs_diff(&plus().scale_re(omega)) < 1e-15);
        assert_eq!(
            drive_term(&plus(), &params(DriveKind::NoDrive, omega, 5.0)),
            Mat2C::zeros()
        );
    }

    #[test]
    fn rhs_examples() {
        let z = rhs(&thermal(5.0), &params(DriveKind::NoDrive, 0.0, 5.0));
        assert!(z.max_abs() < 1e-15);
        let got = rhs(
            &Mat2C::from_real_diag([0.5, 0.5]),
            &params(DriveKind::ImaginaryDrive, 1.0, 5.0),
        );
        let want = pauli::sigma_x().scale_re(0.5) + Mat2C::from_real_diag([-0.5, 0.5]);
        assert!(got.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&Mat2C::from_real_diag([2.0, 2.0])).unwrap();
        assert_eq!(n, Mat2C::from_real_diag([0.5, 0.5]));
        let n = normalize(&Mat2C::from_real_diag([3.0, 1.0])).unwrap();
        assert_eq!(n, Mat2C::from_real_diag([0.75, 0.25]));
        let s = initial_state(0.7, 0.2);
        assert!(normalize(&s).unwrap().max_abs_diff(&s) < 1e-15);
        assert!(matches!(
            normalize(&Mat2C::from_real_diag([1.0, -1.0])),
            Err(DynamicsError::ZeroTrace(_))
        ));
    }

    #[test]
    fn no_dissipation_no_drive_is_constant() {
        let p = SystemParams {
            gamma0: 1e-300,
            omega_over_gamma: 0.0,
            ..SystemParams::default()
        };
        let rho0 = initial_state(0.3, 0.9);
        let traj = integrate(&rho0, &p, 1.0, 1e-2, 5).unwrap();
        for s in &traj.states {
            assert!(s.max_abs_diff(&rho0) < 1e-15);
        }
    }

    #[test]
    fn thermal_relaxation_from_ground() {
        let p = params(DriveKind::NoDrive, 0.0, 5.0);
        let traj = integrate(&initial_state(FRAC_PI_2, 0.0), &p, 5.0, 1e-3, 10).unwrap();
        let last = traj.states.last().unwrap();
        assert!((last[(0, 0)].re - 5.0 / 11.0).abs() < 1e-6);
        assert!((last[(1, 1)].re - 6.0 / 11.0).abs() < 1e-6);
    }

    #[test]
    fn grid_and_sampling() {
        let p = SystemParams::default();
        let traj = integrate(&p.initial_state(), &p, 0.01, 1e-3, 10).unwrap();
        assert_eq!(traj.times.len(), 2);
        assert_eq!(traj.times[0], 0.0);
        assert!((traj.times[1] - 0.01).abs() < 1e-15);
        // final step is always sampled
        let traj = integrate(&p.initial_state(), &p, 0.025, 1e-3, 10).unwrap();
        assert_eq!(traj.times.len(), 4);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn integrate_rejects_bad_inputs() {
        let p = SystemParams::default();
        let rho = p.initial_state();
        assert!(matches!(
            integrate(&rho, &p, 1.0, 0.0, 1),
            Err(DynamicsError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&rho, &p, 1.0, 2.0, 1),
            Err(DynamicsError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&rho, &p, 1.0, 0.3, 1),
            Err(DynamicsError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&rho, &p, 1.0, 0.1, 0),
            Err(DynamicsError::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&pauli::sigma_plus(), &p, 1.0, 0.1, 1),
            Err(DynamicsError::NonHermitianInitialState(_))
        ));
        let neg = SystemParams { n_occ: -1.0, ..p };
        assert!(matches!(
            integrate(&rho, &neg, 1.0, 0.1, 1),
            Err(DynamicsError::InvalidParams(_))
        ));
    }

    #[test]
    fn coarse_step_is_detected() {
        // dt far outside the RK4 stability region for the 11γ₀ relaxation mode
        let p = params(DriveKind::NoDrive, 0.0, 5.0);
        let err = integrate(&plus(), &p, 2.0, 0.5, 1).unwrap_err();
        assert!(matches!(err, DynamicsError::StepTooLarge { .. }), "{err:?}");
    }

    #[test]
    fn overflow_guard_rescales_exactly() {
        let p = params(DriveKind::ImaginaryDrive, 10.0 * FRAC_1_SQRT_2, 5.0);
        let long = integrate(&plus(), &p, 50.0, 1e-3, 1000).unwrap();
        assert!(long.rescales > 0);
        assert!(long
            .raw_trace
            .iter()
            .all(|t| t.abs() <= RESCALE_THRESHOLD * 1.1));
        let growth = liouville::leading_eigenmatrix(&p).unwrap().0;
        let n = long.len();
        let slope =
            (long.ln_trace[n - 1] - long.ln_trace[n - 2]) / (long.times[n - 1] - long.times[n - 2]);
        assert!(
            (slope - growth).abs() < 1e-6,
            "slope {slope} growth {growth}"
        );
    }

    #[test]
    fn steady_state_thermal() {
        let s = steady_state(&params(DriveKind::NoDrive, 0.0, 5.0), 1e-12).unwrap();
        assert!(s.max_abs_diff(&thermal(5.0)) < 1e-11);
    }

    #[test]
    fn steady_state_imaginary_has_coherence() {
        let p = params(DriveKind::ImaginaryDrive, 10.0 * FRAC_1_SQRT_2, 5.0);
        let s = steady_state(&p, 1e-12).unwrap();
        assert!(s[(0, 1)].norm() > 0.1);
        assert!(normalized_flow_residual(&s, &p) <= 1e-12);
    }

    #[test]
    fn steady_state_real_matches_long_integration() {
        let tol = 1e-10;
        let p = params(DriveKind::RealDrive, 10.0 * FRAC_1_SQRT_2, 5.0).with_theta(FRAC_PI_4);
        let s = steady_state(&p, tol).unwrap();
        let traj = integrate(&p.initial_state(), &p, 50.0, 1e-3, 1000).unwrap();
        assert!(traj.states.last().unwrap().max_abs_diff(&s) <= tol);
    }

    #[test]
    fn steady_state_cap_and_tol() {
        let p = SystemParams::default();
        assert!(matches!(
            steady_state(&p, 0.0),
            Err(DynamicsError::InvalidParams(_))
        ));
        assert!(matches!(
            steady_state_with_cap(&p, 1e-12, 1),
            Err(DynamicsError::NoConvergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn drive_kind_parsing() {
        for k in DriveKind::ALL {
            assert_eq!(k.as_str().parse::<DriveKind>().unwrap(), k);
        }
        assert!("sideways".parse::<DriveKind>().is_err());
    }
}
