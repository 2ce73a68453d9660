//! Vectorized (superoperator) form of the master equation.
//!
//! With column stacking `vec(ϱ) = (ϱ₀₀, ϱ₁₀, ϱ₀₁, ϱ₁₁)` every term `AϱB`
//! becomes `(Bᵀ ⊗ A)·vec(ϱ)`, so the whole generator is a single 4×4 matrix
//! `L`. Its exponential gives the exact propagator, which serves as the
//! reference solution for the RK4 integrator and, through power iteration,
//! as the source of the asymptotic normalized state.

use thiserror::Error;

use crate::dynamics::{self, DriveKind, SystemParams};
use crate::qmat::{self, kron, pauli, unvec_cols, vec_cols, Complex, Mat2C, Mat4C, QmatError};

/// Tolerance used by [`leading_eigenmatrix`].
pub const LEADING_MODE_TOL: f64 = 1e-12;
/// Iteration cap used by [`leading_eigenmatrix`].
pub const LEADING_MODE_MAX_ITER: usize = 10_000;
/// Two power-iteration limits farther apart than this signal a degenerate leading eigenspace.
const START_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiouvilleError {
    #[error("propagation time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("leading eigenvalue is degenerate: {0}")]
    DegenerateLeadingEigenvalue(String),
    #[error("iterate lost its trace ({0:.3e}); leading mode is traceless")]
    TracelessMode(f64),
    #[error(transparent)]
    Linalg(#[from] QmatError),
}

/// Generator of the master-equation flow acting on `vec(ϱ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Liouvillian {
    pub matrix: Mat4C,
    pub params: SystemParams,
}

/// Superoperator of `ϱ ↦ AϱB`.
fn sandwich(a: &Mat2C, b: &Mat2C) -> Mat4C {
    kron(&b.transpose(), a)
}

/// Superoperator of the Lindblad term `JϱJ† − ½{J†J, ϱ}`.
fn lindblad(jump: &Mat2C) -> Mat4C {
    let id = Mat2C::identity();
    let jj = jump.adjoint() * *jump;
    sandwich(jump, &jump.adjoint()) - (sandwich(&jj, &id) + sandwich(&id, &jj)).scale_re(0.5)
}

pub fn build_liouvillian(p: &SystemParams) -> Liouvillian {
    let id = Mat2C::identity();
    let sx = pauli::sigma_x();
    let half_omega = 0.5 * p.omega();
    let drive = match p.drive {
        DriveKind::NoDrive => Mat4C::zeros(),
        DriveKind::RealDrive => {
            (sandwich(&sx, &id) - sandwich(&id, &sx)).scale(Complex::new(0.0, -half_omega))
        }
        DriveKind::ImaginaryDrive => (sandwich(&sx, &id) + sandwich(&id, &sx)).scale_re(half_omega),
    };
    let decay = lindblad(&pauli::sigma_minus()).scale_re(p.gamma0 * (p.n_occ + 1.0));
    let absorb = lindblad(&pauli::sigma_plus()).scale_re(p.gamma0 * p.n_occ);
    let l = Liouvillian {
        matrix: drive + decay + absorb,
        params: *p,
    };
    debug_assert!(l.self_check() <= 1e-12 * (1.0 + l.matrix.max_abs()));
    l
}

impl Liouvillian {
    /// `unvec(L·vec(ϱ))`.
    pub fn apply(&self, rho: &Mat2C) -> Mat2C {
        unvec_cols(&self.matrix.matvec(&vec_cols(rho)))
    }

    /// Largest deviation between `L·vec(ϱ)` and the direct right-hand side
    /// over a fixed set of Hermitian probes.
    pub fn self_check(&self) -> f64 {
        let probes = [
            Mat2C::from_real_diag([1.0, 0.0]),
            Mat2C::from_real_diag([0.0, 1.0]),
            pauli::sigma_x(),
            pauli::sigma_y(),
            Mat2C::from_rows([
                [Complex::new(0.3, 0.0), Complex::new(-0.7, 0.2)],
                [Complex::new(-0.7, -0.2), Complex::new(1.1, 0.0)],
            ]),
        ];
        probes
            .iter()
            .map(|rho| {
                self.apply(rho)
                    .max_abs_diff(&dynamics::rhs(rho, &self.params))
            })
            .fold(0.0, f64::max)
    }

    /// `e^{tL}`.
    pub fn propagator(&self, t: f64) -> Result<Mat4C, LiouvilleError> {
        if !(t >= 0.0) {
            return Err(LiouvilleError::NegativeTime(t));
        }
        Ok(qmat::expm4(&self.matrix.scale_re(t))?)
    }
}

/// Applies a 4×4 propagator to a 2×2 state.
pub fn apply_propagator(prop: &Mat4C, rho: &Mat2C) -> Mat2C {
    unvec_cols(&prop.matvec(&vec_cols(rho)))
}

/// `unvec(e^{tL}·vec(ϱ₀))`, Hermitized.
pub fn propagate_exact(rho0: &Mat2C, p: &SystemParams, t: f64) -> Result<Mat2C, LiouvilleError> {
    if t == 0.0 {
        return Ok(*rho0);
    }
    let prop = build_liouvillian(p).propagator(t)?;
    Ok(apply_propagator(&prop, rho0).hermitize())
}

/// A converged power-iteration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantMode {
    /// Real part of the leading eigenvalue of `L`, i.e. the asymptotic growth rate of `tr ϱ`.
    pub growth_rate: f64,
    /// Normalized Hermitian eigenmatrix.
    pub state: Mat2C,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerOutcome {
    Converged(DominantMode),
    Stalled { iterations: usize, last_change: f64 },
}

fn renormalize(raw: &Mat2C) -> Result<(f64, Mat2C), LiouvilleError> {
    let tr = raw.trace().re;
    if !(tr > 1e-300) || !tr.is_finite() {
        return Err(LiouvilleError::TracelessMode(tr));
    }
    Ok((tr, raw.scale_re(1.0 / tr).hermitize()))
}

/// Power iteration with the unit-interval propagator `e^{L/γ₀}`.
///
/// Each iterate is divided by its trace. Stops once successive iterates
/// differ by less than `tol` (max-entry norm) and the normalized-flow
/// residual is at most `tol·γ₀`.
pub fn power_iterate(
    l: &Liouvillian,
    start: &Mat2C,
    tol: f64,
    max_iter: usize,
) -> Result<PowerOutcome, LiouvilleError> {
    let interval = 1.0 / l.params.gamma0;
    let prop = l.propagator(interval)?;
    let (_, mut state) = renormalize(start)?;
    let mut last_change = f64::INFINITY;
    for iteration in 1..=max_iter {
        let (growth, next) = renormalize(&apply_propagator(&prop, &state))?;
        last_change = next.max_abs_diff(&state);
        state = next;
        if last_change < tol
            && dynamics::normalized_flow_residual(&state, &l.params) <= tol * l.params.gamma0
        {
            return Ok(PowerOutcome::Converged(DominantMode {
                growth_rate: growth.ln() / interval,
                state,
                iterations: iteration,
            }));
        }
    }
    Ok(PowerOutcome::Stalled {
        iterations: max_iter,
        last_change,
    })
}

/// Leading eigenvalue (real part) of `L` and its normalized eigenmatrix.
///
/// Power iteration is run from two different states; failure of either to
/// converge, or disagreement of the two limits, means the leading eigenvalue
/// is not separated from the rest of the spectrum.
pub fn leading_eigenmatrix(p: &SystemParams) -> Result<(f64, Mat2C), LiouvilleError> {
    let l = build_liouvillian(p);
    let starts = [
        Mat2C::from_real_diag([0.5, 0.5]),
        Mat2C::from_rows([
            [Complex::new(0.8, 0.0), Complex::new(0.25, -0.15)],
            [Complex::new(0.25, 0.15), Complex::new(0.2, 0.0)],
        ]),
    ];
    let mut modes = Vec::with_capacity(starts.len());
    for start in &starts {
        match power_iterate(&l, start, LEADING_MODE_TOL, LEADING_MODE_MAX_ITER)? {
            PowerOutcome::Converged(mode) => modes.push(mode),
            PowerOutcome::Stalled {
                iterations,
                last_change,
            } => {
                return Err(LiouvilleError::DegenerateLeadingEigenvalue(format!(
                    "no convergence after {iterations} iterations (last change {last_change:.3e})"
                )))
            }
        }
    }
    let spread = modes[0].state.max_abs_diff(&modes[1].state);
    if spread > START_AGREEMENT_TOL {
        return Err(LiouvilleError::DegenerateLeadingEigenvalue(format!(
            "limits from different starts differ by {spread:.3e}"
        )));
    }
    Ok((modes[0].growth_rate, modes[0].state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::initial_state;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

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

    /// Determinant of a 4×4 complex matrix by cofactor expansion.
    fn det4(m: &Mat4C) -> Complex {
        fn det3(a: [[Complex; 3]; 3]) -> Complex {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        let mut total = Complex::new(0.0, 0.0);
        for col in 0..4 {
            let mut minor = [[Complex::new(0.0, 0.0); 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for c in 0..4 {
                    if c != col {
                        minor[r - 1][cc] = m[(r, c)];
                        cc += 1;
                    }
                }
            }
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            total += m[(0, col)] * det3(minor) * sign;
        }
        total
    }

    #[test]
    fn zero_temperature_decay_spectrum() {
        // det(L − λI) vanishes at each expected eigenvalue
        let l = build_liouvillian(&params(DriveKind::NoDrive, 0.0, 0.0));
        for lambda in [0.0, -1.0, -0.5] {
            let shifted = l.matrix - Mat4C::identity().scale_re(lambda);
            assert!(det4(&shifted).norm() < 1e-14, "λ={lambda}");
        }
        // −1/2 is a double root: trace of L equals the eigenvalue sum
        assert!((l.matrix.trace() - Complex::new(-2.0, 0.0)).norm() < 1e-15);
        // and a non-eigenvalue gives a non-zero determinant
        assert!(det4(&(l.matrix - Mat4C::identity().scale_re(-0.25))).norm() > 1e-3);
    }

    #[test]
    fn matches_direct_rhs_on_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for drive in DriveKind::ALL {
            let p = params(drive, 10.0 * FRAC_1_SQRT_2, 5.0);
            let l = build_liouvillian(&p);
            for _ in 0..100 {
                let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let rho = Mat2C::from_rows([
                    [Complex::new(rng.gen_range(-1.0..1.0), 0.0), z],
                    [z.conj(), Complex::new(rng.gen_range(-1.0..1.0), 0.0)],
                ]);
                assert!(l.apply(&rho).max_abs_diff(&dynamics::rhs(&rho, &p)) < 1e-12);
            }
        }
    }

    #[test]
    fn thermal_state_is_null_vector() {
        let l = build_liouvillian(&params(DriveKind::NoDrive, 0.0, 5.0));
        assert!(l.apply(&thermal(5.0)).max_abs() < 1e-15);
    }

    #[test]
    fn propagate_examples() {
        let p = params(DriveKind::ImaginaryDrive, 3.0, 5.0);
        let rho0 = initial_state(0.4, 0.3);
        assert_eq!(propagate_exact(&rho0, &p, 0.0).unwrap(), rho0);
        let relaxed = propagate_exact(
            &initial_state(FRAC_PI_2, 0.0),
            &params(DriveKind::NoDrive, 0.0, 5.0),
            5.0,
        )
        .unwrap();
        assert!(relaxed.max_abs_diff(&thermal(5.0)) < 1e-6);
        assert!(matches!(
            propagate_exact(&rho0, &p, -1.0),
            Err(LiouvilleError::NegativeTime(_))
        ));
    }

    #[test]
    fn propagation_stays_hermitian() {
        for drive in DriveKind::ALL {
            let p = params(drive, 10.0 * FRAC_1_SQRT_2, 5.0);
            let prop = build_liouvillian(&p).propagator(2.0).unwrap();
            let raw = apply_propagator(&prop, &initial_state(FRAC_PI_4, 0.0));
            assert!(raw.hermiticity_defect() <= 1e-10 * raw.max_abs().max(1.0));
        }
    }

    #[test]
    fn leading_mode_examples() {
        let (g, s) = leading_eigenmatrix(&params(DriveKind::NoDrive, 0.0, 5.0)).unwrap();
        assert!(g.abs() < 1e-12);
        assert!(s.max_abs_diff(&thermal(5.0)) < 1e-11);

        for omega in [0.5, 3.0, 10.0 * FRAC_1_SQRT_2] {
            let (g, _) = leading_eigenmatrix(&params(DriveKind::RealDrive, omega, 5.0)).unwrap();
            assert!(g.abs() < 1e-12, "Ω={omega} g={g}");
        }

        let p = params(DriveKind::ImaginaryDrive, 10.0 * FRAC_1_SQRT_2, 5.0);
        let (g, s) = leading_eigenmatrix(&p).unwrap();
        assert!(g > 0.0);
        let steady = dynamics::steady_state(&p, 1e-12).unwrap();
        assert!(s.max_abs_diff(&steady) < 1e-8);
    }

    #[test]
    fn leading_mode_growth_zero_temperature_imaginary() {
        // the reported growth rate must be a root of det(L − λI)
        let p = params(DriveKind::ImaginaryDrive, 2.0, 0.0);
        let l = build_liouvillian(&p);
        let (g, _) = leading_eigenmatrix(&p).unwrap();
        let shifted = l.matrix - Mat4C::identity().scale_re(g);
        assert!(det4(&shifted).norm() < 1e-9 * (1.0 + g.powi(4)));
    }
}
