//! Small fixed-size complex matrices.
//!
//! Only what the qubit model needs: 2×2 density matrices and the 4×4
//! superoperators acting on their column-stacked form. Storage is a plain
//! row-major array so every matrix is `Copy` and lives on the stack.
//!
//! Basis convention for 2×2 operators: index 0 is the excited state |1⟩,
//! index 1 is the ground state |0⟩. Hence `σ₊ = |1⟩⟨0|` has its single
//! non-zero entry at `[0][1]` and `σz = diag(+1, −1)`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

use thiserror::Error;

/// Hermiticity tolerance used when an operation requires a Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmatError {
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("matrix exponential overflowed after {squarings} squarings")]
    Overflow { squarings: u32 },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Dense `N×N` complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize> {
    m: [[Complex; N]; N],
}

pub type Mat2C = CMat<2>;
pub type Mat4C = CMat<4>;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

impl<const N: usize> CMat<N> {
    pub const fn from_rows(m: [[Complex; N]; N]) -> Self {
        Self { m }
    }

    pub const fn zeros() -> Self {
        Self { m: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for k in 0..N {
            out.m[k][k] = ONE;
        }
        out
    }

    pub fn from_diag(d: [Complex; N]) -> Self {
        let mut out = Self::zeros();
        for k in 0..N {
            out.m[k][k] = d[k];
        }
        out
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        Self::from_diag(d.map(|x| Complex::new(x, 0.0)))
    }

    pub fn rows(&self) -> &[[Complex; N]; N] {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                out.m[c][r] = self.m[r][c].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                out.m[c][r] = self.m[r][c];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        (0..N).map(|k| self.m[k][k]).sum()
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..N)
            .map(|c| (0..N).map(|r| self.m[r][c].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max_rc |m[r][c] − conj(m[c][r])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..N {
            for c in r..N {
                worst = worst.max((self.m[r][c] - self.m[c][r].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†)/2`.
    pub fn hermitize(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn matvec(&self, v: &[Complex; N]) -> [Complex; N] {
        let mut out = [ZERO; N];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|c| self.m[r][c] * v[c]).sum();
        }
        out
    }
}

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = Complex;
    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        &self.m[r][c]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        &mut self.m[r][c]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for CMat<N> {
    fn add_assign(&mut self, rhs: Self) {
        for r in 0..N {
            for c in 0..N {
                self.m[r][c] += rhs.m[r][c];
            }
        }
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for r in 0..N {
            for c in 0..N {
                self.m[r][c] -= rhs.m[r][c];
            }
        }
        self
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                out.m[r][c] = (0..N).map(|k| self.m[r][k] * rhs.m[k][c]).sum();
            }
        }
        out
    }
}

/// Pauli and ladder operators in the (excited, ground) basis.
pub mod pauli {
    use super::{Complex, Mat2C, I, ONE, ZERO};

    pub const fn sigma_x() -> Mat2C {
        Mat2C::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Mat2C {
        Mat2C::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub const fn sigma_z() -> Mat2C {
        Mat2C::from_rows([[ONE, ZERO], [ZERO, Complex::new(-1.0, 0.0)]])
    }

    /// Raising operator `|1⟩⟨0|`.
    pub const fn sigma_plus() -> Mat2C {
        Mat2C::from_rows([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// Lowering operator `|0⟩⟨1|`.
    pub const fn sigma_minus() -> Mat2C {
        Mat2C::from_rows([[ZERO, ZERO], [ONE, ZERO]])
    }
}

pub fn commutator<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    *a * *b - *b * *a
}

pub fn anticommutator<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    *a * *b + *b * *a
}

/// Eigenvalues of a Hermitian 2×2 matrix, largest first.
///
/// Closed form `λ± = tr/2 ± sqrt(((h₀₀−h₁₁)/2)² + |h₀₁|²)`.
pub fn hermitian_eigenvalues(h: &Mat2C) -> Result<(f64, f64), QmatError> {
    let defect = h.hermiticity_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(QmatError::NotHermitian {
            defect,
            tol: HERMITIAN_TOL,
        });
    }
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    // average the two off-diagonal slots so a small defect does not bias the radius
    let off = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(off.norm());
    Ok((mean + radius, mean - radius))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat2C, b: &Mat2C) -> Mat4C {
    let mut out = Mat4C::zeros();
    for (i1, j1, i2, j2) in index_quads() {
        out[(2 * i1 + i2, 2 * j1 + j2)] = a[(i1, j1)] * b[(i2, j2)];
    }
    out
}

fn index_quads() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| ((k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1))
}

/// Column-stacked vectorization: `(m₀₀, m₁₀, m₀₁, m₁₁)`.
pub fn vec_cols(m: &Mat2C) -> [Complex; 4] {
    [m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)]]
}

/// Inverse of [`vec_cols`].
pub fn unvec_cols(v: &[Complex; 4]) -> Mat2C {
    Mat2C::from_rows([[v[0], v[2]], [v[1], v[3]]])
}

/// Scaled 1-norm threshold below which the Taylor core is applied.
const EXPM_THETA: f64 = 0.5;
/// Taylor degree; the remainder `θ^19/19!` is about 3e-23 at `θ = 0.5`.
const EXPM_TAYLOR_DEGREE: u32 = 18;

/// Matrix exponential of a 4×4 complex matrix by scaling and squaring.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 0.5, a
/// degree-18 Taylor polynomial is evaluated by Horner's rule, and the result
/// is squared `s` times.
pub fn expm4(a: &Mat4C) -> Result<Mat4C, QmatError> {
    expm(a)
}

pub fn expm<const N: usize>(a: &CMat<N>) -> Result<CMat<N>, QmatError> {
    if !a.is_finite() {
        return Err(QmatError::NonFinite);
    }
    let norm = a.norm1();
    let mut squarings: u32 = 0;
    if norm > EXPM_THETA {
        squarings = (norm / EXPM_THETA).log2().ceil() as u32;
    }
    let scaled = a.scale_re((-(squarings as f64)).exp2());

    let ident = CMat::<N>::identity();
    let mut acc = ident;
    for k in (1..=EXPM_TAYLOR_DEGREE).rev() {
        acc = ident + (scaled * acc).scale_re(1.0 / k as f64);
    }

    for _ in 0..squarings {
        acc = acc * acc;
        if !acc.is_finite() {
            return Err(QmatError::Overflow { squarings });
        }
    }
    Ok(acc)
}
