//! Coherence quantifiers for normalized qubit states in the computational basis.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::qmat::{self, Complex, Mat2C, QmatError};

/// Eigenvalues below this are rejected as unphysical; anything above is clamped into [0, 1].
pub const EIGENVALUE_REJECT: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoherenceError {
    #[error("state has eigenvalue {0:.3e}, below the physical floor")]
    InvalidState(f64),
    #[error(transparent)]
    Linalg(#[from] QmatError),
}

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    E,
}

impl LogBase {
    /// Converts a value in bits into this base.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Two => bits,
            LogBase::E => bits * std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "2" => Ok(LogBase::Two),
            "e" | "E" => Ok(LogBase::E),
            other => Err(format!("unknown log base '{other}' (expected 2 or e)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePair {
    pub c_l1: f64,
    /// In bits.
    pub c_re: f64,
}

/// ℓ1-norm of coherence: the sum of off-diagonal moduli.
pub fn l1_coherence(rho: &Mat2C) -> f64 {
    rho[(0, 1)].norm() + rho[(1, 0)].norm()
}

/// `−p log₂ p − (1−p) log₂(1−p)` style sum with `0·log 0 = 0`.
fn shannon_bits(probabilities: [f64; 2]) -> f64 {
    probabilities
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn clamp_probability(x: f64) -> Result<f64, CoherenceError> {
    if x < EIGENVALUE_REJECT {
        return Err(CoherenceError::InvalidState(x));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &Mat2C) -> Result<f64, CoherenceError> {
    let (hi, lo) = qmat::hermitian_eigenvalues(rho)?;
    Ok(shannon_bits([
        clamp_probability(hi)?,
        clamp_probability(lo)?,
    ]))
}

pub fn von_neumann_entropy_in(rho: &Mat2C, base: LogBase) -> Result<f64, CoherenceError> {
    von_neumann_entropy(rho).map(|bits| base.from_bits(bits))
}

/// Relative entropy of coherence `S(ρ_diag) − S(ρ)`, in bits.
pub fn relative_entropy_coherence(rho: &Mat2C) -> Result<f64, CoherenceError> {
    if rho[(0, 1)] == Complex::new(0.0, 0.0) && rho[(1, 0)] == Complex::new(0.0, 0.0) {
        // already incoherent; still validate the populations
        clamp_probability(rho[(0, 0)].re)?;
        clamp_probability(rho[(1, 1)].re)?;
        return Ok(0.0);
    }
    let diag = shannon_bits([
        clamp_probability(rho[(0, 0)].re)?,
        clamp_probability(rho[(1, 1)].re)?,
    ]);
    let value = diag - von_neumann_entropy(rho)?;
    // tiny negatives are rounding
    Ok(if value < 0.0 && value > -1e-12 {
        0.0
    } else {
        value
    })
}

pub fn coherence_pair(rho: &Mat2C) -> Result<CoherencePair, CoherenceError> {
    Ok(CoherencePair {
        c_l1: l1_coherence(rho),
        c_re: relative_entropy_coherence(rho)?,
    })
}
