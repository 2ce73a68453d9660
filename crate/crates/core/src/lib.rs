//! Coherence dynamics of a dissipative two-level system under a
//! non-Hermitian (gain/loss) drive.
//!
//! - [`qmat`]: 2×2 / 4×4 complex matrices, brackets, Hermitian eigenvalues, `expm`.
//! - [`dynamics`]: master-equation right-hand side, RK4 integration, normalization, steady state.
//! - [`liouville`]: superoperator form, exact propagator, leading eigenmatrix.
//! - [`coherence`]: ℓ1-norm and relative-entropy coherence.
//! - [`scenario`]: configuration, runs and CSV output behind the `ptqubit` binary.

pub mod coherence;
pub mod dynamics;
pub mod liouville;
pub mod qmat;
pub mod scenario;

pub use coherence::{CoherencePair, LogBase};
pub use dynamics::{DriveKind, SystemParams, Trajectory};
pub use liouville::Liouvillian;
pub use qmat::{Complex, Mat2C, Mat4C};
