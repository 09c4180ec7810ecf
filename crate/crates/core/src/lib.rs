//! Orthonormal systems on [0,1] and the coefficient functionals that decide
//! whether Fourier series of Lipschitz functions converge unconditionally.
//!
//! The crate is organised bottom-up:
//!
//! * [`systems`]: trigonometric, Walsh (Paley), Haar and Rademacher systems
//!   with exact primitives, plus the doubling construction.
//! * [`functionals`]: Fourier coefficients, partial sums, the `M_n(a, ε)`
//!   functional, `B_n(f)`, the `A` and Lipschitz norms and the Abel-type
//!   decomposition `∫fF = I₁ + I₂ + I₃`.
//! * [`constructions`]: the extremal functions `g_n` with their sign
//!   partition, and Parseval-tail subsystem extraction.
//! * [`verifiers`]: drivers that turn the explicit bounds into
//!   [`BoundReport`] tables and run the coefficient-decay and
//!   rearrangement experiments.

pub mod constructions;
pub mod error;
pub mod function;
pub mod functionals;
pub mod quadrature;
pub mod report;
pub mod sequence;
pub mod sum;
pub mod systems;
pub mod verifiers;

pub use error::{Error, Result};
pub use function::{banach_seed_function, doubled_function, UnitIntervalFn};
pub use quadrature::{QuadScheme, QuadratureConfig};
pub use report::BoundReport;
pub use sequence::{CoefficientSeq, EpsilonParams, WeightSeq};
pub use systems::{doubled_system, system_by_name, OrthonormalSystem, SystemRef};
