//! Numerical evaluation of Eisenstein series of even and odd weight, and
//! weighted zero counting in translates `γF̄` of the standard fundamental
//! domain for `SL₂(ℤ)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`moebius`]: exact `SL₂(ℤ)` arithmetic, cusps, Möbius action and reduction
//!   to the standard fundamental domain.
//! - [`eisenstein`]: q-expansion and lattice engines for `E_k`, `G_k` and `𝔾_k`,
//!   slashed series `f|γ`, Bernoulli numbers and zeta values.
//! - [`winding`]: variation of the argument along contours and the weighted
//!   zero counter `N_λ`.
//! - [`zerofinder`]: locating individual zeros and building scatter datasets.
//! - [`bounds`]: closed-form inequalities and expected counts used as oracles.

pub mod bounds;
pub mod eisenstein;
pub mod moebius;
pub mod winding;
pub mod zerofinder;

pub use eisenstein::{EvalError, EvalMode, EvalParams, Evaluation, SeriesKind};
pub use moebius::{ExtRational, HalfPlanePoint, MoebiusError, UniModularMatrix};
pub use winding::{CountOptions, WeightedCount, WindingError};
pub use zerofinder::{LocatedZero, ZeroError};

pub use num_complex::Complex64;
