//! Carathéodory extremal problems on the symmetrized bidisc.
//!
//! - [`disc`]: Poincaré metric, automorphisms and Blaschke products of the unit disc.
//! - [`symdisc`]: the domain `G`, the functions `Φ_ω`, geodesic normal forms and tangent constructors.
//! - [`caratheodory`]: the metric, its maximizing `ω`, tangent classification, well-alignment.
//! - [`families`]: explicit families of extremal functions.
//! - [`realization`]: finite-dimensional models and realization formulas.
//! - [`verify`]: property suites used by the CLI and the acceptance tests.

pub mod caratheodory;
pub mod disc;
pub mod error;
pub mod families;
pub mod numeric;
pub mod realization;
pub mod sampling;
pub mod symdisc;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
