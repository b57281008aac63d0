//! Hénon-type polynomial automorphisms of the plane: exact algebra, Jung
//! decomposition, Green functions, periodic points, local dynamics at
//! saddles and heights over Q.

pub mod amalgam;
pub mod automorphism;
pub mod ergodic;
pub mod green;
pub mod heights;
pub mod localdyn;
pub mod numeric;
pub mod periodic;
pub mod polyalg;
pub mod scalar;
mod serde_util;

pub use scalar::Rational;

/// Exact bivariate polynomial over Q.
pub type Poly = polyalg::BivarPoly<Rational>;
/// Exact univariate polynomial over Q.
pub type UPoly = polyalg::UnivarPoly<Rational>;
/// Green functions in double precision.
pub type Green64 = green::Green<f64>;
/// Green functions in single precision.
pub type Green32 = green::Green<f32>;
