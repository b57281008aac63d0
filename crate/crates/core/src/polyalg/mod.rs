//! Exact polynomial algebra over Q: bivariate and univariate polynomials,
//! resultants, square-free decomposition and complex root isolation.

mod bivar;
mod json;
mod resultant;
mod roots;
mod univar;

use num_complex::Complex64;
use thiserror::Error;

pub use bivar::BivarPoly;
pub use json::{PolyJson, TermJson};
pub use resultant::{eliminate_y, resultant_y, Elimination};
pub(crate) use roots::complex_coeff_roots;
pub use roots::{
    aberth_refine, aberth_with, complex_roots, horner, is_exact_root, rational_candidate, sort_roots,
    square_free_roots, ComplexRoot, DEFAULT_POLISH_TOL, MAX_POLISH_ITER,
};
pub use univar::UnivarPoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("neither polynomial involves y")]
    BothConstantInY,
    #[error("the zero polynomial has no roots to isolate")]
    ZeroPolynomial,
    #[error("root near {root} of a degree-{degree} factor did not polish")]
    NonConvergence { degree: usize, root: Complex64 },
    #[error("malformed polynomial: {0}")]
    Parse(String),
}
