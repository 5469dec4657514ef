//! Critical values discriminants of polynomials (exact) and of entire
//! functions on a disk (numeric, by contour integration), monodromy of
//! inverse functions by fiber tracking, and structural typicality tests
//! for entire functions of the form `Σ c·z^k·exp(Q(z))`.

pub mod acceptance;
pub mod cli;
pub mod contour;
pub mod expr;
pub mod kernel;
pub mod monodromy;
pub mod typicality;

pub use num_complex::Complex64;
