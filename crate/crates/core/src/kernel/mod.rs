//! Field-generic polynomial and matrix algebra.

pub mod algebra;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod roots;

use thiserror::Error;

pub use algebra::{
    charpoly, charpoly_with_growth, companion, cvd, cvd_pipeline, disc_variety_member,
    discriminant, matpoly_eval, monic_derivative, resultant, CvdPipeline,
};
pub use field::{ExactComplex, ExactParseError, Field};
pub use matrix::{Lu, SquareMatrix};
pub use poly::Poly;
pub use roots::{lex_cmp, min_pairwise_distance, roots, roots_with, sort_lex, RootOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("degree {degree} is below the required {required}")]
    DegreeTooSmall { degree: usize, required: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("non-finite coefficient")]
    NonFiniteCoefficient,
    #[error("root iteration did not converge in {max_iters} iterations (residuals {residuals:?})")]
    NoConvergence {
        max_iters: usize,
        residuals: Vec<f64>,
    },
}
