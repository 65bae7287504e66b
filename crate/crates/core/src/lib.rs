//! Discrete orthogonality measures of compact Jacobi matrices with
//! exponentially decaying recurrence coefficients.
//!
//! The crate reconstructs the measure (support points and masses), evaluates
//! the associated orthogonal polynomials stably on its support, builds Gauss
//! quadrature, and computes Fourier partial sums, Dirichlet kernels and
//! Lebesgue constants over the reconstructed measure.

// negated comparisons are used so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod coefficients;
pub mod error;
pub mod io;
pub mod polyeval;
pub mod scaled;
pub mod spectrum;

pub use coefficients::{
    check_hypotheses, Beta0Mode, HypothesisReport, RecurrenceCoefficients, TableRow, TailExtension,
};
pub use error::{Error, Result};
pub use polyeval::PolySequenceEval;
pub use scaled::ScaledReal;
pub use spectrum::{DiscreteMeasure, QuadratureRule};
