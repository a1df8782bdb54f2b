//! The exact coefficient tower: Gaussian rationals, graded polynomials in
//! the Chern variables, truncated Laurent series in `u`, and rational
//! functions in `q`.

mod gauss;
mod graded;
mod laurent;
mod qrational;

pub use gauss::{GaussRat, ParseGaussRatError};
pub use graded::{poly_homogeneous_degree, ChernMono, GradedPoly, HomogeneousDegree};
pub use laurent::ULaurent;
pub use qrational::{exp_series, expand_change_of_variables, QPoly, QRational};
