//! Exact rational arithmetic, dense matrices, sparse polynomials and minor identities.

mod matrix;
mod minors;
mod poly;
mod quadratic;
mod rational;
mod surd;

pub use matrix::{
    dot, express_in, independent_subset, max_abs, orthogonal_complement, span_intersection, vectors_rank, RationalMatrix,
};
pub use minors::{
    combinations, cofactor_identity_2x2, det_sum_coefficients, det_sum_expansion, enumerate_minors, minor, minor_at, q0,
    MinorIndex, MinorOrder,
};
pub use poly::{monomials_of_degree, poly_det, Exponent, MultiPoly};
pub use quadratic::{Definiteness, Diagonalization, QuadraticForm};
pub use rational::{
    approximate, denominator_lcm, format_rational, from_f64, int, one, parse_rational, rat, to_f64, zero, Rational,
};
pub use surd::{rational_sqrt, QuadraticSurd};
