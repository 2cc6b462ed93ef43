//! Multi-indices and sparse multivariate polynomials: text grammar,
//! evaluation, derivatives, the Bombieri inner product and the
//! coefficient functionals `coeff_d` and `M_d`.

mod multi_index;
mod parse;
mod polynomial;

pub(crate) use multi_index::factorial;
pub use multi_index::{homogeneous_indices, MultiIndex};
pub use parse::{parse_poly, ParseError, ParseErrorKind, MAX_EXPONENT};
pub use polynomial::{CompiledPolynomial, Polynomial};
