//! Exact computations with the trace map of Frobenius in positive
//! characteristic.
//!
//! The crate works over finite fields `F_{p^s}` and provides:
//!
//! * [`field`]: scalar arithmetic with the Frobenius and its inverse,
//! * [`poly`]: sparse multivariate polynomials and rational functions,
//! * [`forms`]: differential forms on affine charts and the exterior derivative,
//! * [`cartier`]: the trace map on top forms and the inverse Cartier operator,
//! * [`projective`]: twisted canonical section spaces on `P^n` and the
//!   semilinear matrices of the trace map between them,
//! * [`fsplit`]: F-splitting checks for hypersurfaces and projective space,
//! * [`cli`]: the `frobtrace` command-line front end.

pub mod field;
pub mod poly;
pub mod forms;
pub mod linalg;
pub mod cartier;
pub mod projective;
pub mod fsplit;
pub mod parse;
pub mod checks;
pub mod cli;
