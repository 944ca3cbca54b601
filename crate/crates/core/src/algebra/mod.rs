//! Exact polynomial algebra: scalars, rings, polynomials, Gröbner bases and
//! ideal operations.

mod groebner;
mod ideal;
mod matrix;
mod monomial;
mod parse;
mod poly;
mod ring;
mod scalar;
pub mod store;

pub use ideal::{poly_gcd, squarefree_parts, Ideal, Point, ReducedGB};
pub use matrix::{subsets, PolyMatrix};
pub use monomial::{Monomial, MonomialOrder};
pub use parse::{identifiers, parse_poly, parse_rational};
pub use poly::Polynomial;
pub use ring::Ring;
pub use scalar::{Field, Scalar};
