//! The circulant ring `F_q[x]/(x^p - 1)` and block matrices over it.
//!
//! A `p x p` circulant is identified with the polynomial whose coefficients
//! are its first row; row `r` is that row rotated right `r` places. Under
//! this identification a row vector times a circulant is a polynomial
//! product, which is what every routine here relies on.

mod dense;
mod matrix;
mod perm;
mod poly;
mod sparse;

pub use dense::DenseMatrix;
pub use matrix::QCMatrix;
pub use perm::QCPermutation;
pub use poly::CirculantPoly;
pub use sparse::SparseVector;
