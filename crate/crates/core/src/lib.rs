//! SPANSE: a one-time signature built on random linear codes over a prime
//! field, with the verifier's parity-check matrix disguised by a sparse
//! transform `S` and a quasi-cyclic permutation.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: arithmetic in `F_q`.
//! - [`qcalg`]: circulant polynomials, quasi-cyclic block matrices, sparse
//!   vectors and block permutations.
//! - [`params`]: parameter sets and the density polynomial of `S`.
//! - [`ldgm`]: the secret low-density generator and its systematic
//!   parity-check matrix.
//! - [`scheme`]: key generation, signing, verification and the binary
//!   encodings.
//! - [`analysis`]: attack cost, rejection rate and size estimates.

pub mod analysis;
mod error;
pub mod field;
pub mod ldgm;
pub mod params;
pub mod qcalg;
pub mod scheme;

pub use error::{Error, ParseError, Result};
pub use field::{Field, FieldElement};
pub use params::{builtin, DensityPolynomial, ParameterSet};
pub use scheme::{keygen, sign, verify, PrivateKey, PublicKey, Signature};
