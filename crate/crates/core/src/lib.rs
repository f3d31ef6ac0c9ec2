//! Exact factorization of special linear and symplectic matrices into
//! unitriangular and exponential factors.
//!
//! * [`ring`]: Gaussian rationals, sparse polynomials, rational functions.
//! * [`matrix`]: dense exact matrices, determinants, symplectic predicates.
//! * [`sympgen`]: elementary SL and symplectic generators and words in them.
//! * [`sl2fact`]: four-factor and Euclidean factorizations of `SL_2`.
//! * [`spfact`]: elimination, root systems of type C and the Levi
//!   absorption lifting the `SL_2` factorization to `Sp_2n`.
//! * [`expfact`]: nilpotent log/exp and grouping unitriangular factors into
//!   exponentials.
//! * [`obstruction`]: an `SL_2` matrix over `Q(i)[z,w]` with no continuous
//!   four-factor factorization, and the winding-number check behind it.
//! * [`cli`]: JSON schemas and the command line front end.

pub mod cli;
mod error;
pub mod expfact;
pub mod json;
pub mod matrix;
pub mod obstruction;
pub mod random;
pub mod ring;
pub mod selftest;
pub mod sl2fact;
pub mod spfact;
pub mod sympgen;

pub use error::{Error, Result};
pub use matrix::{Matrix, Side, SymplecticForm};
pub use ring::{Field, Poly, RatFn, Ring, Scalar};
