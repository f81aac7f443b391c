//! Exact construction and verification of p-adic L-functions of elliptic
//! modular eigenforms.
//!
//! The crate builds, entirely in exact finite-precision arithmetic:
//!
//! * modular symbols of weight k >= 2 in the Manin presentation, with Hecke
//!   operators, eigen-symbols, p-stabilization and algebraic special values
//!   ([`modsym`]);
//! * the cyclotomic Iwasawa algebra with Weierstrass preparation, mu/lambda
//!   invariants and characteristic ideals of presented modules ([`iwasawa`]);
//! * the spaces of power series of logarithmic order h with their congruence
//!   grids, gluing and uniqueness algorithms ([`distributions`]);
//! * one-variable p-adic L-functions from Mazur-Tate data in both the
//!   ordinary and the finite-slope case, with symbolic interpolation checks
//!   ([`plfn`]);
//! * weight-direction gluing of per-weight L-functions over a p-adic disc
//!   and an ordinary projector ([`family`]).
//!
//! Data-parallel inner loops run on rayon when the default `parallel`
//! feature is enabled and fall back to sequential iteration without it; the
//! results are identical either way.

pub mod distributions;
pub mod family;
pub mod formats;
pub mod iwasawa;
pub mod modsym;
pub mod oracles;
pub mod padic;
pub(crate) mod par;
pub mod plfn;

pub use padic::{PadicError, PrecisionProfile};
