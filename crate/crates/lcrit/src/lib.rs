//! Numerical toolkit for entire Dirichlet L-functions in the critical strip.
//!
//! The crate evaluates L(s, chi) and its completion for primitive characters,
//! locates critical-line zeros, computes the argument iterates S_{n,sigma},
//! builds band-limited extremal majorants/minorants of the associated target
//! functions from their explicit Fourier transforms, balances the
//! Guinand-Weil explicit formula, and tabulates the uniform bound envelopes
//! with their H-series constants.

pub mod bounds;
pub mod character;
pub mod error;
pub mod explicit_formula;
pub mod extremal;
pub mod hurwitz;
pub mod iterates;
pub mod lfunc;
pub mod quad;
pub mod sieve;
pub mod special;
pub mod verify;
pub mod zeros;

pub use character::PrimitiveCharacter;
pub use error::{Error, Result};
