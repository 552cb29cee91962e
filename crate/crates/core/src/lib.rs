//! Stationary Lissajous coherent states of the two-dimensional harmonic
//! oscillator with commensurate frequencies `w_x = q w`, `w_y = p w`.
//!
//! Natural units `m = w = hbar = 1` are used throughout.

pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};
pub mod classical;
pub mod fields;
pub mod verify;
