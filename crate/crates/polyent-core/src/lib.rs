//! Entanglement measures and weighted polygamy inequality checks for small
//! multipartite quantum states.
//!
//! The crate is organised around a dense complex-matrix kernel ([`matrix`],
//! [`state`]), the entanglement quantities built on top of it ([`measures`]),
//! a decomposition optimizer for assistance-type quantities ([`roof`]), the
//! inequality engine ([`polygamy`]) and a factory for the named state
//! families used in tests and reproductions ([`states`]).
//!
//! Everything is `no_std`-compatible (with `alloc`); IO, file formats and the
//! command line live in the companion `polyent` binary crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod error;
pub mod math;
pub mod matrix;
pub mod measures;
pub mod policy;
pub mod polygamy;
pub mod roof;
pub mod state;
pub mod states;

pub use error::Error;
pub use policy::Tolerances;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
