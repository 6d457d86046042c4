//! Linear graph neural networks over graphon random graphs.
//!
//! This crate implements the full pipeline for moment-based link prediction
//! on graphs sampled from a graphon: graphon families with exact spectral
//! oracles ([`graphon`]), the linear message-passing architecture and its
//! path-moment estimators ([`embed`]), brute-force empirical-moment
//! references ([`moments`]), box-constrained and partial-least-squares edge
//! regression ([`regress`]), an untrained GCN baseline with a collapse
//! diagnostic ([`gcn`]), and train/test split protocols plus ranking metrics
//! ([`eval`]).
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for float math on targets without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("lggnn-core requires either the `std` or the `libm` feature");

pub mod embed;
pub mod error;
pub mod eval;
pub mod gcn;
pub mod graphon;
pub mod linalg;
pub mod moments;
pub mod regress;
pub mod rng;

mod math;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
