//! SU(2) representations of two-bridge and torus knot groups.
//!
//! The crate tracks curves of representations, evaluates the winding-number
//! pairing between peripheral elements and loops of representations, and
//! builds explicit representations of Dehn-filled knot groups.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod pairing;
pub mod quat;
pub mod reproduce;
pub mod torus;
pub mod two_bridge;
pub mod words;

pub use error::{Error, Result};
