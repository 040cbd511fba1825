//! Elastic-band ("hidden measurement") sphere model for a spin-1/2 entity and
//! for two spheres coupled by a rigid rod in the singlet state.
//!
//! The crate is organised bottom-up:
//!
//! * [`operational`] holds the language of yes/no tests and the predicates for
//!   compatibility, separability and classicality of a pair of tests.
//! * [`sphere`] is the single-sphere model: states, density matrices, and the
//!   ε-parameterised elastic measurement.
//! * [`singlet`] couples two spheres with a rod and implements the sequential
//!   joint test, analytically and by Monte Carlo.
//! * [`analysis`] derives correlation functions, CHSH values and
//!   (ε, angle) classification scans.
//! * [`cli`] is the command line front end behind the `hmsim` binary.

pub mod analysis;
pub mod cli;
mod error;
pub mod operational;
pub mod singlet;
pub mod sphere;

pub use error::{Error, Result};
