//! Symmetry-reduced semidefinite refutation of quantum marginal spectra.
//!
//! Given prescribed spectra on a collection of subsystems, [`assembler`] builds
//! the block-diagonal SDP of level `k` (one block per tuple of Young diagrams),
//! [`refuter`] solves it and extracts a checkable incompatibility certificate,
//! and [`oracle`] holds dense brute-force counterparts used for testing.

pub mod assembler;
pub mod error;
pub mod experiments;
pub mod marginals;
pub mod oracle;
pub mod permrep;
pub mod refuter;
pub mod solver;

pub use error::{Error, Result};
