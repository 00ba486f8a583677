//! Hybrid quantum-classical collective-variable pipeline for molecular
//! dynamics trajectories.
//!
//! Two pipeline tasks have quantum variants: squared inter-atomic distances
//! via a SWAP test on amplitude-encoded coordinates ([`swap`]), and the
//! largest eigenvalue of the block distance matrix via VQE ([`eigen`]). Both
//! run on the bundled statevector simulator ([`sim`]) and are checked
//! against their classical counterparts by [`difftest`].

pub mod cli;
pub mod difftest;
pub mod eigen;
pub mod encoding;
pub mod error;
pub mod pipeline;
pub mod sim;
pub mod swap;
mod util;

pub use error::{Error, Result};
