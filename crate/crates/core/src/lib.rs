//! Numerical experiments on curve counting and Dehn-twist lattices in the
//! Teichmüller space of the once-punctured torus.

pub mod comb;
pub mod curves;
pub mod error;
pub mod harness;
pub mod hyp;
pub mod lattice;
pub mod laws;
pub mod oracle;
pub mod stats;
pub mod torus;

pub use error::{Error, Result};
