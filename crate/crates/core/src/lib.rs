//! Reflection-symmetry-protected topological index of translation-invariant
//! matrix product states.
//!
//! The pipeline runs `normalize → primitivity → invariant_state →
//! reflected_tuple → gauge_solve` and reads the ℤ₂ index off the transpose
//! symmetry of the gauge unitary in the eigenbasis of the invariant state.
//! The same sign is recovered from the bond vector through the swap sign and
//! through the modular conjugation of its Schmidt data.

pub mod config;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod modular;
pub mod mps;
pub mod random;
pub mod reflection;
pub mod scan;
pub mod status;
pub mod zoo;

pub use config::Config;
