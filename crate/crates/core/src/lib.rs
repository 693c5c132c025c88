//! Two inter-coupled qubits ultra-strongly coupled to a quantum oscillator,
//! treated in the adiabatic approximation.
//!
//! The crate covers the per-photon-number block spectrum, block and
//! coherent-field dynamics, the collapse/revival envelope of the transition
//! probability out of the Bell state `|I_0>`, a parameter search for regimes
//! that preserve `|I_0>`, and an exact truncated-Fock-space engine used to
//! validate all of it.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod oracle;
pub mod revival;
pub mod search;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{BellState, ModelParams, SxEigenstate};
pub use spectrum::{block_spectrum, BlockSpectrum};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
