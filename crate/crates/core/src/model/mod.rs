//! Model parameters, collective qubit basis and shared special functions.

pub mod basis;
pub mod params;
pub mod special;

pub use basis::{BellState, SxEigenstate, SX, SX_EIGENBASIS};
pub use params::{Advisory, ModelParams, BETA_WINDOW};
pub use special::{
    displaced_overlap, gaussian_weight, laguerre, ln_factorial, poisson_cutoff, poisson_weight, PoissonTable,
};
