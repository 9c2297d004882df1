//! Dual spaces of the motion groups `R^N x| SO(N)`.

pub mod chains;
pub mod cli;
pub mod constants;
pub mod dualspace;
pub mod graph;
pub mod primal;
pub mod signatures;
pub mod verify;
