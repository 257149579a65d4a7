//! Color-code lattices, gauge fixing between 2D and 3D color codes, and a
//! constant-depth stack-swap scheduler.

pub mod error;
pub mod gf2;
pub mod pauli;
pub mod tableau;
pub mod colex;
pub mod code;
pub mod matching;
pub mod decoder;
pub mod jump;
pub mod sim;
pub mod schedule;

pub use error::{Error, Result};
