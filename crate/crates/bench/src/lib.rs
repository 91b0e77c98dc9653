//! Golden vectors, verification, batch benchmarking and report tables for
//! the `montsim` multiplier models.

pub mod bench;
pub mod redc;
pub mod reference;
pub mod report;
pub mod vectors;
pub mod verify;
