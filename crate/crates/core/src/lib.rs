#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canonical;
pub mod config;
pub mod error;
pub mod graph;
pub mod instance;
pub mod mechanism;
pub mod numerics;
pub mod solver;
pub mod verify;

pub use error::Error;
pub use numerics::{AlgebraicValue, Rational, Sign};
