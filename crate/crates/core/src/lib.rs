//! Exact symbolic and numerical analysis of locally integrable involutive structures.

pub mod algebra;
pub mod approx;
pub mod autosys;
pub mod bundle;
pub mod cli;
pub mod fbi;
pub mod hull;
pub mod loci;
pub mod structure;

pub use error::Error;

mod error;
