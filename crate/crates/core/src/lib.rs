pub mod analysis;
pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod mbl;
pub mod meanfield;
pub mod noise;
pub mod seeds;
pub mod units;

pub use error::{Error, Result};
