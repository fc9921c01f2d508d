//! No-arbitrage analytics for credit-default-swap term structures.

pub mod annuity;
pub mod aoa;
pub mod curve;
pub mod error;
pub mod fixtures;
pub mod irs;
pub mod numerics;
pub mod scanner;
pub mod strategy;
pub mod survival;

pub use error::{Error, Result};
