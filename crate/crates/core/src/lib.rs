pub mod dsl;
pub mod error;
pub mod jet;
pub mod chart;
pub mod invariants;
pub mod focal;
pub mod oracle;
pub mod export;
pub mod analysis;
pub mod verify;
pub mod cli;
mod vec3;

pub use error::{Error, Result};
