//! Exclusion processes with a moving wall: exact simulation, couplings and
//! verification of finite-time identities.

pub mod asymptotics;
pub mod clockfield;
pub mod dynamics;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod identities;
pub mod multispecies;
pub mod stats;

pub use clockfield::ClockField;
pub use error::{Error, Result};
