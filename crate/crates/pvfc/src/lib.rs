//! Averaged-model simulation of a grid-connected hybrid photovoltaic /
//! fuel-cell plant, with LMI-based controller synthesis and a scenario
//! harness for energy-management and low-voltage ride-through studies.

pub mod control;
pub mod ems;
pub mod error;
pub mod harness;
pub mod lmi;
pub mod numerics;
pub mod plant;
pub mod signal;

pub use error::{Error, Result};
