//! Simulation toolkit for the universal-NOT experiment on spin pairs:
//! density-operator math, correlation measures, the real-amplitude
//! embedding that makes the anti-unitary flip physical, a pulse-level
//! trapped-ion model, and state tomography.

pub mod correlations;
pub mod embedding;
pub mod error;
pub mod optim;
pub mod qmath;
pub mod spinstates;
pub mod tomography;
pub mod trapsim;

pub use error::{Error, Result};
