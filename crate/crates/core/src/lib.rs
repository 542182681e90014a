//! Weighted Bergman and tent space machinery on a discretized unit disc.

pub mod analytic;
pub mod atomic;
pub mod carleson;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod maximal;
pub mod measure;
pub mod quadrature;
pub mod tent;
pub mod weights;

pub use error::{LabError, Result};
