//! Numerical tools for Blaschke products in the unit disc: zero sequences,
//! stable evaluation of derivatives, Hardy and weighted Bergman integral
//! means, growth-exponent fitting and model-space experiments.

pub mod asymptotics;
pub mod error;
pub mod eval;
pub mod jet;
pub mod kahan;
pub mod means;
pub mod modelspace;
pub mod quad;
pub mod report;
pub mod sequences;
pub mod weights;

pub use error::{Error, Result};
