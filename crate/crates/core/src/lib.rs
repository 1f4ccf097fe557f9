//! Symmetric deformed binomial distributions built from generating functions
//! `N(t) = exp F(t)`, computed in exact rational arithmetic.

pub mod cli;
pub mod coherent;
pub mod dist;
pub mod error;
pub mod model;
pub mod numeric;
pub mod qpoly;
pub mod series;
pub mod structure;

pub use error::{Error, Result};
