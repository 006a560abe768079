//! Localized kernel methods on the circle, sphere, and general metric data.

pub mod error;
pub mod filter;
pub mod masc;
pub mod orthopoly;
pub mod quadrature;
pub mod sphere;
pub mod transfer;
pub mod trig;

pub use error::{Error, Result};
