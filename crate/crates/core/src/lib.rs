//! Toeplitz determinants of arc-indicator symbols, computed exactly at high
//! precision and compared with their large-n expansions from topological
//! recursion on the associated spectral curves.

pub mod asymptotics;
pub mod curves;
pub mod error;
pub mod gas_mc;
pub mod harness;
pub mod numerics;
pub mod symbol;
pub mod toeplitz;
pub mod toprec;

pub use error::{ArcError, Result};
pub use rug::{Float, Integer, Rational};
