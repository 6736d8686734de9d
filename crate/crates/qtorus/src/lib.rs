//! Computational library for the quantum (non-commutative) torus:
//! exact twisted-polynomial algebra, finite non-commutative Riesz
//! products, and numerical non-commutative L^p norms through
//! finite-dimensional clock/shift representations.

pub mod algebra;
pub mod error;
pub mod experiments;
pub mod reps;
pub mod riesz;
pub mod selftest;
pub mod theta;

pub use error::{Error, Result};
