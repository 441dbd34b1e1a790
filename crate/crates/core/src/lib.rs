//! Exact intersection numbers, strictly positive measures and epsilon-covers
//! for families in finite set algebras.

pub mod algebra;
pub mod commands;
pub mod error;
pub mod generators;
pub mod intersection;
pub mod kelley;
pub mod lp;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use rational::Rational;
