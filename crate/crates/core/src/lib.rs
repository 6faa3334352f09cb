//! Total visibility in Boolean models of obstacles: exact shadow geometry,
//! certified coverage tests, model sampling, asymptotic formulas and the
//! experiment drivers built on them.

mod error;
pub mod numeric;
pub mod rng;

pub mod asymptotics;
pub mod coverage;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod visibility;

pub use error::{Error, Result};
