//! Exact symbolic Poisson calculus on manifolds and their tangent bundles.

#![allow(clippy::needless_range_loop)]

pub mod brackets;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod lifts;
pub mod poisson;
pub mod ring;

pub use error::{Error, Result};
