//! Pseudorandom point sets from a seeded DRBG and their exact star discrepancy.
//!
//! A [`drbg::Generator`] expands a seed into a bit stream, [`points`] cuts
//! the stream into `p`-bit coordinates, and [`stardisc`] computes the star
//! discrepancy of the result together with the box that attains it.
//! [`bounds`] evaluates the matching probabilistic bounds, [`inverse`]
//! finds how many points reach a target discrepancy, and [`harness`] runs
//! sweeps and writes CSV and SVG output.

pub mod bounds;
pub mod drbg;
pub mod error;
pub mod harness;
pub mod inverse;
pub mod points;
pub mod stardisc;

pub use crate::error::{Error, Result};
