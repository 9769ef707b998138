use std::io;

use thiserror::Error;

/// Errors produced by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operating-system entropy unavailable ({0}); supply an explicit seed with --seed <hex>")]
    EntropyUnavailable(String),

    #[error("unknown mechanism `{0}` (supported: ctr-drbg-256, test-counter)")]
    UnknownMechanism(String),

    #[error("mechanism {mechanism} requires a {expected}-bit seed, got {actual} bits")]
    SeedLength {
        mechanism: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("generator reached its reseed limit after {requests} requests; reseed or instantiate a new generator")]
    ReseedRequired { requests: u64 },

    #[error("bit stream too short: {required} bits required, {available} available")]
    StreamTooShort { required: u64, available: u64 },

    #[error("coordinate {value} outside the unit interval [0, 1)")]
    Domain { value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance too large: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
