use alloc::string::String;
use core::fmt;

/// Errors raised by dataset handling, tree construction and the drivers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    NonFinite { point: usize, coordinate: usize },
    EmptyDataset,
    TooFewPoints { needed: usize, found: usize },
    AllPointsIdentical,
    DuplicatePoints { first: usize, second: usize },
    InvalidGenerator(String),
    InvalidKernel(String),
    OutOfDomain { what: &'static str, value: f64 },
    InvalidRange { lower: f64, upper: f64 },
    InvalidOption(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { point, coordinate } => {
                write!(f, "point {point} has a non-finite coordinate at index {coordinate}")
            }
            Error::EmptyDataset => f.write_str("dataset is empty"),
            Error::TooFewPoints { needed, found } => {
                write!(f, "operation needs at least {needed} points, dataset has {found}")
            }
            Error::AllPointsIdentical => f.write_str("all points are identical"),
            Error::DuplicatePoints { first, second } => {
                write!(f, "points {first} and {second} are identical (duplicate policy is reject)")
            }
            Error::InvalidGenerator(msg) => write!(f, "invalid generator spec: {msg}"),
            Error::InvalidKernel(msg) => write!(f, "invalid kernel spec: {msg}"),
            Error::OutOfDomain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::InvalidRange { lower, upper } => {
                write!(f, "invalid range [{lower}, {upper}]: lower bound exceeds upper bound")
            }
            Error::InvalidOption(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
