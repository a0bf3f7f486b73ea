//! The metric used throughout: Euclidean distance on `f64` coordinates.

use crate::{math, Error, Result};

/// Metric descriptor. Only Euclidean distance is implemented; the enum is the
/// hook other metrics would plug into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
}

impl Metric {
    /// Distance between two coordinate slices, checking dimensions.
    pub fn distance(self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        Ok(self.distance_unchecked(a, b))
    }

    #[inline]
    pub fn distance_unchecked(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => euclidean_unchecked(a, b),
        }
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    Metric::Euclidean.distance(a, b)
}

#[inline]
pub(crate) fn euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum();
    math::sqrt(sum)
}
