//! Immutable point collections.

use alloc::vec::Vec;

use crate::metric::{euclidean_unchecked, Metric};
use crate::{Error, Result};

/// How exact duplicate points are treated.
///
/// A separation-valid cover tree cannot hold two identical points, so the
/// default rejects them at build time. `Weighted` collapses duplicates into
/// unique points carrying an integer multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Reject,
    Weighted,
}

/// An `N x d` collection of finite points. Point ids are row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    weights: Option<Vec<u64>>,
    metric: Metric,
}

impl Dataset {
    /// Build from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidOption("dataset dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() % dim });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { point: pos / dim, coordinate: pos % dim });
        }
        Ok(Self { dim, coords, weights: None, metric: Metric::Euclidean })
    }

    /// Build from rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyDataset)?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(dim, coords)
    }

    /// Collapse exact duplicates into weighted unique points.
    ///
    /// Returns the collapsed dataset and, for every input row, the id of the
    /// unique point it was merged into. Unique points keep first-occurrence
    /// order.
    pub fn collapse_duplicates(&self) -> (Dataset, Vec<usize>) {
        let n = self.len();
        let order = self.lexicographic_order();
        let mut mapping = alloc::vec![usize::MAX; n];
        // representative (first occurrence) for every row
        let mut rep = alloc::vec![0usize; n];
        let mut i = 0;
        while i < order.len() {
            let mut j = i + 1;
            while j < order.len() && self.point(order[j]) == self.point(order[i]) {
                j += 1;
            }
            let first = order[i..j].iter().copied().min().unwrap();
            for &k in &order[i..j] {
                rep[k] = first;
            }
            i = j;
        }
        let mut coords = Vec::new();
        let mut weights: Vec<u64> = Vec::new();
        for k in 0..n {
            if rep[k] == k {
                mapping[k] = weights.len();
                coords.extend_from_slice(self.point(k));
                weights.push(self.weight(k));
            } else {
                let id = mapping[rep[k]];
                mapping[k] = id;
                weights[id] += self.weight(k);
            }
        }
        let collapsed = Dataset { dim: self.dim, coords, weights: Some(weights), metric: self.metric };
        (collapsed, mapping)
    }

    /// Build from rows with the given duplicate policy. Under `Reject` the
    /// rows are kept as-is (duplicates are reported when a tree is built);
    /// under `Weighted` duplicates are collapsed.
    pub fn from_rows_with_policy<R: AsRef<[f64]>>(rows: &[R], policy: DuplicatePolicy) -> Result<Self> {
        let ds = Self::from_rows(rows)?;
        Ok(match policy {
            DuplicatePolicy::Reject => ds,
            DuplicatePolicy::Weighted => ds.collapse_duplicates().0,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn point(&self, id: usize) -> &[f64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Multiplicity of point `id` (1 unless duplicates were collapsed).
    #[inline]
    pub fn weight(&self, id: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[id])
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.as_ref().map_or(self.len() as u64, |w| w.iter().sum())
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        euclidean_unchecked(self.point(a), self.point(b))
    }

    /// Distance from point `id` to an arbitrary coordinate tuple.
    #[inline]
    pub fn distance_to(&self, id: usize, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.dim);
        euclidean_unchecked(self.point(id), p)
    }

    /// Every coordinate multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Dataset> {
        let mut out = self.clone();
        out.coords.iter_mut().for_each(|c| *c *= alpha);
        if let Some(pos) = out.coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { point: pos / self.dim, coordinate: pos % self.dim });
        }
        Ok(out)
    }

    /// Copy of this dataset with one extra (unit-weight) point appended.
    pub fn with_point(&self, extra: &[f64]) -> Result<Dataset> {
        if extra.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: extra.len() });
        }
        if let Some(c) = extra.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { point: self.len(), coordinate: c });
        }
        let mut out = self.clone();
        out.coords.extend_from_slice(extra);
        if let Some(w) = out.weights.as_mut() {
            w.push(1);
        }
        Ok(out)
    }

    /// First pair of coordinate-identical points, ids in ascending order.
    pub fn find_duplicate(&self) -> Option<(usize, usize)> {
        let order = self.lexicographic_order();
        order
            .windows(2)
            .filter(|w| self.point(w[0]) == self.point(w[1]))
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .min()
    }

    fn lexicographic_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            // total_cmp would separate -0.0 from 0.0, partial_cmp treats them equal
            self.point(a)
                .iter()
                .zip(self.point(b))
                .map(|(x, y)| x.partial_cmp(y).unwrap())
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
    }
}
