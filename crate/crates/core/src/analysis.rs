//! Brute-force analysis oracles: closed-ball counts, dataset extremes and the
//! exact expansion constant.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::{math, Error, Result};

/// `|{r in S : d(center, r) <= radius}|` by exhaustive scan.
pub fn ball_count(data: &Dataset, center: &[f64], radius: f64) -> usize {
    (0..data.len()).filter(|&i| data.distance_to(i, center) <= radius).count()
}

/// Largest and smallest nonzero pairwise distances of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetExtremes {
    /// Largest pairwise distance.
    pub eta: f64,
    /// Smallest nonzero pairwise distance.
    pub delta: f64,
}

impl DatasetExtremes {
    pub fn aspect_ratio(&self) -> f64 {
        self.eta / self.delta
    }
}

/// Exact extremes by an `O(N^2)` pairwise scan.
pub fn dataset_extremes(data: &Dataset) -> Result<DatasetExtremes> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    let mut eta = 0.0f64;
    let mut delta = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = data.distance(i, j);
            eta = eta.max(d);
            if d > 0.0 {
                delta = delta.min(d);
            }
        }
    }
    if !delta.is_finite() {
        return Err(Error::AllPointsIdentical);
    }
    Ok(DatasetExtremes { eta, delta })
}

/// Result of the exact expansion-constant computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport {
    /// `max(2, max_{p, D} |B(p, 2D)| / |B(p, D)|)`.
    pub c: f64,
    /// Center achieving the maximum ratio. When an extra point was supplied
    /// it has id `N` (one past the dataset).
    pub witness_point: usize,
    /// A radius `D > 0` achieving the maximum ratio.
    pub witness_radius: f64,
}

/// Exact expansion constant of `data` (or of `data ∪ {extra}`).
///
/// For a fixed center the ratio `|B(p, 2D)| / |B(p, D)|` is piecewise
/// constant in `D`. Between two consecutive distinct distances `a < b` the
/// denominator is fixed at `|{d <= a}|` and the numerator climbs to
/// `|{d < 2b}|` as `D` approaches `b` from below, so scanning consecutive
/// distance pairs visits every attainable value. `O(N^2 log N)`.
pub fn expansion_constant(data: &Dataset, extra: Option<&[f64]>) -> Result<ExpansionReport> {
    let augmented;
    let set = match extra {
        Some(p) => {
            augmented = data.with_point(p)?;
            &augmented
        }
        None => data,
    };
    let n = set.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    let mut best = ExpansionReport { c: 2.0, witness_point: 0, witness_radius: 0.0 };
    let mut best_ratio = 0.0f64;
    let mut dists: Vec<f64> = Vec::with_capacity(n);
    let mut any_nonzero = false;
    for p in 0..n {
        dists.clear();
        dists.extend((0..n).map(|j| set.distance(p, j)));
        dists.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < n {
            let a = dists[i];
            let mut j = i + 1;
            while j < n && dists[j] == a {
                j += 1;
            }
            if j == n {
                break;
            }
            any_nonzero = true;
            let b = dists[j];
            let inner = j; // |{d <= a}|
            let outer = dists.partition_point(|&x| x < 2.0 * b);
            let ratio = outer as f64 / inner as f64;
            if ratio > best_ratio {
                best_ratio = ratio;
                let reach = dists[outer - 1];
                let radius = a.max(reach / 2.0);
                let radius = if radius > 0.0 { radius } else { b / 2.0 };
                best = ExpansionReport { c: ratio.max(2.0), witness_point: p, witness_radius: radius };
            }
            i = j;
        }
    }
    if !any_nonzero {
        return Err(Error::AllPointsIdentical);
    }
    Ok(best)
}

/// Reference value `2^d` of the distributional expansion constant for a
/// uniform distribution on a `d`-ball. Reported next to the empirical value,
/// never asserted against it.
pub fn uniform_ball_reference(dim: usize) -> f64 {
    math::pow2(dim as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_dataset, GeneratorSpec};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec::Vec as StdVec;

    fn random_set(seed: u64, n: usize, dim: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: StdVec<f64> = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        Dataset::from_flat(dim, coords).unwrap()
    }

    /// Candidate radii: every distinct distance and the float just below
    /// it; together they hit every value the ratio can take.
    fn naive_expansion(data: &Dataset) -> f64 {
        let n = data.len();
        let mut c = 2.0f64;
        for p in 0..n {
            for q in 0..n {
                let d = data.distance(p, q);
                if d == 0.0 {
                    continue;
                }
                for radius in [d, crate::math::next_below(d)] {
                    let inner = ball_count(data, data.point(p), radius);
                    let outer = ball_count(data, data.point(p), 2.0 * radius);
                    c = c.max(outer as f64 / inner as f64);
                }
            }
        }
        c
    }

    #[test]
    fn ball_count_radius_zero_is_center_only() {
        let ds = random_set(1, 40, 3);
        assert_eq!(ball_count(&ds, ds.point(7), 0.0), 1);
    }

    #[test]
    fn ball_count_whole_set() {
        let ds = random_set(2, 40, 3);
        let ext = dataset_extremes(&ds).unwrap();
        assert_eq!(ball_count(&ds, ds.point(3), ext.eta), 40);
    }

    #[test]
    fn ball_count_matches_scan_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ds = random_set(3, 60, 2);
        for _ in 0..50 {
            let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r: f64 = rng.random_range(0.0..2.0);
            let mut scan = 0;
            for p in ds.points() {
                if ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= r {
                    scan += 1;
                }
            }
            assert_eq!(ball_count(&ds, &c, r), scan);
            assert!(ball_count(&ds, &c, r * 1.5) >= scan);
        }
    }

    #[test]
    fn extremes_on_a_line() {
        let ds = Dataset::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
        let e = dataset_extremes(&ds).unwrap();
        assert_eq!((e.eta, e.delta), (3.0, 1.0));
        assert_eq!(e.aspect_ratio(), 3.0);
    }

    #[test]
    fn extremes_scale_homogeneously() {
        let ds = Dataset::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
        let e = dataset_extremes(&ds.scaled(2.5).unwrap()).unwrap();
        assert_eq!((e.eta, e.delta), (7.5, 2.5));
    }

    #[test]
    fn extremes_match_pairwise_loop() {
        let ds = random_set(4, 50, 4);
        let e = dataset_extremes(&ds).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..50 {
            for j in 0..50 {
                if i != j {
                    let d: f64 = ds.point(i).iter().zip(ds.point(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        assert!((e.eta - hi).abs() <= 1e-12 * hi);
        assert!((e.delta - lo).abs() <= 1e-12 * lo);
    }

    #[test]
    fn extremes_errors() {
        assert_eq!(
            dataset_extremes(&Dataset::from_rows(&[[1.0]]).unwrap()),
            Err(Error::TooFewPoints { needed: 2, found: 1 })
        );
        assert_eq!(
            dataset_extremes(&Dataset::from_rows(&[[1.0], [1.0]]).unwrap()),
            Err(Error::AllPointsIdentical)
        );
    }

    #[test]
    fn expansion_of_two_points_is_two() {
        let ds = Dataset::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(expansion_constant(&ds, None).unwrap().c, 2.0);
    }

    #[test]
    fn expansion_single_point_errors() {
        let ds = Dataset::from_rows(&[[0.0]]).unwrap();
        assert!(expansion_constant(&ds, None).is_err());
    }

    #[test]
    fn far_outlier_drives_expansion_to_set_size() {
        // 30 points in a tiny ball and one outlier far away: the ball around
        // the outlier jumps from {outlier} to everything.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rows: StdVec<StdVec<f64>> = (0..30)
            .map(|_| vec![rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3)])
            .collect();
        rows.push(vec![1000.0, 0.0]);
        let ds = Dataset::from_rows(&rows).unwrap();
        let rep = expansion_constant(&ds, None).unwrap();
        assert_eq!(rep.c, 31.0);
        assert_eq!(rep.witness_point, 30);
        assert_eq!(naive_expansion(&ds), 31.0);
    }

    #[test]
    fn expansion_matches_naive_candidate_scan() {
        for seed in 0..8 {
            let ds = random_set(100 + seed, 25, 1 + (seed as usize % 3));
            let rep = expansion_constant(&ds, None).unwrap();
            assert_eq!(rep.c, naive_expansion(&ds), "seed {seed}");
        }
    }

    #[test]
    fn witness_achieves_reported_ratio() {
        let ds = random_set(77, 80, 2);
        let rep = expansion_constant(&ds, None).unwrap();
        let p = ds.point(rep.witness_point);
        let inner = ball_count(&ds, p, rep.witness_radius);
        let outer = ball_count(&ds, p, 2.0 * rep.witness_radius);
        assert_eq!((outer as f64 / inner as f64).max(2.0), rep.c);
    }

    #[test]
    fn expansion_bound_holds_exhaustively() {
        let ds = random_set(12, 120, 3);
        let c = expansion_constant(&ds, None).unwrap().c;
        assert!(c >= 2.0);
        for p in 0..ds.len() {
            for q in 0..ds.len() {
                let d = ds.distance(p, q);
                if d == 0.0 {
                    continue;
                }
                for radius in [d, crate::math::next_below(d), d / 2.0] {
                    let inner = ball_count(&ds, ds.point(p), radius) as f64;
                    let outer = ball_count(&ds, ds.point(p), 2.0 * radius) as f64;
                    assert!(outer <= c * inner);
                }
            }
        }
    }

    #[test]
    fn augmented_expansion_includes_extra_point() {
        let ds = Dataset::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let rep = expansion_constant(&ds, Some(&[100.0])).unwrap();
        let explicit = Dataset::from_rows(&[[0.0], [1.0], [2.0], [100.0]]).unwrap();
        assert_eq!(rep.c, expansion_constant(&explicit, None).unwrap().c);
        assert_eq!(rep.witness_point, 3);
    }

    #[test]
    fn uniform_ball_report_against_two_to_the_d() {
        for dim in [1usize, 2, 3] {
            let ds = generate_dataset(&GeneratorSpec::UniformBall { n: 300, dim }, 1).unwrap();
            let rep = expansion_constant(&ds, None).unwrap();
            std::println!(
                "uniform-ball d={dim} N=300: c = {:.2}, distributional reference 2^d = {}",
                rep.c,
                uniform_ball_reference(dim)
            );
            assert!(rep.c >= 2.0);
        }
    }
}
