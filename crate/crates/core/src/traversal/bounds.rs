//! Evaluated runtime bounds. Big-O constants are all taken as 1, so the
//! numbers are surrogates for the asymptotic statements, not predictions.

use alloc::format;
use alloc::string::String;

use super::TraversalCounters;
use crate::analysis::DatasetExtremes;
use crate::math;

/// Surrogate for the number of reference recursions after the last query
/// recursion: `max(min(N log2(delta_q / delta_r), N^2), 0)`.
pub fn theta_estimate(query: &DatasetExtremes, reference: &DatasetExtremes, n: usize) -> f64 {
    let n = n as f64;
    let v = (n * math::log2(query.delta / reference.delta)).min(n * n);
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Surrogate for the reference recursions before the first query
/// recursion: `min(N, log2(eta_r / eta_q) - 1)`, clamped at zero.
pub fn pre_recursion_estimate(query: &DatasetExtremes, reference: &DatasetExtremes, n: usize) -> f64 {
    let v = (n as f64).min(math::log2(reference.eta / query.eta) - 1.0);
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Which `|R*|` goes into the formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RStarPolicy {
    Measured,
    Supplied(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub c_r: f64,
    pub c_qr: Option<f64>,
    pub i_t_query: u64,
    /// `None` for monochromatic runs, where the term does not appear.
    pub theta: Option<f64>,
    pub measured_r_star: usize,
    /// Problem-specific `|R*|` bound, when one was supplied.
    pub theoretical_r_star: Option<f64>,
    /// The `|R*|` used in `formula_value`.
    pub r_star: f64,
    /// `c_r^4 |R*| chi psi (N + i_t + theta)` with `chi = psi = 1`.
    pub formula_value: f64,
    pub formula_text: String,
    pub measured_recursions: u64,
}

impl BoundReport {
    pub fn is_monochromatic(&self) -> bool {
        self.theta.is_none()
    }

    /// The formula re-evaluated with the other `|R*|`.
    pub fn formula_with(&self, r_star: f64) -> f64 {
        math::powf(self.c_r, 4.0) * r_star * (self.n as f64 + self.i_t_query as f64 + self.theta.unwrap_or(0.0))
    }
}

/// Evaluate the general runtime bound for a finished traversal. Pass
/// `theta = None` for monochromatic runs.
pub fn runtime_bound_report(
    counters: &TraversalCounters,
    n: usize,
    c_r: f64,
    i_t_query: u64,
    theta: Option<f64>,
    r_star: RStarPolicy,
) -> BoundReport {
    let measured = counters.max_reference_set_size;
    let (used, theoretical) = match r_star {
        RStarPolicy::Measured => (measured as f64, None),
        RStarPolicy::Supplied(v) => (v, Some(v)),
    };
    let mut report = BoundReport {
        n,
        c_r,
        c_qr: None,
        i_t_query,
        theta,
        measured_r_star: measured,
        theoretical_r_star: theoretical,
        r_star: used,
        formula_value: 0.0,
        formula_text: String::new(),
        measured_recursions: counters.total_recursions(),
    };
    report.formula_value = report.formula_with(used);
    report.formula_text = match theta {
        Some(t) => format!("{c_r}^4 * {used} * ({n} + {i_t_query} + {t}) = {}", report.formula_value),
        None => format!("{c_r}^4 * {used} * ({n} + {i_t_query}) = {}", report.formula_value),
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(eta: f64, delta: f64) -> DatasetExtremes {
        DatasetExtremes { eta, delta }
    }

    #[test]
    fn theta_cases() {
        assert_eq!(theta_estimate(&ext(5.0, 1.0), &ext(7.0, 1.0), 100), 0.0);
        assert_eq!(theta_estimate(&ext(5.0, 4.0), &ext(7.0, 1.0), 100), 200.0);
        assert_eq!(theta_estimate(&ext(5.0, 1.0), &ext(7.0, 4.0), 100), 0.0);
        assert_eq!(theta_estimate(&ext(5.0, 1e300), &ext(7.0, 1e-300), 3), 9.0);
    }

    #[test]
    fn pre_recursion_cases() {
        assert_eq!(pre_recursion_estimate(&ext(1.0, 0.1), &ext(1.0, 0.1), 50), 0.0);
        assert_eq!(pre_recursion_estimate(&ext(1.0, 0.1), &ext(8.0, 0.1), 50), 2.0);
        assert_eq!(pre_recursion_estimate(&ext(1.0, 0.1), &ext(1e30, 0.1), 50), 50.0);
    }

    #[test]
    fn formula_arithmetic() {
        let counters = TraversalCounters { max_reference_set_size: 1, ..Default::default() };
        let r = runtime_bound_report(&counters, 10, 2.0, 0, Some(0.0), RStarPolicy::Measured);
        assert_eq!(r.formula_value, 160.0);
        let m = runtime_bound_report(&counters, 10, 2.0, 0, None, RStarPolicy::Supplied(3.0));
        assert_eq!(m.formula_value, 480.0);
        assert!(m.is_monochromatic());
        assert!(!m.formula_text.contains('+') || m.formula_text.matches('+').count() == 1);
        assert_eq!(m.measured_r_star, 1);
    }
}
