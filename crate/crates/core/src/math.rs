//! Float helpers that `core` does not provide.

/// Relative tolerance used by every strict-inequality invariant check.
pub const INVARIANT_RTOL: f64 = 1e-9;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// `2^s` for an integer scale.
#[inline]
pub fn pow2(s: i32) -> f64 {
    libm::ldexp(1.0, s)
}

/// `ceil(log2 x)`, snapping to the nearest integer when `log2 x` is within
/// `1e-9` of it so that exact powers of two survive rounding in `x`.
pub fn ceil_log2(x: f64) -> i32 {
    let y = libm::log2(x);
    let r = libm::round(y);
    if libm::fabs(y - r) < 1e-9 {
        r as i32
    } else {
        libm::ceil(y) as i32
    }
}

/// Largest float strictly below a positive finite `x`.
#[inline]
pub fn next_below(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() - 1)
}

/// `a > b` up to a relative tolerance of [`INVARIANT_RTOL`].
#[inline]
pub fn gt_tol(a: f64, b: f64) -> bool {
    a > b * (1.0 - INVARIANT_RTOL)
}

/// `a <= b` up to a relative tolerance of [`INVARIANT_RTOL`].
#[inline]
pub fn le_tol(a: f64, b: f64) -> bool {
    a <= b * (1.0 + INVARIANT_RTOL)
}
