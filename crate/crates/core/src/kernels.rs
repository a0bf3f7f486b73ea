//! Shift-invariant kernels that are concave on `[0, h]` and convex beyond.
//!
//! All three families have `K(0) = 1`.

use alloc::format;
use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `exp(-d^2 / (2 sigma^2))`
    Gaussian,
    /// `exp(-d / sigma)`
    Exponential,
    /// `1 - (d/b)^2` on `[0, b]`, zero beyond.
    Epanechnikov,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Exponential => "exponential",
            KernelFamily::Epanechnikov => "epanechnikov",
        }
    }

    fn bandwidth_key(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "b",
            _ => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    bandwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: f64,
    pub derivative: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundExponents {
    /// `8 + ceil(log2 zeta)`, the exponent of the runtime theorem.
    pub theorem: f64,
    /// `4 + log2 zeta`, the form matching the worked examples.
    pub illustrative: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidKernel(format!("bandwidth must be positive and finite, got {bandwidth}")));
        }
        Ok(Self { family, bandwidth })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, sigma)
    }

    pub fn exponential(sigma: f64) -> Result<Self> {
        Self::new(KernelFamily::Exponential, sigma)
    }

    pub fn epanechnikov(b: f64) -> Result<Self> {
        Self::new(KernelFamily::Epanechnikov, b)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `K(d)` without domain checks; negative `d` is treated as `|d|`.
    #[inline]
    pub fn value(&self, d: f64) -> f64 {
        let d = math::abs(d);
        let w = self.bandwidth;
        match self.family {
            KernelFamily::Gaussian => math::exp(-(d * d) / (2.0 * w * w)),
            KernelFamily::Exponential => math::exp(-d / w),
            KernelFamily::Epanechnikov => {
                let t = d / w;
                if t >= 1.0 {
                    0.0
                } else {
                    1.0 - t * t
                }
            }
        }
    }

    /// `K'(d)`; one-sided at the kinks (`d = 0` for the exponential, `d = b`
    /// for Epanechnikov, where the left derivative is used).
    pub fn derivative(&self, d: f64) -> f64 {
        let w = self.bandwidth;
        match self.family {
            KernelFamily::Gaussian => -d / (w * w) * self.value(d),
            KernelFamily::Exponential => -self.value(d) / w,
            KernelFamily::Epanechnikov => {
                if d > w {
                    0.0
                } else {
                    -2.0 * d / (w * w)
                }
            }
        }
    }

    /// Inflection distance: `|K'|` peaks here.
    pub fn h(&self) -> f64 {
        match self.family {
            KernelFamily::Gaussian | KernelFamily::Epanechnikov => self.bandwidth,
            KernelFamily::Exponential => 0.0,
        }
    }

    pub fn eval(&self, d: f64) -> Result<KernelEval> {
        if !(d >= 0.0) {
            return Err(Error::OutOfDomain { what: "kernel distance", value: d });
        }
        Ok(KernelEval { value: self.value(d), derivative: self.derivative(d), h: self.h() })
    }

    /// Distance at which the kernel equals `v`, for `v` in `(0, K(0)]`.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::OutOfDomain { what: "kernel value", value: v });
        }
        let w = self.bandwidth;
        Ok(match self.family {
            KernelFamily::Gaussian => w * math::sqrt(-2.0 * math::ln(v)),
            KernelFamily::Exponential => -w * math::ln(v),
            KernelFamily::Epanechnikov => w * math::sqrt(1.0 - v),
        })
    }

    /// `zeta = -K'(h) K^-1(eps) / eps`.
    pub fn zeta(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::OutOfDomain { what: "epsilon", value: epsilon });
        }
        Ok(-self.derivative(self.h()) * self.inverse(epsilon)? / epsilon)
    }

    pub fn bound_exponents(&self, epsilon: f64) -> Result<BoundExponents> {
        let z = self.zeta(epsilon)?;
        Ok(BoundExponents {
            theorem: 8.0 + f64::from(math::ceil_log2(z)),
            illustrative: 4.0 + math::log2(z),
        })
    }
}

pub fn kernel_eval(k: &Kernel, d: f64) -> Result<KernelEval> {
    k.eval(d)
}

pub fn kernel_inverse(k: &Kernel, v: f64) -> Result<f64> {
    k.inverse(v)
}

pub fn zeta(k: &Kernel, epsilon: f64) -> Result<f64> {
    k.zeta(epsilon)
}

pub fn kde_bound_exponents(k: &Kernel, epsilon: f64) -> Result<BoundExponents> {
    k.bound_exponents(epsilon)
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}={}", self.family.name(), self.family.bandwidth_key(), self.bandwidth)
    }
}

/// Parses `gaussian:sigma=1.0`, `exponential:sigma=0.5`, `epanechnikov:b=2`.
/// `bandwidth=` is accepted for every family.
impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let family = match name.trim() {
            "gaussian" => KernelFamily::Gaussian,
            "exponential" | "laplacian" => KernelFamily::Exponential,
            "epanechnikov" => KernelFamily::Epanechnikov,
            other => return Err(Error::InvalidKernel(format!("unknown kernel family '{other}'"))),
        };
        let mut bandwidth = None;
        for kv in params.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidKernel(format!("expected key=value, got '{kv}'")))?;
            let k = k.trim();
            if k != family.bandwidth_key() && k != "bandwidth" {
                return Err(Error::InvalidKernel(format!("unknown parameter '{k}' for {}", family.name())));
            }
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidKernel(format!("bad number '{}'", v.trim())))?;
            bandwidth = Some(v);
        }
        let bandwidth = bandwidth.ok_or_else(|| {
            Error::InvalidKernel(format!("{} needs {}=<value>", family.name(), family.bandwidth_key()))
        })?;
        Kernel::new(family, bandwidth)
    }
}
