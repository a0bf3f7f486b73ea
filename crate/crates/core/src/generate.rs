//! Deterministic synthetic dataset generators.
//!
//! Specs have a compact string form used on the command line, e.g.
//! `uniform-ball:N=1000,d=5` or `outlier-chain:N=100,d=2,num_outliers=3,spacing_factor=10`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::{math, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `n` points uniform in the unit `dim`-ball.
    UniformBall { n: usize, dim: usize },
    /// `n` points from `k` unit-variance isotropic Gaussians whose centers are
    /// uniform in the radius-10 ball.
    GaussianMixture { n: usize, dim: usize, k: usize },
    /// The first `n` points of the integer lattice with side `ceil(n^(1/dim))`,
    /// first coordinate varying fastest.
    Grid { n: usize, dim: usize },
    /// `n - num_outliers` points in the unit ball plus outliers on the first
    /// axis at distances `spacing^1, spacing^2, ...` from the origin.
    OutlierChain { n: usize, dim: usize, num_outliers: usize, spacing_factor: f64 },
}

impl GeneratorSpec {
    pub fn len(&self) -> usize {
        match *self {
            GeneratorSpec::UniformBall { n, .. }
            | GeneratorSpec::GaussianMixture { n, .. }
            | GeneratorSpec::Grid { n, .. }
            | GeneratorSpec::OutlierChain { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match *self {
            GeneratorSpec::UniformBall { dim, .. }
            | GeneratorSpec::GaussianMixture { dim, .. }
            | GeneratorSpec::Grid { dim, .. }
            | GeneratorSpec::OutlierChain { dim, .. } => dim,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidGenerator(msg.to_string()));
        if self.is_empty() {
            return bad("N must be positive");
        }
        if self.dim() == 0 {
            return bad("d must be positive");
        }
        match *self {
            GeneratorSpec::GaussianMixture { k: 0, .. } => bad("k must be positive"),
            GeneratorSpec::OutlierChain { n, num_outliers, spacing_factor, .. } => {
                if num_outliers >= n {
                    bad("num_outliers must be smaller than N")
                } else if !(spacing_factor > 1.0 && spacing_factor.is_finite()) {
                    bad("spacing_factor must be a finite value above 1")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::UniformBall { n, dim } => write!(f, "uniform-ball:N={n},d={dim}"),
            GeneratorSpec::GaussianMixture { n, dim, k } => {
                write!(f, "gaussian-mixture:N={n},d={dim},k={k}")
            }
            GeneratorSpec::Grid { n, dim } => write!(f, "grid:N={n},d={dim}"),
            GeneratorSpec::OutlierChain { n, dim, num_outliers, spacing_factor } => write!(
                f,
                "outlier-chain:N={n},d={dim},num_outliers={num_outliers},spacing_factor={spacing_factor}"
            ),
        }
    }
}

struct Params<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn parse(body: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidGenerator(format!("expected key=value, got `{item}`")))?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { pairs })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let pos = self
            .pairs
            .iter()
            .position(|(k, _)| *k == key)
            .ok_or_else(|| Error::InvalidGenerator(format!("missing parameter `{key}`")))?;
        let (_, v) = self.pairs.remove(pos);
        v.parse()
            .map_err(|_| Error::InvalidGenerator(format!("cannot parse `{key}={v}`")))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(Error::InvalidGenerator(format!("unknown parameter `{k}`"))),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let mut p = Params::parse(body)?;
        let spec = match name.trim() {
            "uniform-ball" => GeneratorSpec::UniformBall { n: p.take("N")?, dim: p.take("d")? },
            "gaussian-mixture" => {
                GeneratorSpec::GaussianMixture { n: p.take("N")?, dim: p.take("d")?, k: p.take("k")? }
            }
            "grid" => GeneratorSpec::Grid { n: p.take("N")?, dim: p.take("d")? },
            "outlier-chain" => GeneratorSpec::OutlierChain {
                n: p.take("N")?,
                dim: p.take("d")?,
                num_outliers: p.take("num_outliers")?,
                spacing_factor: p.take("spacing_factor")?,
            },
            other => return Err(Error::InvalidGenerator(format!("unknown generator `{other}`"))),
        };
        p.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

fn unit_ball_point(rng: &mut ChaCha8Rng, dim: usize, out: &mut Vec<f64>) {
    let start = out.len();
    let mut norm2 = 0.0;
    loop {
        for _ in 0..dim {
            let g: f64 = StandardNormal.sample(rng);
            norm2 += g * g;
            out.push(g);
        }
        if norm2 > 0.0 {
            break;
        }
        out.truncate(start);
    }
    let u: f64 = rng.random();
    let scale = math::powf(u, 1.0 / dim as f64) / math::sqrt(norm2);
    out[start..].iter_mut().for_each(|c| *c *= scale);
}

/// Generate the dataset described by `spec`. The output is a pure function
/// of `(spec, seed)`.
pub fn generate_dataset(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.dim();
    let mut coords = Vec::with_capacity(spec.len() * dim);
    match *spec {
        GeneratorSpec::UniformBall { n, .. } => {
            for _ in 0..n {
                unit_ball_point(&mut rng, dim, &mut coords);
            }
        }
        GeneratorSpec::GaussianMixture { n, k, .. } => {
            let mut centers = Vec::with_capacity(k * dim);
            for _ in 0..k {
                unit_ball_point(&mut rng, dim, &mut centers);
            }
            centers.iter_mut().for_each(|c| *c *= 10.0);
            for _ in 0..n {
                let which = rng.random_range(0..k);
                for j in 0..dim {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    coords.push(centers[which * dim + j] + g);
                }
            }
        }
        GeneratorSpec::Grid { n, .. } => {
            let mut side = 1usize;
            while side.checked_pow(dim as u32).is_some_and(|v| v < n) {
                side += 1;
            }
            for i in 0..n {
                let mut rest = i;
                for _ in 0..dim {
                    coords.push((rest % side) as f64);
                    rest /= side;
                }
            }
        }
        GeneratorSpec::OutlierChain { n, num_outliers, spacing_factor, .. } => {
            for _ in 0..(n - num_outliers) {
                unit_ball_point(&mut rng, dim, &mut coords);
            }
            let mut dist = 1.0;
            for _ in 0..num_outliers {
                dist *= spacing_factor;
                coords.push(dist);
                coords.extend(core::iter::repeat_n(0.0, dim - 1));
            }
        }
    }
    Dataset::from_flat(dim, coords)
}

/// Parse-and-generate convenience used by the CLI.
pub fn generate_from_str(spec: &str, seed: u64) -> Result<Dataset> {
    generate_dataset(&spec.parse()?, seed)
}

impl GeneratorSpec {
    pub fn to_spec_string(&self) -> String {
        self.to_string()
    }
}
