//! Synthetic point clouds: random distributions, structured arrays and sampled
//! trajectories of chaotic flows.
//!
//! Every random generator is a pure function of its parameters and a `u64` seed.

mod ode;

pub use ode::{integrate, trajectory, OdeSpec, OdeSystem, REALIZATION_JITTER};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered, finite list of points of a common dimension, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub label: String,
    pub seed: Option<u64>,
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn from_flat(label: impl Into<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "point dimension must be >= 1".into(),
            ));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(PointCloud {
            label: label.into(),
            seed: None,
            dim,
            coords,
        })
    }

    pub fn from_points(label: impl Into<String>, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::from_flat(label, dim, points.into_iter().flatten().collect())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Copy with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PointCloud {
            coords: self.coords.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }

    /// Number of pairwise distinct points (exact coordinate equality).
    pub fn distinct_count(&self) -> usize {
        let mut keys: Vec<Vec<u64>> = self
            .points()
            .map(|p| p.iter().map(|c| canonical_bits(*c)).collect())
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

fn canonical_bits(c: f64) -> u64 {
    // -0.0 and 0.0 are the same location
    if c == 0.0 {
        0
    } else {
        c.to_bits()
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn require_points(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("point count must be >= 1".into()));
    }
    Ok(())
}

fn sample_cloud<D: Distribution<f64>>(
    label: &str,
    n: usize,
    dist: D,
    seed: u64,
) -> Result<PointCloud> {
    let coords = dist.sample_iter(rng_for(seed)).take(3 * n).collect();
    Ok(PointCloud::from_flat(label, 3, coords)?.with_seed(seed))
}

/// `n` points with i.i.d. `N(mu, sigma^2)` coordinates.
pub fn gen_normal(n: usize, mu: f64, sigma: f64, seed: u64) -> Result<PointCloud> {
    require_points(n)?;
    if !(sigma > 0.0 && sigma.is_finite()) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "normal needs finite mu and sigma > 0, got mu={mu} sigma={sigma}"
        )));
    }
    let dist = Normal::new(mu, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    sample_cloud("normal", n, dist, seed)
}

/// `n` points with i.i.d. Poisson(`lambda`) integer coordinates.
pub fn gen_poisson(n: usize, lambda: f64, seed: u64) -> Result<PointCloud> {
    require_points(n)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "poisson rate must be > 0, got {lambda}"
        )));
    }
    let dist = Poisson::new(lambda).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    sample_cloud("poisson", n, dist, seed)
}

/// `n` points uniform on the cube `[a, b]^3`.
pub fn gen_uniform(n: usize, a: f64, b: f64, seed: u64) -> Result<PointCloud> {
    require_points(n)?;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "uniform needs a < b, got a={a} b={b}"
        )));
    }
    sample_cloud("uniform", n, Uniform::new_inclusive(a, b), seed)
}

/// i.i.d. standard normal 3D points.
pub fn gen_white_noise(n: usize, seed: u64) -> Result<PointCloud> {
    let mut cloud = gen_normal(n, 0.0, 1.0, seed)?;
    cloud.label = "white_noise".into();
    Ok(cloud)
}

/// Regular `k x k x k` grid filling `[0, 1]^3`, where `n = k^3`.
pub fn gen_lattice(n: usize) -> Result<PointCloud> {
    require_points(n)?;
    let k = integer_cube_root(n);
    if k * k * k != n {
        return Err(Error::NotACube {
            n,
            below: k * k * k,
            above: (k + 1) * (k + 1) * (k + 1),
        });
    }
    let coordinate = |idx: usize| {
        if k == 1 {
            0.0
        } else {
            idx as f64 / (k - 1) as f64
        }
    };
    let mut coords = Vec::with_capacity(3 * n);
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                coords.extend([coordinate(i), coordinate(j), coordinate(l)]);
            }
        }
    }
    PointCloud::from_flat("lattice", 3, coords)
}

fn integer_cube_root(n: usize) -> usize {
    let mut k = (n as f64).cbrt().round() as usize;
    while k * k * k > n {
        k -= 1;
    }
    while (k + 1) * (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k
}

/// Cantor-like cloud: each coordinate is `sum_i d_i / 4^i` over `terms` digits
/// drawn uniformly from `{0, 3}`.
pub fn gen_fractal(n: usize, terms: usize, seed: u64) -> Result<PointCloud> {
    require_points(n)?;
    if terms == 0 {
        return Err(Error::InvalidParameter(
            "fractal needs at least one digit".into(),
        ));
    }
    let mut rng = rng_for(seed);
    let mut digits = vec![0u8; terms];
    let coords = (0..3 * n)
        .map(|_| {
            for d in digits.iter_mut() {
                *d = if rng.gen::<bool>() { 3 } else { 0 };
            }
            base4_value(&digits)
        })
        .collect();
    Ok(PointCloud::from_flat("fractal", 3, coords)?.with_seed(seed))
}

/// Base-4 digits representable in an `f64` mantissa.
const EXACT_BASE4_DIGITS: usize = 26;

/// `sum_i digits[i] / 4^(i+1)`.
///
/// Digits past the 26th are below double precision and are truncated, so the
/// result is exact and every base-4 digit it carries is one of the inputs.
pub fn base4_value(digits: &[u8]) -> f64 {
    let mantissa = digits
        .iter()
        .take(EXACT_BASE4_DIGITS)
        .chain(std::iter::repeat(&0))
        .take(EXACT_BASE4_DIGITS)
        .fold(0u64, |acc, d| acc * 4 + u64::from(*d));
    mantissa as f64 / 4f64.powi(EXACT_BASE4_DIGITS as i32)
}
