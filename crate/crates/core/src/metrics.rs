//! Point-to-point (proto)metrics and the pairwise distance matrices built from them.
//!
//! A protometric only needs `d(x, y) >= 0` with equality iff `x == y`. Nothing in
//! [`DistanceMatrix`] assumes symmetry: entry `(i, j)` is always `d(x_i, x_j)` and
//! ball membership downstream reads rows as centers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::PointCloud;
use crate::error::{Error, Result};

pub const DEFAULT_MINKOWSKI_P: f64 = 3.0;
pub const DEFAULT_PARABOLIC_ALPHAS: [f64; 3] = [1.0, 0.5, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Chebyshev,
    Cityblock,
    Minkowski,
    Parabolic,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Euclidean,
        MetricKind::Chebyshev,
        MetricKind::Cityblock,
        MetricKind::Minkowski,
        MetricKind::Parabolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Chebyshev => "chebyshev",
            MetricKind::Cityblock => "cityblock",
            MetricKind::Minkowski => "minkowski",
            MetricKind::Parabolic => "parabolic",
        }
    }

    /// True for metrics with `d(λx, λy) = λ d(x, y)`.
    pub fn is_homogeneous(self) -> bool {
        !matches!(self, MetricKind::Parabolic)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(MetricKind::Euclidean),
            "chebyshev" => Ok(MetricKind::Chebyshev),
            "cityblock" | "manhattan" => Ok(MetricKind::Cityblock),
            "minkowski" => Ok(MetricKind::Minkowski),
            "parabolic" => Ok(MetricKind::Parabolic),
            other => Err(Error::InvalidMetric(format!("unknown metric `{other}`"))),
        }
    }
}

/// A metric together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpec {
    Euclidean,
    Chebyshev,
    Cityblock,
    Minkowski { p: f64 },
    Parabolic { alphas: Vec<f64> },
}

impl MetricSpec {
    pub fn minkowski(p: f64) -> Result<Self> {
        let spec = MetricSpec::Minkowski { p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn parabolic(alphas: Vec<f64>) -> Result<Self> {
        let spec = MetricSpec::Parabolic { alphas };
        spec.validate()?;
        Ok(spec)
    }

    /// The spec for `kind` with default parameters.
    pub fn default_for(kind: MetricKind) -> Self {
        match kind {
            MetricKind::Euclidean => MetricSpec::Euclidean,
            MetricKind::Chebyshev => MetricSpec::Chebyshev,
            MetricKind::Cityblock => MetricSpec::Cityblock,
            MetricKind::Minkowski => MetricSpec::Minkowski {
                p: DEFAULT_MINKOWSKI_P,
            },
            MetricKind::Parabolic => MetricSpec::Parabolic {
                alphas: DEFAULT_PARABOLIC_ALPHAS.to_vec(),
            },
        }
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            MetricSpec::Euclidean => MetricKind::Euclidean,
            MetricSpec::Chebyshev => MetricKind::Chebyshev,
            MetricSpec::Cityblock => MetricKind::Cityblock,
            MetricSpec::Minkowski { .. } => MetricKind::Minkowski,
            MetricSpec::Parabolic { .. } => MetricKind::Parabolic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricSpec::Minkowski { p } if !(p.is_finite() && *p >= 1.0) => Err(
                Error::InvalidMetric(format!("minkowski order must be finite and >= 1, got {p}")),
            ),
            MetricSpec::Parabolic { alphas } => {
                if alphas.is_empty() {
                    return Err(Error::InvalidMetric("parabolic alphas are empty".into()));
                }
                match alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
                    Some(a) => Err(Error::InvalidMetric(format!(
                        "parabolic exponents must lie in (0, 1], got {a}"
                    ))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Checks the spec against the dimension of the points it will be applied to.
    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        self.validate()?;
        if let MetricSpec::Parabolic { alphas } = self {
            if alphas.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: alphas.len(),
                });
            }
        }
        Ok(())
    }

    /// Distance without argument checks. Callers must have run [`check_dimension`].
    ///
    /// [`check_dimension`]: MetricSpec::check_dimension
    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            MetricSpec::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            MetricSpec::Chebyshev => diffs.fold(0.0, f64::max),
            MetricSpec::Cityblock => diffs.sum(),
            MetricSpec::Minkowski { p } => diffs.map(|d| d.powf(*p)).sum::<f64>().powf(1.0 / p),
            MetricSpec::Parabolic { alphas } => diffs
                .zip(alphas)
                .map(|(d, alpha)| d.powf(*alpha))
                .fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::Minkowski { p } => write!(f, "minkowski:{p}"),
            MetricSpec::Parabolic { alphas } => {
                let parts: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
                write!(f, "parabolic:{}", parts.join(","))
            }
            other => f.write_str(other.kind().name()),
        }
    }
}

/// Parses `name`, `minkowski:P` or `parabolic:a1,a2,...`.
impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((name, params)) => (name, Some(params)),
            None => (s, None),
        };
        let kind: MetricKind = name.parse()?;
        let spec = match (kind, params) {
            (kind, None) => MetricSpec::default_for(kind),
            (MetricKind::Minkowski, Some(p)) => MetricSpec::Minkowski {
                p: p.trim()
                    .parse()
                    .map_err(|_| Error::InvalidMetric(format!("bad minkowski order `{p}`")))?,
            },
            (MetricKind::Parabolic, Some(list)) => MetricSpec::Parabolic {
                alphas: list
                    .split(',')
                    .map(|a| {
                        a.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::InvalidMetric(format!("bad exponent `{a}`")))
                    })
                    .collect::<Result<_>>()?,
            },
            (kind, Some(_)) => {
                return Err(Error::InvalidMetric(format!("{kind} takes no parameters")))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Distance between two points under `spec`.
pub fn distance(a: &[f64], b: &[f64], spec: &MetricSpec) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    spec.check_dimension(a.len())?;
    Ok(spec.eval(a, b))
}

/// Dense `n x n` matrix of pairwise distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    normalized: bool,
}

impl DistanceMatrix {
    /// Builds a matrix from explicit rows. Entries must be finite and nonnegative
    /// with a zero diagonal; symmetry is not required.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("matrix is empty".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidMatrix(format!("row {i} holds entry {bad}")));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry {i} is {}",
                    row[i]
                )));
            }
            entries.extend(row);
        }
        Ok(DistanceMatrix {
            n,
            entries,
            normalized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest strictly positive entry, if any.
    pub fn min_positive_entry(&self) -> Option<f64> {
        self.entries
            .iter()
            .copied()
            .filter(|v| *v > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// All pairwise distances of `cloud` under `spec`.
pub fn pairwise_matrix(cloud: &PointCloud, spec: &MetricSpec) -> Result<DistanceMatrix> {
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    spec.check_dimension(cloud.dim())?;
    let mut entries = vec![0.0; n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let a = cloud.point(i);
        for (j, slot) in row.iter_mut().enumerate() {
            if j != i {
                *slot = spec.eval(a, cloud.point(j));
            }
        }
    });
    Ok(DistanceMatrix {
        n,
        entries,
        normalized: false,
    })
}

/// Divides every entry by the largest one.
pub fn normalize(matrix: &DistanceMatrix) -> Result<DistanceMatrix> {
    let max = matrix.max_entry();
    if max <= 0.0 {
        return Err(Error::DegenerateMatrix);
    }
    let entries = matrix
        .entries
        .iter()
        .map(|v| if *v == max { 1.0 } else { v / max })
        .collect();
    Ok(DistanceMatrix {
        n: matrix.n,
        entries,
        normalized: true,
    })
}
