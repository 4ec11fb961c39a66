//! Scalar summaries of degree curves and distances between curve ensembles.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{FiltrationCurve, RadiusGrid};

/// Denominator used by the discrete Sobolev seminorm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingMode {
    /// Divide each increment by the radius step `r_i - r_{i-1}`.
    Grid,
    /// Unit denominator: the total variation of the samples.
    #[default]
    Index,
}

impl FromStr for SpacingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(SpacingMode::Grid),
            "index" => Ok(SpacingMode::Index),
            other => Err(Error::Config(format!("unknown spacing mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdMode {
    /// Divide by `k`.
    #[default]
    Population,
    /// Divide by `k - 1` (zero for a single curve).
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    L1,
    Sobolev,
}

impl Quantifier {
    pub const ALL: [Quantifier; 2] = [Quantifier::L1, Quantifier::Sobolev];

    pub fn name(self) -> &'static str {
        match self {
            Quantifier::L1 => "l1",
            Quantifier::Sobolev => "sobolev",
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sum of absolute sample values.
pub fn l1_norm_values(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum()
}

/// Sum of `|v_i - v_{i-1}|`, divided by `r_i - r_{i-1}` in grid mode.
pub fn sobolev_seminorm_values(radii: &[f64], values: &[f64], mode: SpacingMode) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Curve(format!(
            "seminorm needs at least two samples, got {}",
            values.len()
        )));
    }
    if radii.len() != values.len() {
        return Err(Error::Curve(format!(
            "{} samples for {} radii",
            values.len(),
            radii.len()
        )));
    }
    Ok(values
        .windows(2)
        .zip(radii.windows(2))
        .map(|(v, r)| {
            let jump = (v[1] - v[0]).abs();
            match mode {
                SpacingMode::Grid => jump / (r[1] - r[0]),
                SpacingMode::Index => jump,
            }
        })
        .sum())
}

pub fn l1_norm(curve: &FiltrationCurve) -> f64 {
    curve.values.iter().map(|v| *v as f64).sum()
}

pub fn sobolev_seminorm(curve: &FiltrationCurve, mode: SpacingMode) -> Result<f64> {
    sobolev_seminorm_values(curve.grid.radii(), &curve.as_f64(), mode)
}

/// Curves sharing one grid together with their pointwise mean and deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEnsemble {
    pub grid: RadiusGrid,
    pub curves: Vec<FiltrationCurve>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl CurveEnsemble {
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

/// Pointwise mean and standard deviation of `curves`.
pub fn ensemble_stats(curves: Vec<FiltrationCurve>, std_mode: StdMode) -> Result<CurveEnsemble> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Curve("ensemble needs at least one curve".into()))?;
    let grid = first.grid.clone();
    if curves.iter().any(|c| c.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let k = curves.len() as f64;
    let m = grid.len();
    let mut mu = vec![0.0; m];
    for curve in &curves {
        for (acc, v) in mu.iter_mut().zip(&curve.values) {
            *acc += *v as f64;
        }
    }
    mu.iter_mut().for_each(|v| *v /= k);

    let denom = match std_mode {
        StdMode::Population => k,
        StdMode::Sample => k - 1.0,
    };
    let sigma = (0..m)
        .map(|i| {
            if denom <= 0.0 {
                return 0.0;
            }
            let ss: f64 = curves
                .iter()
                .map(|c| (c.values[i] as f64 - mu[i]).powi(2))
                .sum();
            (ss / denom).sqrt()
        })
        .collect();
    Ok(CurveEnsemble {
        grid,
        curves,
        mu,
        sigma,
    })
}

/// Mean and deviation of the per-curve L1 norms and Sobolev seminorms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantifierReport {
    pub l_mean: f64,
    pub l_std: f64,
    pub s_mean: f64,
    pub s_std: f64,
}

pub fn quantifier_report(
    ensemble: &CurveEnsemble,
    spacing: SpacingMode,
    std_mode: StdMode,
) -> Result<QuantifierReport> {
    let ls: Vec<f64> = ensemble.curves.iter().map(l1_norm).collect();
    let ss = ensemble
        .curves
        .iter()
        .map(|c| sobolev_seminorm(c, spacing))
        .collect::<Result<Vec<_>>>()?;
    let (l_mean, l_std) = mean_std(&ls, std_mode);
    let (s_mean, s_std) = mean_std(&ss, std_mode);
    Ok(QuantifierReport {
        l_mean,
        l_std,
        s_mean,
        s_std,
    })
}

fn mean_std(xs: &[f64], std_mode: StdMode) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let denom = match std_mode {
        StdMode::Population => k,
        StdMode::Sample => k - 1.0,
    };
    if denom <= 0.0 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / denom;
    (mean, var.sqrt())
}

/// Per-radius gap between the bands `mu ± sigma` of two ensembles, zero where
/// the bands overlap.
pub fn band_distance(a: &CurveEnsemble, b: &CurveEnsemble) -> Result<Vec<f64>> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok((0..a.grid.len())
        .map(|i| {
            let (a_lo, a_hi) = (a.mu[i] - a.sigma[i], a.mu[i] + a.sigma[i]);
            let (b_lo, b_hi) = (b.mu[i] - b.sigma[i], b.mu[i] + b.sigma[i]);
            (a_lo - b_hi).max(b_lo - a_hi).max(0.0)
        })
        .collect())
}

/// Quantifier applied to the band distance of two ensembles.
pub fn system_distance(
    a: &CurveEnsemble,
    b: &CurveEnsemble,
    quantifier: Quantifier,
    spacing: SpacingMode,
) -> Result<f64> {
    let gaps = band_distance(a, b)?;
    match quantifier {
        Quantifier::L1 => Ok(l1_norm_values(&gaps)),
        Quantifier::Sobolev => sobolev_seminorm_values(a.grid.radii(), &gaps, spacing),
    }
}

/// Symmetric matrix of [`system_distance`] over all pairs of ensembles.
pub fn distance_matrix(
    ensembles: &[CurveEnsemble],
    quantifier: Quantifier,
    spacing: SpacingMode,
) -> Result<Vec<Vec<f64>>> {
    let k = ensembles.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| system_distance(&ensembles[i], &ensembles[j], quantifier, spacing))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![0.0; k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        out[i][j] = v;
        out[j][i] = v;
    }
    Ok(out)
}
