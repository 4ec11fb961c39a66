//! End-to-end experiment stages over a [`RunConfig`].
//!
//! Outputs live under `output_dir/{points,curves,tables,distances}` with
//! deterministic names, so a rerun of the same config rewrites identical bytes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{DatasetSpec, RunConfig};
use crate::datagen::PointCloud;
use crate::error::{Error, Result};
use crate::filtration::{filtration_curve, FiltrationCurve, RadiusGrid};
use crate::io::{self, LabeledMatrix, QuantifierRow};
use crate::metrics::{normalize, pairwise_matrix, MetricSpec};
use crate::quantify::{self, CurveEnsemble, Quantifier};

/// Distance matrix, optional normalization and degree curve for one cloud.
pub fn cloud_curve(
    cloud: &PointCloud,
    metric: &MetricSpec,
    grid: &RadiusGrid,
    normalized: bool,
) -> Result<FiltrationCurve> {
    let mut matrix = pairwise_matrix(cloud, metric)?;
    if normalized {
        matrix = normalize(&matrix)?;
    }
    filtration_curve(&matrix, grid)
}

/// Curves of every realization of `dataset`, generated in memory.
pub fn dataset_curves(
    config: &RunConfig,
    dataset: &DatasetSpec,
    metric: &MetricSpec,
) -> Result<Vec<FiltrationCurve>> {
    let grid = config.radius_grid()?;
    (0..dataset.realizations(config.realizations))
        .into_par_iter()
        .map(|k| {
            let cloud = dataset.realize(k, config.base_seed)?;
            cloud_curve(&cloud, metric, &grid, config.normalize)
        })
        .collect()
}

/// In-memory ensemble of `dataset` under `metric`.
pub fn dataset_ensemble(
    config: &RunConfig,
    dataset: &DatasetSpec,
    metric: &MetricSpec,
) -> Result<CurveEnsemble> {
    quantify::ensemble_stats(dataset_curves(config, dataset, metric)?, config.std_mode)
}

pub fn point_file(config: &RunConfig, label: &str, realization: usize) -> PathBuf {
    config
        .points_dir()
        .join(format!("{label}_{realization}.csv"))
}

pub fn ensemble_file(config: &RunConfig, label: &str, metric: &MetricSpec) -> PathBuf {
    config
        .curves_dir()
        .join(format!("{label}_{}.csv", metric.kind()))
}

pub fn summary_file(config: &RunConfig, label: &str, metric: &MetricSpec) -> PathBuf {
    config
        .curves_dir()
        .join(format!("{label}_{}_summary.csv", metric.kind()))
}

pub fn quantifier_file(config: &RunConfig) -> PathBuf {
    config.tables_dir().join("quantifiers.csv")
}

pub fn distance_file(
    config: &RunConfig,
    group: &str,
    metric: &MetricSpec,
    quantifier: Quantifier,
) -> PathBuf {
    config
        .distances_dir()
        .join(format!("{group}_{}_{quantifier}.csv", metric.kind()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut sink = create(path)?;
    f(&mut sink)?;
    sink.flush()?;
    Ok(())
}

/// Writes one CSV cloud per (dataset, realization).
pub fn cmd_generate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let tasks: Vec<(&DatasetSpec, usize)> = config
        .datasets
        .iter()
        .flat_map(|d| (0..d.realizations(config.realizations)).map(move |k| (d, k)))
        .collect();
    tasks
        .par_iter()
        .map(|&(dataset, k)| {
            let cloud = dataset.realize(k, config.base_seed)?;
            let path = point_file(config, &dataset.label(), k);
            write_with(&path, |w| io::write_cloud_csv(&cloud, w))?;
            Ok(path)
        })
        .collect()
}

fn load_realizations(config: &RunConfig, dataset: &DatasetSpec) -> Result<Vec<PointCloud>> {
    let label = dataset.label();
    (0..dataset.realizations(config.realizations))
        .map(|k| io::read_cloud_csv(&point_file(config, &label, k), &label))
        .collect()
}

/// Reads generated clouds and writes, per (dataset, metric), the ensemble of
/// curves and its `r,mu,sigma` summary.
pub fn cmd_analyze(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let grid = config.radius_grid()?;
    let mut written = Vec::new();
    for dataset in &config.datasets {
        let label = dataset.label();
        let clouds = load_realizations(config, dataset)?;
        for metric in &config.metrics {
            if let Some(cloud) = clouds.first() {
                metric.check_dimension(cloud.dim())?;
            }
            let curves = clouds
                .par_iter()
                .map(|cloud| cloud_curve(cloud, metric, &grid, config.normalize))
                .collect::<Result<Vec<_>>>()?;
            let ensemble = quantify::ensemble_stats(curves, config.std_mode)?;

            let curves_path = ensemble_file(config, &label, metric);
            write_with(&curves_path, |w| {
                io::write_ensemble_csv(&ensemble.curves, w)
            })?;
            let summary_path = summary_file(config, &label, metric);
            write_with(&summary_path, |w| {
                io::write_summary_csv(&ensemble.grid, &ensemble.mu, &ensemble.sigma, w)
            })?;
            written.push(curves_path);
            written.push(summary_path);
        }
    }
    Ok(written)
}

fn load_ensemble(config: &RunConfig, label: &str, metric: &MetricSpec) -> Result<CurveEnsemble> {
    let curves = io::read_ensemble_csv(&ensemble_file(config, label, metric))?;
    quantify::ensemble_stats(curves, config.std_mode)
}

/// Table of L1 / Sobolev means and deviations, one row per (dataset, metric).
pub fn cmd_quantify(config: &RunConfig) -> Result<Vec<QuantifierRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for dataset in &config.datasets {
        let label = dataset.label();
        for metric in &config.metrics {
            let ensemble = load_ensemble(config, &label, metric)?;
            rows.push(QuantifierRow {
                dataset: label.clone(),
                metric: metric.kind().to_string(),
                report: quantify::quantifier_report(
                    &ensemble,
                    config.spacing_mode,
                    config.std_mode,
                )?,
            });
        }
    }
    let csv_path = quantifier_file(config);
    write_with(&csv_path, |w| io::write_quantifier_csv(&rows, w))?;
    write_with(&csv_path.with_extension("json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &rows)?;
        Ok(())
    })?;
    Ok(rows)
}

/// Band-distance matrix between `ensembles`, labelled by `labels`.
pub fn compare_ensembles(
    config: &RunConfig,
    labels: &[String],
    ensembles: &[CurveEnsemble],
    quantifier: Quantifier,
) -> Result<LabeledMatrix> {
    Ok(LabeledMatrix {
        labels: labels.to_vec(),
        values: quantify::distance_matrix(ensembles, quantifier, config.spacing_mode)?,
    })
}

/// Writes a labelled distance matrix for each (metric, quantifier) over the
/// datasets of `group`.
pub fn cmd_compare(config: &RunConfig, group: &str) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let labels = &config
        .group(group)
        .ok_or_else(|| Error::Config(format!("unknown dataset group `{group}`")))?
        .datasets;
    let mut written = Vec::new();
    for metric in &config.metrics {
        let ensembles = labels
            .iter()
            .map(|label| load_ensemble(config, label, metric))
            .collect::<Result<Vec<_>>>()?;
        for quantifier in Quantifier::ALL {
            let matrix = compare_ensembles(config, labels, &ensembles, quantifier)?;
            let path = distance_file(config, group, metric, quantifier);
            write_with(&path, |w| io::write_matrix_csv(&matrix, w))?;
            write_with(&path.with_extension("json"), |w| {
                serde_json::to_writer_pretty(&mut *w, &matrix)?;
                Ok(())
            })?;
            written.push(path);
        }
    }
    Ok(written)
}
