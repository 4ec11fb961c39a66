//! CSV and JSON readers/writers for clouds, curves, tables and distance matrices.
//!
//! CSVs are UTF-8 with `\n` line endings; floats use Rust's shortest
//! round-trip formatting so every file reads back to the same values.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::PointCloud;
use crate::error::{Error, Result};
use crate::filtration::{FiltrationCurve, RadiusGrid};
use crate::quantify::QuantifierReport;

fn writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn malformed(path: &Path, msg: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn parse_f64(path: &Path, field: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| malformed(path, format!("`{field}` is not a number")))
}

fn parse_usize(path: &Path, field: &str) -> Result<usize> {
    field
        .parse()
        .map_err(|_| malformed(path, format!("`{field}` is not a count")))
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, sink: W) -> Result<()> {
    let mut w = writer(sink);
    w.write_record((1..=cloud.dim()).map(|l| format!("x{l}")))?;
    for p in cloud.points() {
        w.write_record(p.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a point-per-row CSV with an `x1,...,xd` header.
pub fn read_cloud_csv(path: &Path, label: &str) -> Result<PointCloud> {
    let mut rdr = reader(open(path)?);
    let dim = rdr.headers()?.len();
    let mut coords = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != dim {
            return Err(malformed(
                path,
                format!("row has {} columns, expected {dim}", record.len()),
            ));
        }
        for field in record.iter() {
            coords.push(parse_f64(path, field)?);
        }
    }
    PointCloud::from_flat(label, dim, coords)
}

#[derive(Serialize, Deserialize)]
struct CloudRecord {
    label: String,
    seed: Option<u64>,
    points: Vec<Vec<f64>>,
}

pub fn write_cloud_json<W: Write>(cloud: &PointCloud, sink: W) -> Result<()> {
    let record = CloudRecord {
        label: cloud.label.clone(),
        seed: cloud.seed,
        points: cloud.points().map(<[f64]>::to_vec).collect(),
    };
    serde_json::to_writer(sink, &record)?;
    Ok(())
}

pub fn read_cloud_json(path: &Path) -> Result<PointCloud> {
    let record: CloudRecord = serde_json::from_reader(open(path)?)?;
    let mut cloud = PointCloud::from_points(record.label, record.points)?;
    cloud.seed = record.seed;
    Ok(cloud)
}

/// Reads a cloud by extension: `.json` records, anything else as CSV.
pub fn read_cloud(path: &Path, label: &str) -> Result<PointCloud> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_cloud_json(path),
        _ => read_cloud_csv(path, label),
    }
}

/// `r,delta_e` rows for one curve.
pub fn write_curve_csv<W: Write>(curve: &FiltrationCurve, sink: W) -> Result<()> {
    let mut w = writer(sink);
    w.write_record(["r", "delta_e"])?;
    for (r, v) in curve.grid.radii().iter().zip(&curve.values) {
        w.write_record([r.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<FiltrationCurve> {
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for record in reader(open(path)?).records() {
        let record = record?;
        if record.len() != 2 {
            return Err(malformed(path, "expected columns r,delta_e"));
        }
        radii.push(parse_f64(path, &record[0])?);
        values.push(parse_usize(path, &record[1])?);
    }
    FiltrationCurve::new(RadiusGrid::new(radii)?, values)
}

/// `realization,r,delta_e` rows, one block per curve.
pub fn write_ensemble_csv<W: Write>(curves: &[FiltrationCurve], sink: W) -> Result<()> {
    let mut w = writer(sink);
    w.write_record(["realization", "r", "delta_e"])?;
    for (k, curve) in curves.iter().enumerate() {
        for (r, v) in curve.grid.radii().iter().zip(&curve.values) {
            w.write_record([k.to_string(), r.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_ensemble_csv(path: &Path) -> Result<Vec<FiltrationCurve>> {
    let mut blocks: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for record in reader(open(path)?).records() {
        let record = record?;
        if record.len() != 3 {
            return Err(malformed(path, "expected columns realization,r,delta_e"));
        }
        let k = parse_usize(path, &record[0])?;
        if k == blocks.len() {
            blocks.push((Vec::new(), Vec::new()));
        } else if k + 1 != blocks.len() {
            return Err(malformed(path, format!("realization {k} out of order")));
        }
        let block = blocks.last_mut().expect("pushed above");
        block.0.push(parse_f64(path, &record[1])?);
        block.1.push(parse_usize(path, &record[2])?);
    }
    if blocks.is_empty() {
        return Err(malformed(path, "no curves"));
    }
    blocks
        .into_iter()
        .map(|(radii, values)| FiltrationCurve::new(RadiusGrid::new(radii)?, values))
        .collect()
}

/// `r,mu,sigma` band summary.
pub fn write_summary_csv<W: Write>(
    grid: &RadiusGrid,
    mu: &[f64],
    sigma: &[f64],
    sink: W,
) -> Result<()> {
    let mut w = writer(sink);
    w.write_record(["r", "mu", "sigma"])?;
    for ((r, m), s) in grid.radii().iter().zip(mu).zip(sigma) {
        w.write_record([r.to_string(), m.to_string(), s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of `r,mu,sigma`.
pub fn read_summary_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    reader(open(path)?)
        .records()
        .map(|record| {
            let record = record?;
            if record.len() != 3 {
                return Err(malformed(path, "expected columns r,mu,sigma"));
            }
            Ok((
                parse_f64(path, &record[0])?,
                parse_f64(path, &record[1])?,
                parse_f64(path, &record[2])?,
            ))
        })
        .collect()
}

/// One row of the quantifier table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantifierRow {
    pub dataset: String,
    pub metric: String,
    #[serde(flatten)]
    pub report: QuantifierReport,
}

pub fn write_quantifier_csv<W: Write>(rows: &[QuantifierRow], sink: W) -> Result<()> {
    let mut w = writer(sink);
    w.write_record(["dataset", "metric", "L_mean", "L_std", "S_mean", "S_std"])?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.dataset.clone(),
            row.metric.clone(),
            r.l_mean.to_string(),
            r.l_std.to_string(),
            r.s_mean.to_string(),
            r.s_std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_quantifier_csv(path: &Path) -> Result<Vec<QuantifierRow>> {
    reader(open(path)?)
        .records()
        .map(|record| {
            let record = record?;
            if record.len() != 6 {
                return Err(malformed(path, "expected 6 columns"));
            }
            Ok(QuantifierRow {
                dataset: record[0].to_string(),
                metric: record[1].to_string(),
                report: QuantifierReport {
                    l_mean: parse_f64(path, &record[2])?,
                    l_std: parse_f64(path, &record[3])?,
                    s_mean: parse_f64(path, &record[4])?,
                    s_std: parse_f64(path, &record[5])?,
                },
            })
        })
        .collect()
}

/// Square matrix with row and column labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

pub fn write_matrix_csv<W: Write>(matrix: &LabeledMatrix, sink: W) -> Result<()> {
    let mut w = writer(sink);
    w.write_record(std::iter::once("label").chain(matrix.labels.iter().map(String::as_str)))?;
    for (label, row) in matrix.labels.iter().zip(&matrix.values) {
        w.write_record(std::iter::once(label.clone()).chain(row.iter().map(f64::to_string)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<LabeledMatrix> {
    let mut rdr = reader(open(path)?);
    let labels: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_string).collect();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != labels.len() + 1 || labels.get(i).map(String::as_str) != record.get(0) {
            return Err(malformed(
                path,
                format!("row {i} does not match the header"),
            ));
        }
        values.push(
            record
                .iter()
                .skip(1)
                .map(|f| parse_f64(path, f))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if values.len() != labels.len() {
        return Err(malformed(path, "matrix is not square"));
    }
    Ok(LabeledMatrix { labels, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::gen_normal;

    #[test]
    fn cloud_csv_layout() {
        let cloud = PointCloud::from_points("t", vec![vec![0.5, -1.0, 2.0], vec![0.0, 0.0, 1e-17]])
            .unwrap();
        let mut buf = Vec::new();
        write_cloud_csv(&cloud, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x1,x2,x3\n0.5,-1,2\n0,0,0.00000000000000001\n"
        );
    }

    #[test]
    fn cloud_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cloud = gen_normal(50, 0.0, 3.0, 1).unwrap();

        let csv_path = dir.path().join("c.csv");
        write_cloud_csv(&cloud, File::create(&csv_path).unwrap()).unwrap();
        let back = read_cloud(&csv_path, "normal").unwrap();
        assert_eq!(back.coords(), cloud.coords());

        let json_path = dir.path().join("c.json");
        write_cloud_json(&cloud, File::create(&json_path).unwrap()).unwrap();
        assert_eq!(read_cloud(&json_path, "ignored").unwrap(), cloud);
    }

    #[test]
    fn ensemble_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = RadiusGrid::new(vec![0.1, 0.2, 0.3]).unwrap();
        let curves = vec![
            FiltrationCurve::new(grid.clone(), vec![5, 3, 1]).unwrap(),
            FiltrationCurve::new(grid, vec![4, 4, 1]).unwrap(),
        ];
        let path = dir.path().join("e.csv");
        write_ensemble_csv(&curves, File::create(&path).unwrap()).unwrap();
        assert_eq!(read_ensemble_csv(&path).unwrap(), curves);

        let single = dir.path().join("s.csv");
        write_curve_csv(&curves[0], File::create(&single).unwrap()).unwrap();
        assert_eq!(read_curve_csv(&single).unwrap(), curves[0]);
    }

    #[test]
    fn matrix_round_trip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let m = LabeledMatrix {
            labels: vec!["a".into(), "b".into()],
            values: vec![vec![0.0, 1.5], vec![1.5, 0.0]],
        };
        let path = dir.path().join("m.csv");
        write_matrix_csv(&m, File::create(&path).unwrap()).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "label,a,b\na,0,1.5\nb,1.5,0\n"
        );
        assert_eq!(read_matrix_csv(&path).unwrap(), m);
    }

    #[test]
    fn missing_and_malformed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            read_curve_csv(&dir.path().join("nope.csv")),
            Err(Error::MissingInput(_))
        ));
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x1,x2\n1,abc\n").unwrap();
        assert!(matches!(
            read_cloud_csv(&path, "bad"),
            Err(Error::Malformed { .. })
        ));
    }
}
