//! Declarative description of an experiment run.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datagen::{self, OdeSpec, OdeSystem, PointCloud};
use crate::error::{Error, Result};
use crate::filtration::RadiusGrid;
use crate::io;
use crate::metrics::{MetricKind, MetricSpec};
use crate::quantify::{SpacingMode, StdMode};

pub const DESK_REALIZATIONS: usize = 10;
pub const FULL_SCALE_REALIZATIONS: usize = 100;
pub const DEFAULT_POINTS: usize = 1000;
pub const DEFAULT_POISSON_LAMBDA: f64 = 5.0;
pub const DEFAULT_FRACTAL_TERMS: usize = 100;
/// Cube side of the default uniform dataset. Only the parabolic metric, which
/// is not scale invariant, sees the difference from e.g. `[-1, 1]`.
pub const DEFAULT_UNIFORM_RANGE: (f64, f64) = (0.0, 1.0);

/// Where the points of a dataset come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum DataSource {
    Normal {
        n: usize,
        mu: f64,
        sigma: f64,
    },
    Poisson {
        n: usize,
        lambda: f64,
    },
    Uniform {
        n: usize,
        a: f64,
        b: f64,
    },
    Lattice {
        n: usize,
    },
    Fractal {
        n: usize,
        terms: usize,
    },
    WhiteNoise {
        n: usize,
    },
    Ode(OdeSpec),
    /// A fixed cloud read from CSV or JSON; contributes a single realization.
    File {
        path: PathBuf,
    },
}

impl DataSource {
    pub fn default_label(&self) -> String {
        match self {
            DataSource::Normal { .. } => "normal".into(),
            DataSource::Poisson { .. } => "poisson".into(),
            DataSource::Uniform { .. } => "uniform".into(),
            DataSource::Lattice { .. } => "lattice".into(),
            DataSource::Fractal { .. } => "fractal".into(),
            DataSource::WhiteNoise { .. } => "white_noise".into(),
            DataSource::Ode(spec) => spec.system.name().into(),
            DataSource::File { path } => path
                .file_stem()
                .map_or_else(|| "file".into(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub source: DataSource,
}

impl DatasetSpec {
    pub fn new(source: DataSource) -> Self {
        DatasetSpec {
            label: None,
            source,
        }
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.source.default_label())
    }

    /// Number of realizations this dataset contributes to a run.
    pub fn realizations(&self, requested: usize) -> usize {
        match self.source {
            DataSource::File { .. } => 1,
            _ => requested,
        }
    }

    /// Realization `index`, seeded with `base_seed + index`.
    pub fn realize(&self, index: usize, base_seed: u64) -> Result<PointCloud> {
        let seed = base_seed.wrapping_add(index as u64);
        let mut cloud = match &self.source {
            DataSource::Normal { n, mu, sigma } => datagen::gen_normal(*n, *mu, *sigma, seed)?,
            DataSource::Poisson { n, lambda } => datagen::gen_poisson(*n, *lambda, seed)?,
            DataSource::Uniform { n, a, b } => datagen::gen_uniform(*n, *a, *b, seed)?,
            DataSource::Lattice { n } => datagen::gen_lattice(*n)?,
            DataSource::Fractal { n, terms } => datagen::gen_fractal(*n, *terms, seed)?,
            DataSource::WhiteNoise { n } => datagen::gen_white_noise(*n, seed)?,
            DataSource::Ode(spec) => datagen::integrate(&spec.perturbed(seed))?.with_seed(seed),
            DataSource::File { path } => io::read_cloud(path, &self.label())?,
        };
        cloud.label = self.label();
        Ok(cloud)
    }
}

/// Named subset of datasets compared against each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetGroup {
    pub name: String,
    pub datasets: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl GridSpec {
    pub fn grid(&self) -> Result<RadiusGrid> {
        RadiusGrid::from_range(self.start, self.step, self.stop)
    }
}

/// `0.01:0.01:1.01`. The last radius exceeds every normalized distance, so each
/// curve ends on the single full hyperedge.
impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            start: 0.01,
            step: 0.01,
            stop: 1.01,
        }
    }
}

/// Parses `start:step:stop`.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, step, stop] = parts.as_slice() else {
            return Err(Error::Config(format!(
                "grid must be start:step:stop, got `{s}`"
            )));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad grid value `{x}`")))
        };
        let spec = GridSpec {
            start: num(start)?,
            step: num(step)?,
            stop: num(stop)?,
        };
        spec.grid()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub datasets: Vec<DatasetSpec>,
    pub metrics: Vec<MetricSpec>,
    pub grid: GridSpec,
    pub realizations: usize,
    pub base_seed: u64,
    pub normalize: bool,
    pub output_dir: PathBuf,
    pub spacing_mode: SpacingMode,
    pub std_mode: StdMode,
    pub groups: Vec<DatasetGroup>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let n = DEFAULT_POINTS;
        let points = vec![
            DataSource::Lattice { n },
            DataSource::Fractal {
                n,
                terms: DEFAULT_FRACTAL_TERMS,
            },
            DataSource::Normal {
                n,
                mu: 0.0,
                sigma: 1.0,
            },
            DataSource::Poisson {
                n,
                lambda: DEFAULT_POISSON_LAMBDA,
            },
            DataSource::Uniform {
                n,
                a: DEFAULT_UNIFORM_RANGE.0,
                b: DEFAULT_UNIFORM_RANGE.1,
            },
        ];
        let dynamics = vec![
            DataSource::WhiteNoise { n },
            DataSource::Ode(OdeSpec::standard(OdeSystem::complex_butterfly())),
            DataSource::Ode(OdeSpec::standard(OdeSystem::lorenz())),
            DataSource::Ode(OdeSpec::standard(OdeSystem::rossler())),
        ];
        let group = |name: &str, sources: &[DataSource]| DatasetGroup {
            name: name.into(),
            datasets: sources.iter().map(DataSource::default_label).collect(),
        };
        RunConfig {
            groups: vec![group("points", &points), group("dynamics", &dynamics)],
            datasets: points
                .into_iter()
                .chain(dynamics)
                .map(DatasetSpec::new)
                .collect(),
            metrics: MetricKind::ALL
                .into_iter()
                .map(MetricSpec::default_for)
                .collect(),
            grid: GridSpec::default(),
            realizations: DESK_REALIZATIONS,
            base_seed: 1,
            normalize: true,
            output_dir: PathBuf::from("hyperfilt-out"),
            spacing_mode: SpacingMode::Index,
            std_mode: StdMode::Population,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        self.grid.grid()?;
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets configured".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("no metrics configured".into()));
        }
        let mut labels = HashSet::new();
        for d in &self.datasets {
            let label = d.label();
            if label.is_empty() || label.contains(['/', '\\']) {
                return Err(Error::Config(format!("unusable dataset label `{label}`")));
            }
            if !labels.insert(label.clone()) {
                return Err(Error::Config(format!("duplicate dataset label `{label}`")));
            }
        }
        let mut kinds = HashSet::new();
        for m in &self.metrics {
            m.validate()?;
            if !kinds.insert(m.kind()) {
                return Err(Error::Config(format!(
                    "metric {} configured twice",
                    m.kind()
                )));
            }
        }
        for g in &self.groups {
            if let Some(missing) = g.datasets.iter().find(|d| !labels.contains(*d)) {
                return Err(Error::Config(format!(
                    "group `{}` names unknown dataset `{missing}`",
                    g.name
                )));
            }
        }
        Ok(())
    }

    pub fn radius_grid(&self) -> Result<RadiusGrid> {
        self.grid.grid()
    }

    pub fn dataset(&self, label: &str) -> Option<&DatasetSpec> {
        self.datasets.iter().find(|d| d.label() == label)
    }

    pub fn group(&self, name: &str) -> Option<&DatasetGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn points_dir(&self) -> PathBuf {
        self.output_dir.join("points")
    }

    pub fn curves_dir(&self) -> PathBuf {
        self.output_dir.join("curves")
    }

    pub fn tables_dir(&self) -> PathBuf {
        self.output_dir.join("tables")
    }

    pub fn distances_dir(&self) -> PathBuf {
        self.output_dir.join("distances")
    }
}
