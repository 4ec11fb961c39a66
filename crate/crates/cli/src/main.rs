use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hyperfilt::config::{GridSpec, RunConfig, FULL_SCALE_REALIZATIONS};
use hyperfilt::pipeline;
use hyperfilt::{MetricSpec, SpacingMode};

const THREADS_ENV: &str = "HYPERFILT_THREADS";

#[derive(Parser)]
#[command(
    name = "hyperfilt",
    version,
    about = "Hypergraph filtration of point clouds"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one CSV point cloud per dataset realization.
    Generate,
    /// Compute degree curves and their mean/deviation bands.
    Analyze,
    /// Tabulate L1 and Sobolev quantifiers of every curve ensemble.
    Quantify,
    /// Write band-distance matrices between the datasets of a group.
    Compare {
        /// Dataset group to compare; every configured group when omitted.
        #[arg(long = "group")]
        groups: Vec<String>,
    },
    /// Print the effective configuration as JSON.
    ShowConfig,
}

#[derive(Args)]
struct Overrides {
    /// JSON run configuration; built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Metric to use (repeatable): NAME, minkowski:P or parabolic:A1,A2,...
    #[arg(long = "metric", global = true)]
    metrics: Vec<MetricSpec>,

    /// Radius grid as start:step:stop.
    #[arg(long, global = true)]
    grid: Option<GridSpec>,

    #[arg(long, global = true)]
    realizations: Option<usize>,

    /// Base seed; realization k uses seed + k.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Keep raw distances instead of dividing by the largest one.
    #[arg(long, global = true)]
    no_normalize: bool,

    /// Sobolev denominator: `index` (unit) or `grid` (radius step).
    #[arg(long, global = true)]
    spacing: Option<SpacingMode>,

    /// Use the full realization count of the original experiments.
    #[arg(long, global = true)]
    paper_scale: bool,

    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_json_file(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => RunConfig::default(),
        };
        if !self.metrics.is_empty() {
            config.metrics = self.metrics.clone();
        }
        if let Some(grid) = self.grid {
            config.grid = grid;
        }
        if self.paper_scale {
            config.realizations = FULL_SCALE_REALIZATIONS;
        }
        if let Some(k) = self.realizations {
            config.realizations = k;
        }
        if let Some(seed) = self.seed {
            config.base_seed = seed;
        }
        if self.no_normalize {
            config.normalize = false;
        }
        if let Some(spacing) = self.spacing {
            config.spacing_mode = spacing;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .with_context(|| format!("{THREADS_ENV} must be a thread count, got `{value}`"))?;
    if threads == 0 {
        bail!("{THREADS_ENV} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_threads()?;
    let config = cli.overrides.resolve()?;

    match cli.command {
        Command::ShowConfig => println!("{}", serde_json::to_string_pretty(&config)?),
        Command::Generate => {
            let files = pipeline::cmd_generate(&config)?;
            println!(
                "wrote {} point clouds to {}",
                files.len(),
                config.points_dir().display()
            );
        }
        Command::Analyze => {
            let files = pipeline::cmd_analyze(&config)?;
            println!(
                "wrote {} curve files to {}",
                files.len(),
                config.curves_dir().display()
            );
        }
        Command::Quantify => {
            let rows = pipeline::cmd_quantify(&config)?;
            println!("dataset,metric,L_mean,L_std,S_mean,S_std");
            for row in rows {
                let r = row.report;
                println!(
                    "{},{},{:.1},{:.1},{:.1},{:.1}",
                    row.dataset, row.metric, r.l_mean, r.l_std, r.s_mean, r.s_std
                );
            }
        }
        Command::Compare { groups } => {
            let groups = if groups.is_empty() {
                config.groups.iter().map(|g| g.name.clone()).collect()
            } else {
                groups
            };
            for group in groups {
                let files = pipeline::cmd_compare(&config, &group)?;
                println!("{group}: wrote {} distance matrices", files.len());
            }
        }
    }
    Ok(())
}
