//! Hypergraph filtration of point clouds.
//!
//! Points are turned into a distance matrix under one of several
//! (proto)metrics; sweeping a radius yields a nested family of hypergraphs whose
//! number of distinct hyperedges traces a curve. Curves are summarised by their
//! L1 norm and a discrete Sobolev seminorm, and ensembles of curves are compared
//! through the gap between their mean ± deviation bands.

pub mod config;
pub mod datagen;
pub mod error;
pub mod filtration;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod quantify;

pub use datagen::PointCloud;
pub use error::{Error, Result};
pub use filtration::{FiltrationCurve, Hyperedge, IncidenceMatrix, RadiusGrid};
pub use metrics::{DistanceMatrix, MetricKind, MetricSpec};
pub use quantify::{CurveEnsemble, Quantifier, QuantifierReport, SpacingMode, StdMode};
