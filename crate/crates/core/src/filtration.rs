//! Radius filtration of a distance matrix into hypergraphs.
//!
//! For a radius `r` the hyperedge centred at `x_i` is the open ball
//! `e_i(r) = { x_j : d(x_i, x_j) < r }`, which always contains `x_i`. Identical
//! balls are merged, and the number of distinct hyperedges `m(r)` is the
//! hyperedge degree tracked along a grid of radii.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// Membership bit vector of one hyperedge over `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    n: usize,
    words: Vec<u64>,
}

impl Hyperedge {
    fn empty(n: usize) -> Self {
        Hyperedge {
            n,
            words: vec![0; words_for(n)],
        }
    }

    #[inline]
    fn insert(&mut self, j: usize) {
        self.words[j / WORD_BITS] |= 1 << (j % WORD_BITS);
    }

    pub fn contains(&self, j: usize) -> bool {
        j < self.n && self.words[j / WORD_BITS] & (1 << (j % WORD_BITS)) != 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of member vertices.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset_of(&self, other: &Hyperedge) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|j| self.contains(*j))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Distinct hyperedges at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    pub n: usize,
    pub r: f64,
    pub edges: Vec<Hyperedge>,
}

impl IncidenceMatrix {
    /// Builds an incidence matrix from explicit vertex lists, merging duplicates.
    pub fn from_edges(n: usize, r: f64, edges: &[Vec<usize>]) -> Result<Self> {
        let mut out: Vec<Hyperedge> = Vec::new();
        for members in edges {
            let mut edge = Hyperedge::empty(n);
            for &v in members {
                if v >= n {
                    return Err(Error::InvalidMatrix(format!(
                        "vertex {v} out of range 0..{n}"
                    )));
                }
                edge.insert(v);
            }
            if !out.contains(&edge) {
                out.push(edge);
            }
        }
        Ok(IncidenceMatrix { n, r, edges: out })
    }

    /// Membership of vertex `v` in edge `e`.
    pub fn incidence(&self, v: usize, e: usize) -> bool {
        self.edges[e].contains(v)
    }
}

/// Strictly increasing, positive radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RadiusGrid(Vec<f64>);

impl RadiusGrid {
    pub fn new(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidGrid(format!("radius {r} is not positive")));
        }
        if let Some(w) = radii.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "radii must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(RadiusGrid(radii))
    }

    /// `start, start + step, ...` up to and including `stop` (within rounding).
    /// Each radius is computed as `start + k * step` and rounded to 12 decimals
    /// so that decimal grids such as `0.01:0.01:1` hit their nominal values.
    pub fn from_range(start: f64, step: f64, stop: f64) -> Result<Self> {
        if !(start > 0.0 && step > 0.0 && stop >= start)
            || !(start.is_finite() && step.is_finite() && stop.is_finite())
        {
            return Err(Error::InvalidGrid(format!(
                "need start > 0, step > 0, stop >= start; got {start}:{step}:{stop}"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let round = |x: f64| (x * 1e12).round() / 1e12;
        Self::new((0..count).map(|k| round(start + k as f64 * step)).collect())
    }

    /// `0.01, 0.02, ..., 1.01`.
    pub fn default_grid() -> Self {
        Self::from_range(0.01, 0.01, 1.01).expect("default grid is valid")
    }

    /// Copy with one more radius appended after the current last one.
    pub fn extended(&self, r: f64) -> Result<Self> {
        let mut radii = self.0.clone();
        radii.push(r);
        Self::new(radii)
    }

    pub fn radii(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for RadiusGrid {
    type Error = Error;

    fn try_from(radii: Vec<f64>) -> Result<Self> {
        Self::new(radii)
    }
}

impl From<RadiusGrid> for Vec<f64> {
    fn from(grid: RadiusGrid) -> Self {
        grid.0
    }
}

/// Hyperedge degree sampled along a radius grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationCurve {
    pub grid: RadiusGrid,
    pub values: Vec<usize>,
}

impl FiltrationCurve {
    pub fn new(grid: RadiusGrid, values: Vec<usize>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Curve(format!(
                "{} values for {} radii",
                values.len(),
                grid.len()
            )));
        }
        Ok(FiltrationCurve { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| *v as f64).collect()
    }

    /// Degree at the grid radius equal to `r`, if present.
    pub fn at(&self, r: f64) -> Option<usize> {
        self.grid
            .radii()
            .iter()
            .position(|x| *x == r)
            .map(|k| self.values[k])
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

/// Ball of every center at radius `r`, one row per vertex, before merging.
pub fn ball_rows(matrix: &DistanceMatrix, r: f64) -> Result<Vec<Hyperedge>> {
    check_radius(r)?;
    let n = matrix.n();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut edge = Hyperedge::empty(n);
            for (j, d) in matrix.row(i).iter().enumerate() {
                if *d < r || j == i {
                    edge.insert(j);
                }
            }
            edge
        })
        .collect())
}

/// Incidence matrix at radius `r`: the distinct balls, in order of first center.
pub fn hyperedges_at(matrix: &DistanceMatrix, r: f64) -> Result<IncidenceMatrix> {
    let rows = ball_rows(matrix, r)?;
    let mut seen = HashSet::with_capacity(rows.len());
    let mut edges = Vec::new();
    for row in rows {
        if seen.insert(row.words.clone()) {
            edges.push(row);
        }
    }
    Ok(IncidenceMatrix {
        n: matrix.n(),
        r,
        edges,
    })
}

/// Hyperedge degree `m(r)`.
pub fn degree(incidence: &IncidenceMatrix) -> usize {
    incidence.edges.len()
}

/// `A(r)[i][j]` is true when `x_i` belongs to the ball centred at `x_j`.
pub fn adjacency_at(matrix: &DistanceMatrix, r: f64) -> Result<Vec<Vec<bool>>> {
    check_radius(r)?;
    let n = matrix.n();
    Ok((0..n)
        .map(|i| (0..n).map(|j| i == j || matrix.get(j, i) < r).collect())
        .collect())
}

/// Number of distinct rows in a flat buffer of `width`-word bitsets.
fn distinct_rows(buffer: &[u64], width: usize) -> usize {
    let mut seen: HashSet<&[u64]> = HashSet::with_capacity(buffer.len() / width.max(1));
    for row in buffer.chunks_exact(width) {
        seen.insert(row);
    }
    seen.len()
}

/// Degree curve over `grid`.
///
/// Each center's neighbours are sorted by distance once; sweeping the grid in
/// increasing order then only sets the bits of newly covered vertices.
pub fn filtration_curve(matrix: &DistanceMatrix, grid: &RadiusGrid) -> Result<FiltrationCurve> {
    let n = matrix.n();
    let width = words_for(n);

    let order: Vec<Vec<(f64, u32)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<(f64, u32)> = matrix
                .row(i)
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(j, d)| (*d, j as u32))
                .collect();
            row.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            row
        })
        .collect();

    let mut bits = vec![0u64; n * width];
    for (i, row) in bits.chunks_exact_mut(width).enumerate() {
        row[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }
    let mut cursors = vec![0usize; n];

    let mut values = Vec::with_capacity(grid.len());
    for &r in grid.radii() {
        bits.par_chunks_exact_mut(width)
            .zip(cursors.par_iter_mut())
            .zip(order.par_iter())
            .for_each(|((row, cursor), sorted)| {
                while let Some(&(d, j)) = sorted.get(*cursor) {
                    if d >= r {
                        break;
                    }
                    let j = j as usize;
                    row[j / WORD_BITS] |= 1 << (j % WORD_BITS);
                    *cursor += 1;
                }
            });
        values.push(distinct_rows(&bits, width));
    }
    FiltrationCurve::new(grid.clone(), values)
}

/// Degree curve computed independently at every radius.
pub fn filtration_curve_direct(
    matrix: &DistanceMatrix,
    grid: &RadiusGrid,
) -> Result<FiltrationCurve> {
    let values = grid
        .radii()
        .par_iter()
        .map(|&r| hyperedges_at(matrix, r).map(|inc| degree(&inc)))
        .collect::<Result<Vec<_>>>()?;
    FiltrationCurve::new(grid.clone(), values)
}
