//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use hyperfilt::{DistanceMatrix, MetricSpec};

/// Textbook distance formulas, one explicit loop each.
pub fn naive_distance(spec: &MetricSpec, a: &[f64], b: &[f64]) -> f64 {
    match spec {
        MetricSpec::Euclidean => {
            let mut s = 0.0;
            for l in 0..a.len() {
                s += (a[l] - b[l]) * (a[l] - b[l]);
            }
            s.sqrt()
        }
        MetricSpec::Chebyshev => {
            let mut m = 0.0f64;
            for l in 0..a.len() {
                m = m.max((a[l] - b[l]).abs());
            }
            m
        }
        MetricSpec::Cityblock => {
            let mut s = 0.0;
            for l in 0..a.len() {
                s += (a[l] - b[l]).abs();
            }
            s
        }
        MetricSpec::Minkowski { p } => {
            let mut s = 0.0;
            for l in 0..a.len() {
                s += (a[l] - b[l]).abs().powf(*p);
            }
            s.powf(1.0 / p)
        }
        MetricSpec::Parabolic { alphas } => {
            let mut m = 0.0f64;
            for l in 0..a.len() {
                m = m.max((a[l] - b[l]).abs().powf(alphas[l]));
            }
            m
        }
    }
}

pub fn naive_matrix(spec: &MetricSpec, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = naive_distance(spec, &points[i], &points[j]);
        }
    }
    out
}

/// Membership rows as plain booleans.
pub fn naive_rows(matrix: &DistanceMatrix, r: f64) -> Vec<Vec<bool>> {
    let n = matrix.n();
    (0..n)
        .map(|i| (0..n).map(|j| i == j || matrix.get(i, j) < r).collect())
        .collect()
}

/// Number of distinct rows by comparing every pair of rows.
pub fn quadratic_degree(matrix: &DistanceMatrix, r: f64) -> usize {
    let rows = naive_rows(matrix, r);
    let mut count = 0;
    for i in 0..rows.len() {
        let seen_before = (0..i).any(|k| rows[k] == rows[i]);
        if !seen_before {
            count += 1;
        }
    }
    count
}

pub type Field = fn(f64, f64, f64) -> (f64, f64, f64);

pub fn lorenz_field(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    (10.0 * (y - x), -x * z + 28.0 * x - y, x * y - 8.0 / 3.0 * z)
}

pub fn rossler_field(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    (-y - z, x + 0.2 * y, 0.2 + z * (x - 5.7))
}

pub fn butterfly_field(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    let sign = if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    };
    (0.55 * (y - z), -z * sign, x.abs() - 1.0)
}

/// Classical RK4 written out per component; returns the state after `steps` steps.
pub fn rk4_oracle(field: Field, start: (f64, f64, f64), dt: f64, steps: usize) -> (f64, f64, f64) {
    let (mut x, mut y, mut z) = start;
    for _ in 0..steps {
        let (a1, b1, c1) = field(x, y, z);
        let (a2, b2, c2) = field(x + 0.5 * dt * a1, y + 0.5 * dt * b1, z + 0.5 * dt * c1);
        let (a3, b3, c3) = field(x + 0.5 * dt * a2, y + 0.5 * dt * b2, z + 0.5 * dt * c2);
        let (a4, b4, c4) = field(x + dt * a3, y + dt * b3, z + dt * c3);
        x += dt * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0;
        y += dt * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0;
        z += dt * (c1 + 2.0 * c2 + 2.0 * c3 + c4) / 6.0;
    }
    (x, y, z)
}

/// Largest componentwise relative error, with an absolute floor of 1 on the scale.
pub fn max_rel_err(got: &[f64], want: (f64, f64, f64)) -> f64 {
    let want = [want.0, want.1, want.2];
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs() / w.abs().max(1.0))
        .fold(0.0, f64::max)
}
