//! Fixed-step RK4 sampling of three-dimensional chaotic flows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::error::{Error, Result};

/// Magnitude of the per-realization perturbation applied to initial conditions.
pub const REALIZATION_JITTER: f64 = 1e-3;

type State = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum OdeSystem {
    Lorenz {
        sigma: f64,
        rho: f64,
        beta: f64,
    },
    Rossler {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `x' = a (y - z)`, `y' = -z sgn(x)`, `z' = |x| - 1`.
    ComplexButterfly {
        a: f64,
    },
}

impl OdeSystem {
    pub fn lorenz() -> Self {
        OdeSystem::Lorenz {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }

    pub fn rossler() -> Self {
        OdeSystem::Rossler {
            a: 0.2,
            b: 0.2,
            c: 5.7,
        }
    }

    pub fn complex_butterfly() -> Self {
        OdeSystem::ComplexButterfly { a: 0.55 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OdeSystem::Lorenz { .. } => "lorenz",
            OdeSystem::Rossler { .. } => "rossler",
            OdeSystem::ComplexButterfly { .. } => "complex_butterfly",
        }
    }

    /// Standard initial condition for each system.
    pub fn default_initial(&self) -> State {
        match self {
            OdeSystem::Lorenz { .. } => [0.0, -0.01, 9.0],
            OdeSystem::Rossler { .. } => [-9.0, 0.0, 0.0],
            OdeSystem::ComplexButterfly { .. } => [0.2, 0.0, 0.0],
        }
    }

    pub fn vector_field(&self, [x, y, z]: State) -> State {
        match *self {
            OdeSystem::Lorenz { sigma, rho, beta } => {
                [sigma * (y - x), -x * z + rho * x - y, x * y - beta * z]
            }
            OdeSystem::Rossler { a, b, c } => [-y - z, x + a * y, b + z * (x - c)],
            OdeSystem::ComplexButterfly { a } => [a * (y - z), -z * sgn(x), x.abs() - 1.0],
        }
    }
}

/// Sign function with `sgn(0) = 0` (unlike `f64::signum`).
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    #[serde(flatten)]
    pub system: OdeSystem,
    pub initial: State,
    pub dt: f64,
    /// Number of trajectory points, the initial state included.
    pub steps: usize,
    pub subsample_stride: usize,
    /// Extra integration steps discarded before the first kept point.
    #[serde(default)]
    pub burn_in: usize,
}

impl OdeSpec {
    /// dt = 0.01, 10000 steps kept every 10th, from the system's standard start.
    pub fn standard(system: OdeSystem) -> Self {
        OdeSpec {
            initial: system.default_initial(),
            system,
            dt: 0.01,
            steps: 10_000,
            subsample_stride: 10,
            burn_in: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.subsample_stride == 0 {
            return Err(Error::InvalidParameter(
                "subsample stride must be >= 1".into(),
            ));
        }
        if self.steps < self.subsample_stride {
            return Err(Error::InvalidParameter(format!(
                "steps ({}) must be at least the stride ({})",
                self.steps, self.subsample_stride
            )));
        }
        if self.initial.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial state must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Same spec with the initial condition shifted by seed-derived offsets in
    /// `[-REALIZATION_JITTER, REALIZATION_JITTER]` per coordinate.
    pub fn perturbed(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = self.clone();
        for c in spec.initial.iter_mut() {
            *c += rng.gen_range(-REALIZATION_JITTER..=REALIZATION_JITTER);
        }
        spec
    }
}

fn rk4_step(system: &OdeSystem, s: State, dt: f64) -> State {
    let shift = |s: State, k: State, h: f64| [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]];
    let k1 = system.vector_field(s);
    let k2 = system.vector_field(shift(s, k1, dt / 2.0));
    let k3 = system.vector_field(shift(s, k2, dt / 2.0));
    let k4 = system.vector_field(shift(s, k3, dt));
    std::array::from_fn(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Full RK4 trajectory of `spec.steps` points, after discarding `burn_in` steps.
pub fn trajectory(spec: &OdeSpec) -> Result<Vec<State>> {
    spec.validate()?;
    let mut state = spec.initial;
    for step in 1..=spec.burn_in {
        state = rk4_step(&spec.system, state, spec.dt);
        if state.iter().any(|c| !c.is_finite()) {
            return Err(Error::Diverged { step });
        }
    }
    let mut out = Vec::with_capacity(spec.steps);
    out.push(state);
    for step in 1..spec.steps {
        state = rk4_step(&spec.system, state, spec.dt);
        if state.iter().any(|c| !c.is_finite()) {
            return Err(Error::Diverged {
                step: spec.burn_in + step,
            });
        }
        out.push(state);
    }
    Ok(out)
}

/// Subsampled trajectory as a point cloud labelled with the system name.
pub fn integrate(spec: &OdeSpec) -> Result<PointCloud> {
    let full = trajectory(spec)?;
    let kept = full.len() / spec.subsample_stride;
    let coords = full
        .iter()
        .step_by(spec.subsample_stride)
        .take(kept)
        .flatten()
        .copied()
        .collect();
    PointCloud::from_flat(spec.system.name(), 3, coords)
}
