//! Independent reference solver.
//!
//! Writing `q = (q₀, q₁, q₂, q₃)ᵀ`, the equation `q′ = a(t)q` is the real
//! linear system `q′ = M(t)q`. This module integrates it with classical
//! fixed-step RK4 and shares no code with the phase-angle solver.

use crate::coeffs::{CoefficientSet, Forcing};
use crate::error::{Error, Result};
use crate::quat::Quaternion;

pub const DEFAULT_STEP: f64 = 1e-3;

/// `M(t)` for a single `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSystemMatrix(pub [[f64; 4]; 4]);

impl RealSystemMatrix {
    /// Left multiplication by `a` as a 4×4 matrix.
    pub fn from_quaternion(a: Quaternion) -> Self {
        let Quaternion {
            w: a0,
            x: a1,
            y: a2,
            z: a3,
        } = a;
        RealSystemMatrix([
            [a0, -a1, -a2, -a3],
            [a1, a0, -a3, a2],
            [a2, a3, a0, -a1],
            [a3, -a2, a1, a0],
        ])
    }

    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let m = &self.0;
        let mut out = [0.0; 4];
        for (row, o) in m.iter().zip(out.iter_mut()) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0.0; 4]; 4];
        for (i, row) in self.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        RealSystemMatrix(t)
    }
}

pub fn build_matrix(c: &CoefficientSet, t: f64) -> Result<RealSystemMatrix> {
    Ok(RealSystemMatrix::from_quaternion(c.eval(t)?))
}

/// Quaternion samples on a time grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Quaternion>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Quaternion>) -> Self {
        debug_assert_eq!(times.len(), states.len());
        Self { times, states }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, Quaternion)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(|q| q.norm()).collect()
    }

    /// Largest `|‖q‖ − 1|` along the trajectory.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|q| (q.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Sup-norm distance to another trajectory on the same grid.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max)
    }
}

/// `n + 1` points from `t0` to `t_end` with spacing at most `step`.
pub fn uniform_grid(t0: f64, t_end: f64, step: f64) -> Vec<f64> {
    let n = ((t_end - t0) / step - 1e-9).ceil().max(1.0) as usize;
    let h = (t_end - t0) / n as f64;
    (0..=n)
        .map(|k| if k == n { t_end } else { t0 + k as f64 * h })
        .collect()
}

fn axpy(y: [f64; 4], a: f64, x: [f64; 4]) -> [f64; 4] {
    [
        y[0] + a * x[0],
        y[1] + a * x[1],
        y[2] + a * x[2],
        y[3] + a * x[3],
    ]
}

/// Classical RK4 for `q′ = M(t)q` on the grid from [`uniform_grid`].
pub fn oracle_integrate(
    c: &CoefficientSet,
    t0: f64,
    t_end: f64,
    q0: Quaternion,
    step: f64,
) -> Result<Trajectory> {
    oracle_integrate_forced(c, None, t0, t_end, q0, step)
}

/// As [`oracle_integrate`] for `q′ = M(t)q + f(t)`.
pub fn oracle_integrate_forced(
    c: &CoefficientSet,
    forcing: Option<&Forcing>,
    t0: f64,
    t_end: f64,
    q0: Quaternion,
    step: f64,
) -> Result<Trajectory> {
    if !(step > 0.0) || !(t_end > t0) {
        return Err(Error::InvalidArgument(format!(
            "oracle needs step > 0 and t_end > t0 (got step {step}, [{t0}, {t_end}])"
        )));
    }
    let rhs = |t: f64, v: [f64; 4]| -> Result<[f64; 4]> {
        let mv = build_matrix(c, t)?.apply(v);
        Ok(match forcing {
            Some(f) => axpy(mv, 1.0, f.eval(t)?.to_array()),
            None => mv,
        })
    };
    let times = uniform_grid(t0, t_end, step);
    let mut states = Vec::with_capacity(times.len());
    let mut v = q0.to_array();
    states.push(q0);
    for pair in times.windows(2) {
        let (t, h) = (pair[0], pair[1] - pair[0]);
        let k1 = rhs(t, v)?;
        let k2 = rhs(t + 0.5 * h, axpy(v, 0.5 * h, k1))?;
        let k3 = rhs(t + 0.5 * h, axpy(v, 0.5 * h, k2))?;
        let k4 = rhs(t + h, axpy(v, h, k3))?;
        for i in 0..4 {
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let q = Quaternion::from_array(v);
        if !q.is_finite() {
            return Err(Error::Blowup { t: pair[1] });
        }
        states.push(q);
    }
    Ok(Trajectory::new(times, states))
}

/// Per-node `‖q′ − a(t)q − f(t)‖` with a central difference for `q′`;
/// `None` at the two endpoints.
pub fn residuals(
    traj: &Trajectory,
    c: &CoefficientSet,
    forcing: Option<&Forcing>,
) -> Result<Vec<Option<f64>>> {
    let n = traj.len();
    let mut out = vec![None; n];
    for (k, slot) in out.iter_mut().enumerate().take(n.saturating_sub(1)).skip(1) {
        let dt = traj.times[k + 1] - traj.times[k - 1];
        let derivative = (traj.states[k + 1] - traj.states[k - 1]).scale(1.0 / dt);
        let t = traj.times[k];
        let mut rhs = c.eval(t)? * traj.states[k];
        if let Some(f) = forcing {
            rhs = rhs + f.eval(t)?;
        }
        *slot = Some((derivative - rhs).norm());
    }
    Ok(out)
}

/// Largest interior residual of `q′ = a(t)q`.
pub fn residual(traj: &Trajectory, c: &CoefficientSet) -> Result<f64> {
    residual_forced(traj, c, None)
}

pub fn residual_forced(
    traj: &Trajectory,
    c: &CoefficientSet,
    forcing: Option<&Forcing>,
) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument(
            "residual needs at least three nodes".into(),
        ));
    }
    Ok(residuals(traj, c, forcing)?
        .into_iter()
        .flatten()
        .fold(0.0, f64::max))
}
