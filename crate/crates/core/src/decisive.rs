//! Phase-angle solver for `y′ = a̲(t)y`.
//!
//! A unit solution `q(t) = e^{iθ₁}e^{jθ₂}e^{kθ₃}` with `q(t₀) = 1` satisfies
//! `q′ = a̲q` when the phases solve the real system
//!
//! ```text
//! θ₁′ = a₁ + sin2θ₁·tan2θ₂·a₂ − cos2θ₁·tan2θ₂·a₃
//! θ₂′ = cos2θ₁·a₂ + sin2θ₁·a₃
//! θ₃′ = (−sin2θ₁·a₂ + cos2θ₁·a₃) / cos2θ₂
//! ```
//!
//! with `θ(t₀) = 0`. It is solved by Picard iteration on windows short
//! enough that the iterates stay in a ball of radius `b < π/4`; windows are
//! chained by right multiplication, since `q(t)C` solves the same equation
//! for any constant `C`.

use std::f64::consts::FRAC_PI_4;

use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};
use crate::oracle::Trajectory;
use crate::phase::{compose, PhaseTriple};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL};
use crate::quat::Quaternion;

/// `θ₂` this close to `±π/4` is treated as singular.
const SINGULAR_MARGIN: f64 = 1e-12;
/// Segments shorter than this are reported as stalled.
const MIN_SEGMENT: f64 = 1e-8;
/// How many times a window is halved after its iterate leaves the box.
const MAX_WINDOW_RETRIES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Radius `b` of the ball the phases must stay in; `0 < b < π/4`.
    pub box_radius: f64,
    /// Time radius `a` bounding each window.
    pub time_radius: f64,
    /// Quadrature step for iterates. `None` uses `nodes_per_window` nodes.
    pub grid_step: Option<f64>,
    pub nodes_per_window: usize,
    /// Sup-norm change between iterates at which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// A segment is cut where `|θ₂|` reaches this value.
    pub theta2_guard: f64,
    /// `h = min(a, safety · b / M)`.
    pub safety: f64,
    /// Time samples used when estimating `M`.
    pub time_samples: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            box_radius: FRAC_PI_4 - 0.1,
            time_radius: 1.0,
            grid_step: None,
            nodes_per_window: 2048,
            tol: 1e-11,
            max_iter: 200,
            theta2_guard: FRAC_PI_4 - 0.1,
            safety: 0.9,
            time_samples: 64,
        }
    }
}

impl PicardConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.box_radius > 0.0
            && self.box_radius < FRAC_PI_4
            && self.time_radius > 0.0
            && self.tol > 0.0
            && self.max_iter > 0
            && self.nodes_per_window >= 2
            && self.theta2_guard > 0.0
            && self.theta2_guard < FRAC_PI_4
            && self.safety > 0.0
            && self.safety <= 1.0
            && self.time_samples >= 2
            && self.grid_step.is_none_or(|s| s > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid Picard configuration {self:?}"
            )))
        }
    }
}

/// Right-hand side of the phase system for given imaginary coefficients.
pub fn phase_rhs(a: [f64; 3], theta: PhaseTriple) -> Result<[f64; 3]> {
    if !(theta.theta2.abs() < FRAC_PI_4 - SINGULAR_MARGIN) {
        return Err(Error::SingularTheta2 {
            theta2: theta.theta2,
        });
    }
    let [a1, a2, a3] = a;
    let (s1, c1) = (2.0 * theta.theta1).sin_cos();
    let (s2, c2) = (2.0 * theta.theta2).sin_cos();
    let tan2 = s2 / c2;
    Ok([
        a1 + s1 * tan2 * a2 - c1 * tan2 * a3,
        c1 * a2 + s1 * a3,
        (-s1 * a2 + c1 * a3) / c2,
    ])
}

/// `f(t, θ)` of the decisive equation.
pub fn decisive_rhs(t: f64, theta: PhaseTriple, c: &CoefficientSet) -> Result<[f64; 3]> {
    let a = c.eval_vector(t)?;
    phase_rhs([a.x, a.y, a.z], theta)
}

/// Inverse map: the imaginary coefficients implied by phases and their rates.
pub fn coefficients_from_phase_rates(theta: PhaseTriple, rates: [f64; 3]) -> [f64; 3] {
    let [d1, d2, d3] = rates;
    let (s1, c1) = (2.0 * theta.theta1).sin_cos();
    let (s2, c2) = (2.0 * theta.theta2).sin_cos();
    [d1 + d3 * s2, d2 * c1 - d3 * s1 * c2, d2 * s1 + d3 * c1 * c2]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Bound `M` on `‖f‖` and the resulting window length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardWindow {
    pub max_rhs: f64,
    pub h: f64,
}

/// Estimate `M = max ‖f(t, θ)‖` over `[t0, t0 + a]` × box and set
/// `h = min(a, safety · b / M)`.
///
/// `f` does not depend on `θ₃`; `(θ₁, θ₂)` run over a 5 × 5 lattice of the
/// cube `[−b, b]²`, which contains its corners and centre.
pub fn picard_window(c: &CoefficientSet, t0: f64, cfg: &PicardConfig) -> Result<PicardWindow> {
    cfg.validate()?;
    let b = cfg.box_radius;
    let levels = [-b, -0.5 * b, 0.0, 0.5 * b, b];
    let mut max_rhs: f64 = 0.0;
    for k in 0..cfg.time_samples {
        let t = t0 + cfg.time_radius * k as f64 / (cfg.time_samples - 1) as f64;
        let a = c.eval_vector(t)?;
        for &th1 in &levels {
            for &th2 in &levels {
                let f = phase_rhs([a.x, a.y, a.z], PhaseTriple::new(th1, th2, 0.0))?;
                max_rhs = max_rhs.max(norm3(f));
            }
        }
    }
    let h = if max_rhs > 0.0 {
        cfg.time_radius.min(cfg.safety * b / max_rhs)
    } else {
        cfg.time_radius
    };
    Ok(PicardWindow { max_rhs, h })
}

/// Converged Picard iterate on one window.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub times: Vec<f64>,
    pub thetas: Vec<PhaseTriple>,
    pub iterations: usize,
    /// Sup-norm change of each iteration.
    pub increments: Vec<f64>,
    pub window: PicardWindow,
    /// Largest `‖θ‖` reached by any iterate.
    pub max_radius: f64,
}

/// Picard iteration for the phases on `[t0, t0 + h]`, `θ(t0) = 0`.
pub fn picard_solve(c: &CoefficientSet, t0: f64, cfg: &PicardConfig) -> Result<PicardRun> {
    let window = picard_window(c, t0, cfg)?;
    picard_iterate(c, t0, window.h, window, cfg)
}

fn picard_iterate(
    c: &CoefficientSet,
    t0: f64,
    len: f64,
    window: PicardWindow,
    cfg: &PicardConfig,
) -> Result<PicardRun> {
    let nodes = match cfg.grid_step {
        Some(step) => ((len / step).ceil() as usize).max(2),
        None => cfg.nodes_per_window,
    };
    let dt = len / nodes as f64;
    let times: Vec<f64> = (0..=nodes)
        .map(|k| {
            if k == nodes {
                t0 + len
            } else {
                t0 + k as f64 * dt
            }
        })
        .collect();
    let coeffs = times
        .iter()
        .map(|&t| c.eval_vector(t).map(|v| [v.x, v.y, v.z]))
        .collect::<Result<Vec<_>>>()?;

    let radius_limit = cfg.box_radius * (1.0 + 1e-12);
    let mut current = vec![[0.0f64; 3]; nodes + 1];
    let mut next = vec![[0.0f64; 3]; nodes + 1];
    let mut rates = vec![[0.0f64; 3]; nodes + 1];
    let mut increments = Vec::new();
    let mut max_radius: f64 = 0.0;

    for iteration in 1..=cfg.max_iter {
        for k in 0..=nodes {
            rates[k] = phase_rhs(coeffs[k], PhaseTriple::from_array(current[k]))?;
        }
        let mut change: f64 = 0.0;
        for k in 1..=nodes {
            let h = times[k] - times[k - 1];
            for i in 0..3 {
                next[k][i] = next[k - 1][i] + 0.5 * h * (rates[k - 1][i] + rates[k][i]);
            }
            let r = norm3(next[k]);
            if r > radius_limit {
                return Err(Error::EscapedBox {
                    t: times[k],
                    radius: cfg.box_radius,
                });
            }
            max_radius = max_radius.max(r);
            let d = [
                next[k][0] - current[k][0],
                next[k][1] - current[k][1],
                next[k][2] - current[k][2],
            ];
            change = change.max(norm3(d));
        }
        std::mem::swap(&mut current, &mut next);
        increments.push(change);
        if change <= cfg.tol {
            return Ok(PicardRun {
                thetas: current.into_iter().map(PhaseTriple::from_array).collect(),
                times,
                iterations: iteration,
                increments,
                window,
                max_radius,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        last_change: increments.last().copied().unwrap_or(f64::NAN),
    })
}

/// One Picard window of a chained solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub times: Vec<f64>,
    pub thetas: Vec<PhaseTriple>,
    /// Accumulated unit solution at `t_start`.
    pub anchor: Quaternion,
    pub iterations: usize,
    pub increments: Vec<f64>,
    pub window: PicardWindow,
}

impl Segment {
    /// Linearly interpolated phases.
    pub fn phases_at(&self, t: f64) -> PhaseTriple {
        let idx = self.times.partition_point(|&s| s <= t);
        if idx == 0 {
            return self.thetas[0];
        }
        if idx >= self.times.len() {
            return *self.thetas.last().unwrap();
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let w = (t - t0) / (t1 - t0);
        let (p, q) = (self.thetas[idx - 1].to_array(), self.thetas[idx].to_array());
        PhaseTriple::new(
            p[0] + w * (q[0] - p[0]),
            p[1] + w * (q[1] - p[1]),
            p[2] + w * (q[2] - p[2]),
        )
    }

    /// Unit solution `Y(t)` with `Y(t0 of the whole solve) = 1`.
    pub fn unit_solution(&self, t: f64) -> Quaternion {
        compose(self.phases_at(t)) * self.anchor
    }
}

/// Chained Picard solution of `y′ = a̲(t)y`, `y(t0) = q0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedSolution {
    pub q0: Quaternion,
    pub segments: Vec<Segment>,
}

impl SegmentedSolution {
    pub fn t0(&self) -> f64 {
        self.segments[0].t_start
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().unwrap().t_end
    }

    fn segment_for(&self, t: f64) -> &Segment {
        let idx = self.segments.partition_point(|s| s.t_end < t);
        &self.segments[idx.min(self.segments.len() - 1)]
    }

    /// `q(t) = compose(θ_seg(t)) · anchor_seg · q0`.
    pub fn eval(&self, t: f64) -> Quaternion {
        self.segment_for(t).unit_solution(t) * self.q0
    }

    pub fn sample(&self, times: &[f64]) -> Trajectory {
        Trajectory::new(
            times.to_vec(),
            times.iter().map(|&t| self.eval(t)).collect(),
        )
    }

    pub fn picard_iterations(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.iterations).collect()
    }

    /// Quaternion value at every internal Picard node.
    pub fn node_trajectory(&self) -> Trajectory {
        let mut times = Vec::new();
        let mut states = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let skip = usize::from(i > 0);
            for (t, th) in seg.times.iter().zip(&seg.thetas).skip(skip) {
                times.push(*t);
                states.push(compose(*th) * seg.anchor * self.q0);
            }
        }
        Trajectory::new(times, states)
    }
}

/// Chain Picard windows from `t0` to `t_end`. Only `a₁, a₂, a₃` are used.
///
/// A window whose iterate leaves the box is halved and retried.
pub fn solve_segmented(
    c: &CoefficientSet,
    t0: f64,
    t_end: f64,
    q0: Quaternion,
    cfg: &PicardConfig,
) -> Result<SegmentedSolution> {
    if !(t_end > t0) {
        return Err(Error::InvalidArgument(format!(
            "t_end ({t_end}) must exceed t0 ({t0})"
        )));
    }
    cfg.validate()?;
    let end_slack = 1e-13 * t_end.abs().max(1.0);
    let mut segments = Vec::new();
    let mut anchor = Quaternion::ONE;
    let mut t = t0;
    while t_end - t > end_slack {
        // sample M only inside the problem interval
        let local = PicardConfig {
            time_radius: cfg.time_radius.min(t_end - t),
            ..cfg.clone()
        };
        let window = picard_window(c, t, &local)?;
        let mut len = window.h.min(t_end - t);
        let mut attempt = 0;
        let run = loop {
            match picard_iterate(c, t, len, window, cfg) {
                Ok(run) => break run,
                Err(Error::EscapedBox { .. } | Error::SingularTheta2 { .. })
                    if attempt < MAX_WINDOW_RETRIES =>
                {
                    attempt += 1;
                    len *= 0.5;
                }
                Err(e) => return Err(e),
            }
        };
        let mut times = run.times;
        let mut thetas = run.thetas;
        if let Some(cut) = thetas
            .iter()
            .position(|th| th.theta2.abs() >= cfg.theta2_guard)
        {
            times.truncate(cut + 1);
            thetas.truncate(cut + 1);
        }
        let seg_end = *times.last().unwrap();
        if seg_end - t < MIN_SEGMENT {
            return Err(Error::StalledSegment { t });
        }
        let next_anchor = compose(*thetas.last().unwrap()) * anchor;
        segments.push(Segment {
            t_start: t,
            t_end: seg_end,
            times,
            thetas,
            anchor,
            iterations: run.iterations,
            increments: run.increments,
            window: run.window,
        });
        anchor = next_anchor;
        t = seg_end;
    }
    Ok(SegmentedSolution { q0, segments })
}

/// General `q′ = a(t)q` via `q(t) = e^{A₀(t) − A₀(t0)} · y(t)` where `y`
/// solves the pure-imaginary problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSplitSolution {
    pub pure: SegmentedSolution,
}

impl ScalarSplitSolution {
    pub fn eval(&self, c: &CoefficientSet, t: f64) -> Result<Quaternion> {
        let growth = c.integral_between(0, self.pure.t0(), t)?.exp();
        Ok(self.pure.eval(t).scale(growth))
    }

    pub fn sample(&self, c: &CoefficientSet, times: &[f64]) -> Result<Trajectory> {
        let states = times
            .iter()
            .map(|&t| self.eval(c, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory::new(times.to_vec(), states))
    }
}

pub fn scalar_split_solve(
    c: &CoefficientSet,
    t0: f64,
    t_end: f64,
    q0: Quaternion,
    cfg: &PicardConfig,
) -> Result<ScalarSplitSolution> {
    Ok(ScalarSplitSolution {
        pure: solve_segmented(c, t0, t_end, q0, cfg)?,
    })
}

/// Closed-form families in which one phase stays at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCaseKind {
    /// `a₁ = a₃ tan 2A₂`: `θ = (0, A₂, ∫a₃ / cos 2A₂)`.
    CaseI,
    /// `a₂ = −a₃ tan 2A₁`: `θ = (A₁, 0, ∫a₃ / cos 2A₁)`.
    CaseII,
    /// `a₃ = a₂ tan 2A₁`: `θ = (A₁, ∫a₂ / cos 2A₁, 0)`.
    CaseIII,
}

impl SpecialCaseKind {
    pub fn label(self) -> &'static str {
        match self {
            SpecialCaseKind::CaseI => "I",
            SpecialCaseKind::CaseII => "II",
            SpecialCaseKind::CaseIII => "III",
        }
    }

    /// Index of the coefficient whose antiderivative is the known phase.
    fn driver(self) -> usize {
        match self {
            SpecialCaseKind::CaseI => 2,
            SpecialCaseKind::CaseII | SpecialCaseKind::CaseIII => 1,
        }
    }

    /// Index of the coefficient integrated against `1 / cos 2A`.
    fn integrated(self) -> usize {
        match self {
            SpecialCaseKind::CaseI | SpecialCaseKind::CaseII => 3,
            SpecialCaseKind::CaseIII => 2,
        }
    }
}

pub const SPECIAL_CASE_SAMPLES: usize = 128;
/// Grid points with `|cos 2A|` below this are skipped by the identity test.
pub const SPECIAL_CASE_POLE_SKIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCase {
    pub kind: SpecialCaseKind,
    pub t0: f64,
}

impl SpecialCase {
    fn driver_phase(&self, c: &CoefficientSet, t: f64) -> Result<f64> {
        c.integral_between(self.kind.driver(), self.t0, t)
    }

    fn integrand(&self, c: &CoefficientSet, s: f64) -> Result<f64> {
        let denom = (2.0 * self.driver_phase(c, s)?).cos();
        if denom == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(c.eval_component(self.kind.integrated(), s)? / denom)
    }

    fn assemble(&self, known: f64, integrated: f64) -> PhaseTriple {
        match self.kind {
            SpecialCaseKind::CaseI => PhaseTriple::new(0.0, known, integrated),
            SpecialCaseKind::CaseII => PhaseTriple::new(known, 0.0, integrated),
            SpecialCaseKind::CaseIII => PhaseTriple::new(known, integrated, 0.0),
        }
    }

    /// Phases at a single time.
    pub fn phases_at(&self, c: &CoefficientSet, t: f64) -> Result<PhaseTriple> {
        let integrated = adaptive_simpson(|s| self.integrand(c, s), self.t0, t, DEFAULT_ABS_TOL)?;
        Ok(self.assemble(self.driver_phase(c, t)?, integrated))
    }

    /// Phases on an increasing grid, integrating cell by cell.
    pub fn phase_trajectory(&self, c: &CoefficientSet, times: &[f64]) -> Result<Vec<PhaseTriple>> {
        let mut out = Vec::with_capacity(times.len());
        let mut acc = 0.0;
        let mut prev = self.t0;
        for &t in times {
            acc += adaptive_simpson(|s| self.integrand(c, s), prev, t, DEFAULT_ABS_TOL)?;
            prev = t;
            out.push(self.assemble(self.driver_phase(c, t)?, acc));
        }
        Ok(out)
    }

    /// `compose(θ(t)) · q0` on the grid; the scalar part of `a` is ignored.
    pub fn solve(&self, c: &CoefficientSet, times: &[f64], q0: Quaternion) -> Result<Trajectory> {
        let states = self
            .phase_trajectory(c, times)?
            .into_iter()
            .map(|th| compose(th) * q0)
            .collect();
        Ok(Trajectory::new(times.to_vec(), states))
    }
}

fn identity_holds(
    c: &CoefficientSet,
    kind: SpecialCaseKind,
    t0: f64,
    grid: &[f64],
    tol: f64,
) -> Result<bool> {
    for &t in grid {
        let a = c.eval_vector(t)?;
        let phase = c.integral_between(kind.driver(), t0, t)?;
        let (s, co) = (2.0 * phase).sin_cos();
        if co.abs() < SPECIAL_CASE_POLE_SKIP {
            continue;
        }
        // identities multiplied through by cos 2A
        let (lhs, rhs) = match kind {
            SpecialCaseKind::CaseI => (a.x * co, a.z * s),
            SpecialCaseKind::CaseII => (a.y * co, -a.z * s),
            SpecialCaseKind::CaseIII => (a.z * co, a.y * s),
        };
        if (lhs - rhs).abs() > tol * a.x.abs().max(a.y.abs()).max(a.z.abs()).max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Test the three closed-form identities, in order I, II, III, on a
/// 128-point grid. Evaluation failures count as no match.
pub fn try_special_case(c: &CoefficientSet, t0: f64, t_end: f64, tol: f64) -> Option<SpecialCase> {
    if !(t_end > t0) || !(tol > 0.0) {
        return None;
    }
    let n = SPECIAL_CASE_SAMPLES;
    let grid: Vec<f64> = (0..n)
        .map(|k| t0 + (t_end - t0) * k as f64 / (n - 1) as f64)
        .collect();
    [
        SpecialCaseKind::CaseI,
        SpecialCaseKind::CaseII,
        SpecialCaseKind::CaseIII,
    ]
    .into_iter()
    .find(|&kind| identity_holds(c, kind, t0, &grid, tol).unwrap_or(false))
    .map(|kind| SpecialCase { kind, t0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Axis;

    fn rotating_frame() -> CoefficientSet {
        CoefficientSet::parse(["0", "sin(2*t)", "1", "cos(2*t)"]).unwrap()
    }

    fn chirp_k() -> CoefficientSet {
        CoefficientSet::parse(["0", "1", "t*sin(2*t)", "-t*cos(2*t)"]).unwrap()
    }

    fn chirp_j() -> CoefficientSet {
        CoefficientSet::parse(["0", "1", "t*cos(2*t)", "t*sin(2*t)"]).unwrap()
    }

    #[test]
    fn rhs_at_origin_reads_coefficients() {
        let c = CoefficientSet::parse(["0", "t", "2*t", "-t"]).unwrap();
        assert_eq!(
            decisive_rhs(1.5, PhaseTriple::ZERO, &c).unwrap(),
            [1.5, 3.0, -1.5]
        );
    }

    #[test]
    fn rhs_along_rotating_frame_solution() {
        let c = rotating_frame();
        for t in [0.1, 0.3, 0.6] {
            let f = decisive_rhs(t, PhaseTriple::new(0.0, t, t), &c).unwrap();
            assert!((f[0]).abs() < 1e-15);
            assert!((f[1] - 1.0).abs() < 1e-15);
            assert!((f[2] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_rejects_singular_theta2() {
        let c = rotating_frame();
        assert!(matches!(
            decisive_rhs(0.0, PhaseTriple::new(0.0, FRAC_PI_4, 0.0), &c),
            Err(Error::SingularTheta2 { .. })
        ));
    }

    #[test]
    fn phase_rates_invert_rhs() {
        let theta = PhaseTriple::new(0.7, -0.3, 1.2);
        let a = [0.4, -1.3, 2.2];
        let rates = phase_rhs(a, theta).unwrap();
        let back = coefficients_from_phase_rates(theta, rates);
        for i in 0..3 {
            assert!((back[i] - a[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_phases() {
        let c = CoefficientSet::parse(["0", "0", "0", "0"]).unwrap();
        let run = picard_solve(&c, 0.0, &PicardConfig::default()).unwrap();
        assert!(run.thetas.iter().all(|th| *th == PhaseTriple::ZERO));
        assert_eq!(run.window.max_rhs, 0.0);
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn picard_matches_chirp_k_phases() {
        let c = chirp_k();
        let run = picard_solve(&c, 0.0, &PicardConfig::default()).unwrap();
        assert!(run.window.h > 0.0);
        for (t, th) in run.times.iter().zip(&run.thetas) {
            assert!((th.theta1 - t).abs() < 1e-9);
            assert!(th.theta2.abs() < 1e-9);
            assert!((th.theta3 + t * t / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn increments_shrink() {
        let run = picard_solve(&chirp_j(), 0.4, &PicardConfig::default()).unwrap();
        for w in run.increments.windows(2).skip(1) {
            assert!(w[1] <= w[0], "{:?}", run.increments);
        }
    }

    #[test]
    fn no_convergence_reported() {
        let cfg = PicardConfig {
            max_iter: 2,
            ..PicardConfig::default()
        };
        assert!(matches!(
            picard_solve(&rotating_frame(), 0.0, &cfg),
            Err(Error::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = PicardConfig {
            box_radius: 0.9,
            ..PicardConfig::default()
        };
        assert!(picard_solve(&rotating_frame(), 0.0, &cfg).is_err());
    }

    #[test]
    fn constant_axis_rotation_across_segments() {
        let c = CoefficientSet::parse(["0", "1", "0", "0"]).unwrap();
        let sol = solve_segmented(&c, 0.0, 4.0, Quaternion::ONE, &PicardConfig::default()).unwrap();
        assert!(sol.segments.len() > 1);
        for k in 0..=40 {
            let t = 0.1 * k as f64;
            let q = sol.eval(t);
            assert!(
                q.distance(Quaternion::new(t.cos(), t.sin(), 0.0, 0.0)) < 1e-9,
                "t = {t}"
            );
        }
    }

    #[test]
    fn segments_join_continuously() {
        let sol = solve_segmented(
            &rotating_frame(),
            0.0,
            3.0,
            Quaternion::J,
            &PicardConfig::default(),
        )
        .unwrap();
        for pair in sol.segments.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert_eq!(a.t_end, b.t_start);
            let left = a.unit_solution(a.t_end);
            let right = b.unit_solution(b.t_start);
            assert!(left.distance(right) < 1e-9);
        }
    }

    #[test]
    fn rotating_frame_and_chirp_j_closed_forms() {
        let cfg = PicardConfig::default();
        let sol = solve_segmented(&rotating_frame(), 0.0, 3.0, Quaternion::ONE, &cfg).unwrap();
        for k in 0..=300 {
            let t = 0.01 * k as f64;
            let exact = Quaternion::axis_exp(Axis::J, t) * Quaternion::axis_exp(Axis::K, t);
            assert!(sol.eval(t).distance(exact) < 1e-6);
        }
        let sol = solve_segmented(&chirp_j(), 0.0, 2.0, Quaternion::ONE, &cfg).unwrap();
        for k in 0..=200 {
            let t = 0.01 * k as f64;
            let exact =
                Quaternion::axis_exp(Axis::I, t) * Quaternion::axis_exp(Axis::J, t * t / 2.0);
            assert!(sol.eval(t).distance(exact) < 1e-6);
        }
    }

    #[test]
    fn window_sampling_stays_inside_interval() {
        let c = CoefficientSet::parse(["0", "sqrt(2 - t)", "0.3", "0"]).unwrap();
        let sol = solve_segmented(&c, 0.0, 2.0, Quaternion::ONE, &PicardConfig::default()).unwrap();
        assert_eq!(sol.t_end(), 2.0);
    }

    #[test]
    fn stalled_and_bad_interval() {
        let c = rotating_frame();
        assert!(solve_segmented(&c, 1.0, 1.0, Quaternion::ONE, &PicardConfig::default()).is_err());
    }

    #[test]
    fn scalar_split_examples() {
        let cfg = PicardConfig::default();
        let c = CoefficientSet::parse(["1", "0", "0", "0"]).unwrap();
        let q0 = Quaternion::new(0.5, -1.0, 2.0, 0.25);
        let sol = scalar_split_solve(&c, 0.5, 1.5, q0, &cfg).unwrap();
        assert!(sol.eval(&c, 1.5).unwrap().distance(q0.scale(1f64.exp())) < 1e-12);

        let c = CoefficientSet::parse(["t", "sin(2*t)", "1", "cos(2*t)"]).unwrap();
        let sol = scalar_split_solve(&c, 0.0, 2.0, Quaternion::ONE, &cfg).unwrap();
        for k in 0..=20 {
            let t = 0.1 * k as f64;
            let norm = sol.eval(&c, t).unwrap().norm();
            assert!((norm / (t * t / 2.0).exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn special_case_detection() {
        assert_eq!(
            try_special_case(&rotating_frame(), 0.0, 3.0, 1e-9).map(|s| s.kind),
            Some(SpecialCaseKind::CaseI)
        );
        assert_eq!(
            try_special_case(&chirp_k(), 0.0, 2.0, 1e-9).map(|s| s.kind),
            Some(SpecialCaseKind::CaseII)
        );
        assert_eq!(
            try_special_case(&chirp_j(), 0.0, 2.0, 1e-9).map(|s| s.kind),
            Some(SpecialCaseKind::CaseIII)
        );
        let generic = CoefficientSet::parse(["0", "1", "1", "1"]).unwrap();
        assert_eq!(try_special_case(&generic, 0.0, 2.0, 1e-9), None);
    }

    #[test]
    fn constant_one_one_one_fails_each_identity_directly() {
        // A₁ = A₂ = t, so Case I needs 1 = tan 2t, Case II needs 1 = −tan 2t,
        // Case III needs 1 = tan 2t; none hold at t = 0.
        for t in [0.0f64, 0.5] {
            assert!((1.0 - (2.0 * t).tan()).abs() > 0.1);
            assert!((1.0 + (2.0 * t).tan()).abs() > 0.1);
        }
    }

    #[test]
    fn special_case_closed_forms() {
        let times: Vec<f64> = (0..=300).map(|k| 0.01 * k as f64).collect();
        let sc = try_special_case(&rotating_frame(), 0.0, 3.0, 1e-9).unwrap();
        let traj = sc
            .solve(&rotating_frame(), &times, Quaternion::ONE)
            .unwrap();
        for (t, q) in traj.times.iter().zip(&traj.states) {
            let exact = Quaternion::axis_exp(Axis::J, *t) * Quaternion::axis_exp(Axis::K, *t);
            assert!(q.distance(exact) < 1e-9, "t = {t}");
        }
        let sc = try_special_case(&chirp_k(), 0.0, 2.0, 1e-9).unwrap();
        let th = sc.phases_at(&chirp_k(), 1.7).unwrap();
        assert!((th.theta1 - 1.7).abs() < 1e-12);
        assert_eq!(th.theta2, 0.0);
        assert!((th.theta3 + 1.7 * 1.7 / 2.0).abs() < 1e-10);
    }
}
