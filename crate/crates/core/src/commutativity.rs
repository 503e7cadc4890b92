//! Detection of the commutative case `a(t)A(t) = A(t)a(t)` and its
//! closed-form exponential solutions.
//!
//! The coefficient commutes with its antiderivative exactly when the
//! imaginary components `a₁ : a₂ : a₃` keep a fixed ratio, i.e. `a̲(t)` stays
//! on one line through the origin. Along that line a unit pure quaternion
//! `I` plays the role of the complex unit and the solution is an ordinary
//! exponential.

use crate::coeffs::{CoefficientSet, Forcing};
use crate::error::{Error, Result};
use crate::quadrature::composite_simpson;
use crate::quat::{PureVec, Quaternion};

pub const DEFAULT_SAMPLES: usize = 257;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalityReport {
    pub is_proportional: bool,
    /// Unit direction of `a̲`, or zero when `a̲` vanishes on the grid.
    pub direction: PureVec,
    /// Largest `‖a̲(t) × direction‖ / max(1, ‖a̲(t)‖)` on the grid.
    pub max_deviation: f64,
    pub degenerate: bool,
    pub grid: Vec<f64>,
}

impl ProportionalityReport {
    pub fn unit(&self) -> Option<ComplexLikeUnit> {
        ComplexLikeUnit::new(self.direction)
    }
}

/// A unit pure quaternion `I`; `span{1, I}` is a field isomorphic to ℂ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLikeUnit(PureVec);

impl ComplexLikeUnit {
    /// Normalises `v`; `None` for the zero vector.
    pub fn new(v: PureVec) -> Option<Self> {
        v.normalized().map(ComplexLikeUnit)
    }

    pub fn vector(self) -> PureVec {
        self.0
    }

    pub fn quaternion(self) -> Quaternion {
        self.0.to_quaternion()
    }

    /// `re + im·I`.
    pub fn element(self, re: f64, im: f64) -> Quaternion {
        Quaternion::from_parts(re, self.0.scale(im))
    }

    /// Component of `q` orthogonal to `span{1, I}`.
    pub fn off_field(self, q: Quaternion) -> PureVec {
        let v = q.vector();
        v - self.0.scale(v.dot(self.0))
    }
}

fn uniform_grid(t0: f64, t_end: f64, n: usize) -> Vec<f64> {
    let h = (t_end - t0) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { t_end } else { t0 + k as f64 * h })
        .collect()
}

/// Decide whether `a₁ : a₂ : a₃` is constant on a uniform grid.
///
/// The candidate direction is the largest-norm sample, so no ratio is ever
/// formed. If every sample has norm at most `tol` the coefficients are
/// reported proportional and degenerate.
pub fn check_proportionality(
    c: &CoefficientSet,
    t0: f64,
    t_end: f64,
    n_samples: usize,
    tol: f64,
) -> Result<ProportionalityReport> {
    if n_samples < 8 || !(t0 < t_end) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "proportionality check needs n_samples >= 8, t0 < t_end, tol > 0 (got {n_samples}, [{t0}, {t_end}], {tol})"
        )));
    }
    let grid = uniform_grid(t0, t_end, n_samples);
    let samples = grid
        .iter()
        .map(|&t| c.eval_vector(t))
        .collect::<Result<Vec<_>>>()?;

    let largest = samples
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(PureVec::ZERO);
    if largest.norm() <= tol {
        return Ok(ProportionalityReport {
            is_proportional: true,
            direction: PureVec::ZERO,
            max_deviation: 0.0,
            degenerate: true,
            grid,
        });
    }
    let direction = largest.scale(1.0 / largest.norm());
    let max_deviation = samples
        .iter()
        .map(|v| v.cross(direction).norm() / v.norm().max(1.0))
        .fold(0.0, f64::max);
    Ok(ProportionalityReport {
        is_proportional: max_deviation <= tol,
        direction,
        max_deviation,
        degenerate: false,
        grid,
    })
}

/// `‖a(t)A(t) − A(t)a(t)‖`, the defect of the commutativity property.
pub fn commutation_defect(c: &CoefficientSet, t: f64) -> Result<f64> {
    let a = c.eval(t)?;
    let big_a = c.antiderivative_quaternion(t)?;
    Ok((a * big_a - big_a * a).norm())
}

/// Exponent `A(t) − A(t0)` of the commutative solution, projected onto
/// `span{1, I}`; with no direction (degenerate case) the raw antiderivative
/// difference is used.
fn exponent(
    c: &CoefficientSet,
    t0: f64,
    t: f64,
    dir: Option<ComplexLikeUnit>,
) -> Result<Quaternion> {
    let scalar = c.integral_between(0, t0, t)?;
    let v = PureVec::new(
        c.integral_between(1, t0, t)?,
        c.integral_between(2, t0, t)?,
        c.integral_between(3, t0, t)?,
    );
    Ok(match dir {
        Some(unit) => unit.element(scalar, v.dot(unit.vector())),
        None => Quaternion::from_parts(scalar, v),
    })
}

/// `exp(A₀(t) + I·G(t)) · q0` with `G(t) = ∫₀ᵗ a̲(s)·I ds`.
pub fn commutative_solve(
    c: &CoefficientSet,
    q0: Quaternion,
    t: f64,
    dir: PureVec,
) -> Result<Quaternion> {
    commutative_solve_from(c, 0.0, q0, t, dir)
}

/// As [`commutative_solve`] with the initial value given at `t0`.
pub fn commutative_solve_from(
    c: &CoefficientSet,
    t0: f64,
    q0: Quaternion,
    t: f64,
    dir: PureVec,
) -> Result<Quaternion> {
    let e = exponent(c, t0, t, ComplexLikeUnit::new(dir))?;
    e.exp().checked_mul(q0)
}

const VOC_MIN_PANELS: usize = 16;
const VOC_MAX_PANELS: usize = 1 << 20;
const VOC_TOL: f64 = 1e-9;

/// Nonhomogeneous commutative case `q′ = a(t)q + f(t)`:
///
/// `q(t) = exp(A(t) − A(t0)) { q0 + ∫_{t0}^{t} exp(A(t0) − A(s)) f(s) ds }`.
///
/// The panel count doubles until the integral moves by less than `1e-9`.
pub fn variation_of_constants(
    c: &CoefficientSet,
    f: &Forcing,
    q0: Quaternion,
    t: f64,
    dir: PureVec,
) -> Result<Quaternion> {
    variation_of_constants_from(c, f, 0.0, q0, t, dir)
}

pub fn variation_of_constants_from(
    c: &CoefficientSet,
    f: &Forcing,
    t0: f64,
    q0: Quaternion,
    t: f64,
    dir: PureVec,
) -> Result<Quaternion> {
    let unit = ComplexLikeUnit::new(dir);
    let propagator = exponent(c, t0, t, unit)?.exp();
    if t == t0 {
        return Ok(q0);
    }
    propagator.checked_mul(q0 + voc_integral(c, f, t0, t0, t, unit)?)
}

/// [`variation_of_constants_from`] on an increasing grid starting at `t0`,
/// accumulating the integral cell by cell.
pub fn variation_of_constants_grid(
    c: &CoefficientSet,
    f: &Forcing,
    t0: f64,
    q0: Quaternion,
    times: &[f64],
    dir: PureVec,
) -> Result<Vec<Quaternion>> {
    let unit = ComplexLikeUnit::new(dir);
    let mut acc = Quaternion::ZERO;
    let mut prev = t0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < prev {
            return Err(Error::InvalidArgument(
                "grid must be increasing from t0".into(),
            ));
        }
        if t > prev {
            acc = acc + voc_integral(c, f, t0, prev, t, unit)?;
        }
        prev = t;
        out.push(exponent(c, t0, t, unit)?.exp().checked_mul(q0 + acc)?);
    }
    Ok(out)
}

/// `∫_a^b exp(A(t0) − A(s)) f(s) ds`; the panel count doubles until the
/// value moves by less than `1e-9`.
fn voc_integral(
    c: &CoefficientSet,
    f: &Forcing,
    t0: f64,
    a: f64,
    b: f64,
    unit: Option<ComplexLikeUnit>,
) -> Result<Quaternion> {
    let integrand = |s: f64| -> Result<Quaternion> {
        let back = (-exponent(c, t0, s, unit)?).exp();
        Ok(back * f.eval(s)?)
    };
    let mut panels = VOC_MIN_PANELS;
    let mut prev: Quaternion = composite_simpson(integrand, a, b, panels)?;
    loop {
        panels *= 2;
        let next: Quaternion = composite_simpson(integrand, a, b, panels)?;
        if next.distance(prev) < VOC_TOL {
            return Ok(next);
        }
        if panels >= VOC_MAX_PANELS {
            return Err(Error::QuadratureNoConvergence {
                a,
                b,
                depth: panels.trailing_zeros(),
            });
        }
        prev = next;
    }
}
