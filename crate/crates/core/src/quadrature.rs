//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Absolute tolerance used for coefficient antiderivatives.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Maximum bisection depth before giving up.
pub const MAX_DEPTH: u32 = 40;
// Intervals are always split at least this many times so that periodic
// integrands sampled at coincident zeros are not accepted prematurely.
const MIN_DEPTH: u32 = 3;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `b < a` is allowed and yields the negated integral.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "quadrature over [{a}, {b}] with tol {tol}"
        )));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, 0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNoConvergence {
            a,
            b,
            depth: MAX_DEPTH,
        });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
}

/// Composite Simpson rule on `n` panels (`n` is rounded up to even).
pub fn composite_simpson<T, F>(f: F, a: f64, b: f64, n: usize) -> Result<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(f64) -> Result<T>,
{
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc + f(a + k as f64 * h)? * w;
    }
    Ok(acc * (h / 3.0))
}
