//! Coefficient functions `a(t) = a₀(t) + a₁(t)i + a₂(t)j + a₃(t)k` and their
//! antiderivatives `A_ℓ(t) = ∫₀ᵗ a_ℓ(s) ds`.

use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL};
use crate::quat::{PureVec, Quaternion};

/// Sorted `(t, A(t))` knots; `(0, 0)` is implicit.
#[derive(Debug, Default)]
struct KnotCache {
    knots: Vec<(f64, f64)>,
}

impl KnotCache {
    /// Closest cached knot lying between 0 and `t` (inclusive).
    fn start_for(&self, t: f64) -> (f64, f64) {
        let idx = self.knots.partition_point(|&(s, _)| s <= t);
        if t > 0.0 {
            match idx.checked_sub(1).map(|i| self.knots[i]) {
                Some((s, v)) if s >= 0.0 => (s, v),
                _ => (0.0, 0.0),
            }
        } else {
            // largest negative knot >= t is the first knot at or after t
            let idx = self.knots.partition_point(|&(s, _)| s < t);
            match self.knots.get(idx) {
                Some(&(s, v)) if s <= 0.0 => (s, v),
                _ => (0.0, 0.0),
            }
        }
    }

    fn insert(&mut self, t: f64, value: f64) {
        let idx = self.knots.partition_point(|&(s, _)| s < t);
        if self.knots.get(idx).map(|&(s, _)| s == t) != Some(true) {
            self.knots.insert(idx, (t, value));
        }
    }
}

/// The four coefficient expressions with memoised antiderivatives.
///
/// The caches sit behind mutexes, so a set can be shared between threads.
#[derive(Debug)]
pub struct CoefficientSet {
    exprs: [Expr; 4],
    caches: [Mutex<KnotCache>; 4],
    quad_tol: f64,
}

impl Clone for CoefficientSet {
    fn clone(&self) -> Self {
        Self::new(self.exprs.clone())
    }
}

impl CoefficientSet {
    pub fn new(exprs: [Expr; 4]) -> Self {
        Self {
            exprs,
            caches: Default::default(),
            quad_tol: DEFAULT_ABS_TOL,
        }
    }

    /// Parse the four components `a₀, a₁, a₂, a₃`.
    pub fn parse(sources: [&str; 4]) -> Result<Self> {
        let [a0, a1, a2, a3] = sources;
        Ok(Self::new([parse(a0)?, parse(a1)?, parse(a2)?, parse(a3)?]))
    }

    pub fn expr(&self, index: usize) -> &Expr {
        &self.exprs[index]
    }

    pub fn exprs(&self) -> &[Expr; 4] {
        &self.exprs
    }

    /// Same imaginary part, scalar part replaced by zero.
    pub fn pure_part(&self) -> Self {
        let mut exprs = self.exprs.clone();
        exprs[0] = Expr::constant(0.0);
        Self::new(exprs)
    }

    pub fn eval_component(&self, index: usize, t: f64) -> Result<f64> {
        self.exprs[index].eval(t)
    }

    /// `a(t)` as a quaternion.
    pub fn eval(&self, t: f64) -> Result<Quaternion> {
        Ok(Quaternion::new(
            self.exprs[0].eval(t)?,
            self.exprs[1].eval(t)?,
            self.exprs[2].eval(t)?,
            self.exprs[3].eval(t)?,
        ))
    }

    /// `a̲(t)`.
    pub fn eval_vector(&self, t: f64) -> Result<PureVec> {
        Ok(PureVec::new(
            self.exprs[1].eval(t)?,
            self.exprs[2].eval(t)?,
            self.exprs[3].eval(t)?,
        ))
    }

    /// `A_ℓ(t) = ∫₀ᵗ a_ℓ(s) ds`, with `A_ℓ(0) = 0` exactly.
    ///
    /// Each call integrates only from the nearest previously computed knot,
    /// so sweeping `t` monotonically reuses earlier work.
    pub fn antiderivative(&self, index: usize, t: f64) -> Result<f64> {
        if index > 3 {
            return Err(Error::InvalidArgument(format!(
                "coefficient index {index} out of range"
            )));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {t}")));
        }
        let mut cache = self.caches[index]
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner());
        let (start, base) = cache.start_for(t);
        if start == t {
            return Ok(base);
        }
        let expr = &self.exprs[index];
        let value = base + adaptive_simpson(|s| expr.eval(s), start, t, self.quad_tol)?;
        cache.insert(t, value);
        Ok(value)
    }

    /// `A(t)` as a quaternion.
    pub fn antiderivative_quaternion(&self, t: f64) -> Result<Quaternion> {
        Ok(Quaternion::new(
            self.antiderivative(0, t)?,
            self.antiderivative(1, t)?,
            self.antiderivative(2, t)?,
            self.antiderivative(3, t)?,
        ))
    }

    /// `∫_{t0}^{t} a_ℓ(s) ds`.
    pub fn integral_between(&self, index: usize, t0: f64, t: f64) -> Result<f64> {
        Ok(self.antiderivative(index, t)? - self.antiderivative(index, t0)?)
    }
}

/// Quaternion-valued forcing term `f(t)` of the nonhomogeneous equation.
#[derive(Debug, Clone)]
pub struct Forcing {
    exprs: [Expr; 4],
}

impl Forcing {
    pub fn new(exprs: [Expr; 4]) -> Self {
        Self { exprs }
    }

    pub fn parse(sources: [&str; 4]) -> Result<Self> {
        let [f0, f1, f2, f3] = sources;
        Ok(Self::new([parse(f0)?, parse(f1)?, parse(f2)?, parse(f3)?]))
    }

    pub fn eval(&self, t: f64) -> Result<Quaternion> {
        Ok(Quaternion::new(
            self.exprs[0].eval(t)?,
            self.exprs[1].eval(t)?,
            self.exprs[2].eval(t)?,
            self.exprs[3].eval(t)?,
        ))
    }

    /// True when every component is the literal zero.
    pub fn is_zero(&self) -> bool {
        self.exprs.iter().all(|e| *e == Expr::Num(0.0))
    }
}
