//! Quaternion arithmetic.
//!
//! Scalar-first convention `w + x i + y j + z k` with the Hamilton product
//! `i² = j² = k² = ijk = −1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default tolerance used by comparisons that take one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Imaginary part of a quaternion viewed as a 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PureVec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PureVec {
    pub const ZERO: PureVec = PureVec {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: PureVec) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: PureVec) -> PureVec {
        PureVec {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> PureVec {
        PureVec::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(self) -> Option<PureVec> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }
}

impl Add for PureVec {
    type Output = PureVec;
    fn add(self, rhs: PureVec) -> PureVec {
        PureVec::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for PureVec {
    type Output = PureVec;
    fn sub(self, rhs: PureVec) -> PureVec {
        PureVec::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

/// A real quaternion `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn from_real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_parts(w: f64, v: PureVec) -> Self {
        Self::new(w, v.x, v.y, v.z)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(self) -> PureVec {
        PureVec::new(self.x, self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// `q̄ / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let inv = self.conj().scale(1.0 / n2);
        if inv.is_finite() {
            Ok(inv)
        } else {
            Err(Error::NonFinite("inverse"))
        }
    }

    /// Hamilton product, rejecting non-finite results.
    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        let p = self * rhs;
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::NonFinite("mul"))
        }
    }

    /// `e^{w}(cos|v| + v/|v| sin|v|)`.
    pub fn exp(self) -> Self {
        let scale = self.w.exp();
        let v = self.vector();
        let theta = v.norm();
        if theta == 0.0 {
            return Self::from_real(scale);
        }
        let (s, c) = theta.sin_cos();
        Self::from_parts(scale * c, v.scale(scale * s / theta))
    }

    /// `e^{axis·angle}` for a coordinate axis; exact `cos + axis·sin`.
    pub fn axis_exp(axis: Axis, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        match axis {
            Axis::I => Self::new(c, s, 0.0, 0.0),
            Axis::J => Self::new(c, 0.0, s, 0.0),
            Axis::K => Self::new(c, 0.0, 0.0, s),
        }
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

/// Coordinate imaginary axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    I,
    J,
    K,
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// Whether `p` and `q` commute: their imaginary parts must be parallel,
/// `‖p̲ × q̲‖ ≤ tol · max(1, ‖p̲‖‖q̲‖)`.
pub fn commutes(p: Quaternion, q: Quaternion, tol: f64) -> bool {
    let (pv, qv) = (p.vector(), q.vector());
    pv.cross(qv).norm() <= tol * (pv.norm() * qv.norm()).max(1.0)
}

/// `pq − qp`.
pub fn commutator(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q - q * p
}
