//! Phase-angle form of unit quaternions: `q = e^{iθ₁} e^{jθ₂} e^{kθ₃}` with
//! `(θ₁, θ₂, θ₃) ∈ (−π, π] × [−π/4, π/4] × (−π/2, π/2]`.
//!
//! The representation is unique away from `θ₂ = ±π/4`. On those two circles
//! only `θ₁ ± θ₃` is determined and we fix `θ₃ = 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quat::{Axis, Quaternion};

/// Half-width of the band around `|sin 2θ₂| = 1` treated as singular.
pub const SINGULAR_EPS: f64 = 1e-9;
/// Allowed deviation of `‖q‖` from 1 in [`decompose`].
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseTriple {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl PhaseTriple {
    pub const ZERO: PhaseTriple = PhaseTriple::new(0.0, 0.0, 0.0);

    pub const fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta3,
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }

    pub fn norm(self) -> f64 {
        (self.theta1 * self.theta1 + self.theta2 * self.theta2 + self.theta3 * self.theta3).sqrt()
    }

    pub fn in_canonical_range(self) -> bool {
        self.theta1 > -PI
            && self.theta1 <= PI
            && self.theta2.abs() <= FRAC_PI_4
            && self.theta3 > -FRAC_PI_2
            && self.theta3 <= FRAC_PI_2
    }
}

/// `e^{iθ₁} e^{jθ₂} e^{kθ₃}`; any angles are accepted.
pub fn compose(p: PhaseTriple) -> Quaternion {
    Quaternion::axis_exp(Axis::I, p.theta1)
        * Quaternion::axis_exp(Axis::J, p.theta2)
        * Quaternion::axis_exp(Axis::K, p.theta3)
}

/// Piecewise arctangent:
///
/// * `arctan(b/a)` for `a > 0`
/// * `±π/2` for `a = 0` (sign of `b`)
/// * `arctan(b/a) − π` for `a < 0, b < 0`
/// * `arctan(b/a) + π` for `a < 0, b ≥ 0`
pub fn atan2x(b: f64, a: f64) -> Result<f64> {
    if a > 0.0 {
        Ok((b / a).atan())
    } else if a == 0.0 {
        if b > 0.0 {
            Ok(FRAC_PI_2)
        } else if b < 0.0 {
            Ok(-FRAC_PI_2)
        } else {
            Err(Error::BothZero)
        }
    } else if b < 0.0 {
        Ok((b / a).atan() - PI)
    } else {
        Ok((b / a).atan() + PI)
    }
}

/// Shift by multiples of 2π into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut x = theta % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Phase triple of a unit quaternion.
pub fn decompose(q: Quaternion) -> Result<PhaseTriple> {
    let norm = q.norm();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::NotUnit { norm });
    }
    let Quaternion { w, x, y, z } = q;
    let sin2 = (2.0 * (w * y + x * z)).clamp(-1.0, 1.0);

    if sin2 >= 1.0 - SINGULAR_EPS {
        let theta1 = atan2x(w + x + y + z, w - x + y - z)? - FRAC_PI_4;
        return Ok(PhaseTriple::new(wrap_angle(theta1), FRAC_PI_4, 0.0));
    }
    if sin2 <= -1.0 + SINGULAR_EPS {
        let theta1 = atan2x(w + x - y - z, w - x - y + z)? - FRAC_PI_4;
        return Ok(PhaseTriple::new(wrap_angle(theta1), -FRAC_PI_4, 0.0));
    }

    let theta2 = 0.5 * sin2.asin();
    let theta3 = 0.5 * atan2x(2.0 * (w * z - x * y), w * w + x * x - y * y - z * z)?;
    let theta1 = atan2x(w + x + y + z, w - x + y - z)? - FRAC_PI_4 - theta3;
    Ok(PhaseTriple::new(wrap_angle(theta1), theta2, theta3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compose_examples() {
        assert_eq!(compose(PhaseTriple::ZERO), Quaternion::ONE);
        assert!(compose(PhaseTriple::new(FRAC_PI_2, 0.0, 0.0)).distance(Quaternion::I) < 1e-15);
        let p = PhaseTriple::new(PI / 6.0, PI / 8.0, -PI / 5.0);
        let q = compose(p);
        assert!((q.norm() - 1.0).abs() < 1e-15);
        let expected = Quaternion::new((PI / 6.0).cos(), (PI / 6.0).sin(), 0.0, 0.0)
            * Quaternion::new((PI / 8.0).cos(), 0.0, (PI / 8.0).sin(), 0.0)
            * Quaternion::new((PI / 5.0).cos(), 0.0, 0.0, -(PI / 5.0).sin());
        assert!(q.distance(expected) < 1e-15);
        let back = decompose(q).unwrap();
        assert!((back.theta1 - p.theta1).abs() < 1e-12);
        assert!((back.theta2 - p.theta2).abs() < 1e-12);
        assert!((back.theta3 - p.theta3).abs() < 1e-12);
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(Quaternion::ONE).unwrap(), PhaseTriple::ZERO);
        let p = decompose(Quaternion::I).unwrap();
        assert!((p.theta1 - FRAC_PI_2).abs() < 1e-15 && p.theta2 == 0.0 && p.theta3 == 0.0);
        assert!(compose(p).distance(Quaternion::I) < 1e-12);
    }

    #[test]
    fn singular_convention() {
        let q = compose(PhaseTriple::new(PI / 6.0, FRAC_PI_4, 0.0));
        let p = decompose(q).unwrap();
        assert_eq!(p.theta2, FRAC_PI_4);
        assert_eq!(p.theta3, 0.0);
        assert!((p.theta1 - PI / 6.0).abs() < 1e-12);
        assert!(compose(p).distance(q) < 1e-12);

        let q = compose(PhaseTriple::new(0.4, -FRAC_PI_4, 1.1));
        let p = decompose(q).unwrap();
        assert_eq!((p.theta2, p.theta3), (-FRAC_PI_4, 0.0));
        assert!((p.theta1 - (0.4 - 1.1)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit() {
        assert!(matches!(
            decompose(Quaternion::new(2.0, 0.0, 0.0, 0.0)),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn atan2x_branches() {
        assert!((atan2x(1.0, 1.0).unwrap() - FRAC_PI_4).abs() < 1e-16);
        assert_eq!(atan2x(1.0, 0.0).unwrap(), FRAC_PI_2);
        assert_eq!(atan2x(-2.0, 0.0).unwrap(), -FRAC_PI_2);
        assert!((atan2x(-1.0, -1.0).unwrap() + 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((atan2x(0.0, -1.0).unwrap() - PI).abs() < 1e-16);
        assert_eq!(atan2x(0.0, 0.0), Err(Error::BothZero));
        for (b, a) in [(0.3, -2.0), (-0.7, 0.1), (5.0, -0.01), (-1e-3, -4.0)] {
            assert!((atan2x(b, a).unwrap() - f64::atan2(b, a)).abs() < 1e-15);
        }
    }

    #[test]
    fn wrap_into_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-7.0) - (-7.0 + 2.0 * PI)).abs() < 1e-15);
    }

    fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |c| c.iter().map(|v| v * v).sum::<f64>() > 1e-4)
            .prop_map(|c| {
                let q = Quaternion::from_array(c);
                q.scale(1.0 / q.norm())
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_000))]

        #[test]
        fn round_trip_outside_singular_band(q in unit_quaternion()) {
            prop_assume!((2.0 * (q.w * q.y + q.x * q.z)).abs() <= 0.99);
            let p = decompose(q).unwrap();
            prop_assert!(p.in_canonical_range(), "{:?}", p);
            prop_assert!(compose(p).distance(q) <= 1e-10);
        }

        #[test]
        fn output_always_in_range(q in unit_quaternion()) {
            let p = decompose(q).unwrap();
            prop_assert!(p.in_canonical_range(), "{:?}", p);
        }

        #[test]
        fn singular_round_trip(t1 in -PI..PI, t3 in -PI..PI, sign in prop::bool::ANY) {
            let t2 = if sign { FRAC_PI_4 } else { -FRAC_PI_4 };
            let q = compose(PhaseTriple::new(t1, t2, t3));
            let p = decompose(q).unwrap();
            prop_assert_eq!(p.theta3, 0.0);
            prop_assert_eq!(p.theta2, t2);
            prop_assert!(compose(p).distance(q) <= 1e-10);
        }
    }
}
