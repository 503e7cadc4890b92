//! Solvers for the linear quaternion differential equation
//! `q′(t) = a(t) q(t) (+ f(t))`.
//!
//! * [`commutativity`] detects coefficients whose imaginary part keeps a
//!   fixed direction and solves them with a quaternion exponential.
//! * [`decisive`] handles the general case by writing the unit solution as
//!   `e^{iθ₁}e^{jθ₂}e^{kθ₃}` and solving a real 3-D system for the phases.
//! * [`oracle`] integrates the equivalent 4-D real system with RK4 and is
//!   used to cross-check the other two.
//! * [`driver`] chooses between them.

// Negated comparisons reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod commutativity;
pub mod decisive;
pub mod driver;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod phase;
pub mod quadrature;
pub mod quat;

pub use coeffs::{CoefficientSet, Forcing};
pub use driver::{solve, Method, Problem, SolveReport, Strategy};
pub use error::{Error, Result};
pub use oracle::Trajectory;
pub use phase::PhaseTriple;
pub use quat::{PureVec, Quaternion};
