//! Strategy selection and end-to-end solves.
//!
//! `Method::Auto` tries, in order, the commutative closed form, the
//! special-case closed forms and finally chained Picard iteration with the
//! scalar part split off.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::coeffs::{CoefficientSet, Forcing};
use crate::commutativity::{self, check_proportionality, ProportionalityReport};
use crate::decisive::{
    scalar_split_solve, try_special_case, PicardConfig, SpecialCase, SpecialCaseKind,
};
use crate::error::{Error, Result};
use crate::oracle::{self, oracle_integrate_forced, residuals, uniform_grid, Trajectory};
use crate::quat::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Commutative,
    Special,
    Picard,
    Oracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Ok(match s {
            "auto" => Method::Auto,
            "commutative" => Method::Commutative,
            "special" => Method::Special,
            "picard" => Method::Picard,
            "oracle" => Method::Oracle,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown method `{other}` (expected auto|commutative|special|picard|oracle)"
                )))
            }
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Commutative => "commutative",
            Method::Special => "special",
            Method::Picard => "picard",
            Method::Oracle => "oracle",
        })
    }
}

/// The solver path that produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Commutative { degenerate: bool },
    SpecialCase(SpecialCaseKind),
    Picard,
    Oracle,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Commutative { .. } => f.write_str("commutative"),
            Strategy::SpecialCase(kind) => write!(f, "special-case-{}", kind.label()),
            Strategy::Picard => f.write_str("picard"),
            Strategy::Oracle => f.write_str("oracle"),
        }
    }
}

/// A fully specified initial value problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub coeffs: CoefficientSet,
    pub forcing: Option<Forcing>,
    pub t0: f64,
    pub t_end: f64,
    pub q0: Quaternion,
    pub method: Method,
    /// Output grid spacing; also the oracle step.
    pub step: f64,
    /// Tolerance for the commutativity and special-case tests.
    pub tol: f64,
    pub samples: usize,
    pub picard: PicardConfig,
    pub verify: bool,
}

impl Problem {
    pub fn new(coeffs: CoefficientSet, t0: f64, t_end: f64, q0: Quaternion) -> Self {
        Self {
            coeffs,
            forcing: None,
            t0,
            t_end,
            q0,
            method: Method::Auto,
            step: oracle::DEFAULT_STEP,
            tol: commutativity::DEFAULT_TOL,
            samples: commutativity::DEFAULT_SAMPLES,
            picard: PicardConfig::default(),
            verify: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_end.is_finite() && self.t_end > self.t0) {
            return Err(Error::InvalidArgument(format!(
                "need finite t0 < t_end (got {} and {})",
                self.t0, self.t_end
            )));
        }
        if !self.q0.is_finite() {
            return Err(Error::InvalidArgument(
                "initial quaternion must be finite".into(),
            ));
        }
        if !(self.step > 0.0) || !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(
                "step and tol must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Forcing unless it is absent or identically zero.
    fn active_forcing(&self) -> Option<&Forcing> {
        self.forcing.as_ref().filter(|f| !f.is_zero())
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub strategy: Strategy,
    pub trajectory: Trajectory,
    /// Per-node residual, `None` at the endpoints.
    pub residuals: Vec<Option<f64>>,
    pub max_residual: f64,
    pub segments: usize,
    pub picard_iterations: Vec<usize>,
    pub oracle_deviation: Option<f64>,
    pub wall_time_ms: f64,
}

/// Result of the commutativity and special-case tests, without solving.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub proportionality: ProportionalityReport,
    pub special_case: Option<SpecialCase>,
}

pub fn analyze(p: &Problem) -> Result<Analysis> {
    p.validate()?;
    Ok(Analysis {
        proportionality: check_proportionality(&p.coeffs, p.t0, p.t_end, p.samples, p.tol)?,
        special_case: try_special_case(&p.coeffs, p.t0, p.t_end, p.tol),
    })
}

struct Solved {
    strategy: Strategy,
    trajectory: Trajectory,
    segments: usize,
    picard_iterations: Vec<usize>,
}

fn commutative(p: &Problem, report: &ProportionalityReport, times: &[f64]) -> Result<Solved> {
    let dir = report.direction;
    let states = match p.active_forcing() {
        Some(f) => {
            commutativity::variation_of_constants_grid(&p.coeffs, f, p.t0, p.q0, times, dir)?
        }
        None => times
            .iter()
            .map(|&t| commutativity::commutative_solve_from(&p.coeffs, p.t0, p.q0, t, dir))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Solved {
        strategy: Strategy::Commutative {
            degenerate: report.degenerate,
        },
        trajectory: Trajectory::new(times.to_vec(), states),
        segments: 1,
        picard_iterations: Vec::new(),
    })
}

fn scalar_growth(p: &Problem, t: f64) -> Result<f64> {
    Ok(p.coeffs.integral_between(0, p.t0, t)?.exp())
}

fn special(p: &Problem, sc: &SpecialCase, times: &[f64]) -> Result<Solved> {
    let mut traj = sc.solve(&p.coeffs, times, p.q0)?;
    for (t, q) in traj.times.iter().zip(traj.states.iter_mut()) {
        *q = q.scale(scalar_growth(p, *t)?);
    }
    Ok(Solved {
        strategy: Strategy::SpecialCase(sc.kind),
        trajectory: traj,
        segments: 1,
        picard_iterations: Vec::new(),
    })
}

fn picard(p: &Problem, times: &[f64]) -> Result<Solved> {
    let sol = scalar_split_solve(&p.coeffs, p.t0, p.t_end, p.q0, &p.picard)?;
    Ok(Solved {
        strategy: Strategy::Picard,
        trajectory: sol.sample(&p.coeffs, times)?,
        segments: sol.pure.segments.len(),
        picard_iterations: sol.pure.picard_iterations(),
    })
}

fn forcing_unsupported(strategy: &str) -> Error {
    Error::InvalidArgument(format!(
        "a forcing term is only supported by the commutative and oracle methods, not {strategy}"
    ))
}

fn dispatch(p: &Problem, times: &[f64]) -> Result<Solved> {
    let forced = p.active_forcing().is_some();
    match p.method {
        Method::Oracle => Ok(Solved {
            strategy: Strategy::Oracle,
            trajectory: oracle_integrate_forced(
                &p.coeffs,
                p.active_forcing(),
                p.t0,
                p.t_end,
                p.q0,
                p.step,
            )?,
            segments: 1,
            picard_iterations: Vec::new(),
        }),
        Method::Commutative => {
            let report = check_proportionality(&p.coeffs, p.t0, p.t_end, p.samples, p.tol)?;
            if !report.is_proportional {
                return Err(Error::NotCommutative {
                    max_deviation: report.max_deviation,
                });
            }
            commutative(p, &report, times)
        }
        Method::Special => {
            if forced {
                return Err(forcing_unsupported("special"));
            }
            let sc =
                try_special_case(&p.coeffs, p.t0, p.t_end, p.tol).ok_or(Error::NoSpecialCase)?;
            special(p, &sc, times)
        }
        Method::Picard => {
            if forced {
                return Err(forcing_unsupported("picard"));
            }
            picard(p, times)
        }
        Method::Auto => {
            let report = check_proportionality(&p.coeffs, p.t0, p.t_end, p.samples, p.tol)?;
            if report.is_proportional {
                return commutative(p, &report, times);
            }
            if forced {
                return Err(Error::NotCommutative {
                    max_deviation: report.max_deviation,
                });
            }
            match try_special_case(&p.coeffs, p.t0, p.t_end, p.tol) {
                Some(sc) => special(p, &sc, times),
                None => picard(p, times),
            }
        }
    }
}

/// Solve on the uniform output grid of spacing `p.step`.
pub fn solve(p: &Problem) -> Result<SolveReport> {
    p.validate()?;
    let start = Instant::now();
    let times = uniform_grid(p.t0, p.t_end, p.step);
    let solved = dispatch(p, &times)?;
    let forcing = p.active_forcing();
    let residuals = residuals(&solved.trajectory, &p.coeffs, forcing)?;
    let max_residual = residuals.iter().flatten().copied().fold(0.0, f64::max);
    let oracle_deviation = if p.verify {
        let reference = oracle_integrate_forced(&p.coeffs, forcing, p.t0, p.t_end, p.q0, p.step)?;
        Some(solved.trajectory.sup_distance(&reference))
    } else {
        None
    };
    Ok(SolveReport {
        strategy: solved.strategy,
        trajectory: solved.trajectory,
        residuals,
        max_residual,
        segments: solved.segments,
        picard_iterations: solved.picard_iterations,
        oracle_deviation,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(src: [&str; 4], t_end: f64) -> Problem {
        Problem::new(
            CoefficientSet::parse(src).unwrap(),
            0.0,
            t_end,
            Quaternion::ONE,
        )
    }

    #[test]
    fn method_parsing() {
        for m in ["auto", "commutative", "special", "picard", "oracle"] {
            assert_eq!(m.parse::<Method>().unwrap().to_string(), m);
        }
        assert!("rk45".parse::<Method>().is_err());
    }

    #[test]
    fn auto_picks_strategies() {
        let p = problem(["0", "sin(2*t)", "1", "cos(2*t)"], 3.0);
        assert_eq!(solve(&p).unwrap().strategy.to_string(), "special-case-I");

        let p = problem(["t", "0", "0", "0"], 1.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.strategy, Strategy::Commutative { degenerate: true });
        let (t, q) = r.trajectory.last().unwrap();
        assert!(q.distance(Quaternion::from_real((t * t / 2.0).exp())) < 1e-12);

        let p = problem(["0", "1", "1", "1+t"], 1.0);
        let r = solve(&p).unwrap();
        assert_eq!(r.strategy, Strategy::Picard);
        assert!(r.segments >= 1 && r.picard_iterations.len() == r.segments);
    }

    #[test]
    fn forced_methods() {
        let mut p = problem(["1", "0", "0", "0"], 1.0);
        p.q0 = Quaternion::ZERO;
        p.forcing = Some(Forcing::parse(["1", "0", "0", "0"]).unwrap());
        let r = solve(&p).unwrap();
        assert!((r.trajectory.last().unwrap().1.w - (1f64.exp() - 1.0)).abs() < 1e-9);
        assert!(r.max_residual < 1e-5);

        p.method = Method::Picard;
        assert!(solve(&p).is_err());
        p.method = Method::Oracle;
        p.verify = true;
        let r = solve(&p).unwrap();
        assert_eq!(r.oracle_deviation, Some(0.0));

        let mut p = problem(["0", "sin(2*t)", "1", "cos(2*t)"], 1.0);
        p.forcing = Some(Forcing::parse(["1", "0", "0", "0"]).unwrap());
        assert!(matches!(solve(&p), Err(Error::NotCommutative { .. })));
    }

    #[test]
    fn forced_method_mismatches() {
        let mut p = problem(["0", "1", "1", "1+t"], 1.0);
        p.method = Method::Commutative;
        assert!(matches!(solve(&p), Err(Error::NotCommutative { .. })));
        p.method = Method::Special;
        assert!(matches!(solve(&p), Err(Error::NoSpecialCase)));
    }

    #[test]
    fn rejects_bad_interval() {
        let p = problem(["0", "0", "0", "0"], -1.0);
        assert!(solve(&p).is_err());
    }
}
