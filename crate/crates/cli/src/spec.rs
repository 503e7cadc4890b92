//! Problem files: one `key = value` pair per line, `#` starts a comment.
//!
//! ```text
//! # rotating frame
//! a1 = sin(2*t)
//! a2 = 1
//! a3 = cos(2*t)
//! t_end = 3
//! q0 = 1 0 0 0
//! ```

use std::collections::HashSet;
use std::path::PathBuf;

use quatode::expr::{self, Expr};
use quatode::{CoefficientSet, Forcing, Method, Problem, Quaternion};
use thiserror::Error;

const KEYS: [&str; 15] = [
    "a0", "a1", "a2", "a3", "f0", "f1", "f2", "f3", "t0", "t_end", "q0", "method", "step", "tol",
    "output",
];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct SpecError {
    /// 1-based; 0 for problems not tied to a line.
    pub line: usize,
    pub message: String,
}

impl SpecError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub coeffs: [Expr; 4],
    /// Present when any of `f0..f3` is given; missing components are zero.
    pub forcing: Option<[Expr; 4]>,
    pub t0: f64,
    pub t_end: f64,
    pub q0: Quaternion,
    pub method: Method,
    pub step: f64,
    pub tol: f64,
    pub output: Option<PathBuf>,
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, SpecError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SpecError::new(
            line,
            format!("{key}: expected a finite number, got `{value}`"),
        )),
    }
}

fn parse_positive(line: usize, key: &str, value: &str) -> Result<f64, SpecError> {
    let v = parse_real(line, key, value)?;
    if v <= 0.0 {
        return Err(SpecError::new(line, format!("{key} must be positive")));
    }
    Ok(v)
}

fn parse_expr(line: usize, key: &str, value: &str) -> Result<Expr, SpecError> {
    expr::parse(value).map_err(|e| SpecError::new(line, format!("{key}: {e}")))
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let zero = || Expr::Num(0.0);
        let mut coeffs = [zero(), zero(), zero(), zero()];
        let mut forcing = [zero(), zero(), zero(), zero()];
        let mut forced = false;
        let mut spec_t0 = 0.0;
        let mut t_end = None;
        let mut q0 = Quaternion::ONE;
        let mut method = Method::Auto;
        let mut step = quatode::oracle::DEFAULT_STEP;
        let mut tol = quatode::commutativity::DEFAULT_TOL;
        let mut output = None;
        let mut seen = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                SpecError::new(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(SpecError::new(line, format!("unknown key `{key}`")));
            }
            if !seen.insert(key.to_string()) {
                return Err(SpecError::new(line, format!("duplicate key `{key}`")));
            }
            if value.is_empty() {
                return Err(SpecError::new(line, format!("{key}: missing value")));
            }
            match key {
                "a0" | "a1" | "a2" | "a3" => {
                    let i = usize::from(key.as_bytes()[1] - b'0');
                    coeffs[i] = parse_expr(line, key, value)?;
                }
                "f0" | "f1" | "f2" | "f3" => {
                    let i = usize::from(key.as_bytes()[1] - b'0');
                    forcing[i] = parse_expr(line, key, value)?;
                    forced = true;
                }
                "t0" => spec_t0 = parse_real(line, key, value)?,
                "t_end" => t_end = Some(parse_real(line, key, value)?),
                "q0" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(SpecError::new(line, "q0: expected four numbers `w x y z`"));
                    }
                    let mut c = [0.0; 4];
                    for (slot, part) in c.iter_mut().zip(parts) {
                        *slot = parse_real(line, key, part)?;
                    }
                    q0 = Quaternion::from_array(c);
                }
                "method" => {
                    method = value
                        .parse()
                        .map_err(|e: quatode::Error| SpecError::new(line, e.to_string()))?
                }
                "step" => step = parse_positive(line, key, value)?,
                "tol" => tol = parse_positive(line, key, value)?,
                "output" => output = Some(PathBuf::from(value)),
                _ => unreachable!("key list checked above"),
            }
        }

        let t_end = t_end.ok_or_else(|| SpecError::new(0, "missing required key `t_end`"))?;
        if t_end <= spec_t0 {
            return Err(SpecError::new(
                0,
                format!("t_end ({t_end}) must be greater than t0 ({spec_t0})"),
            ));
        }
        Ok(Self {
            coeffs,
            forcing: forced.then_some(forcing),
            t0: spec_t0,
            t_end,
            q0,
            method,
            step,
            tol,
            output,
        })
    }

    pub fn to_problem(&self) -> Problem {
        let mut p = Problem::new(
            CoefficientSet::new(self.coeffs.clone()),
            self.t0,
            self.t_end,
            self.q0,
        );
        p.forcing = self.forcing.clone().map(Forcing::new);
        p.method = self.method;
        p.step = self.step;
        p.tol = self.tol;
        p
    }
}
