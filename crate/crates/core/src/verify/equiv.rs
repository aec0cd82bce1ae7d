//! Equivalence of two expressions: symbolic zero of the difference first,
//! then seeded numeric sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::eval::{constant_value, evaluate, Env, EvalError};
use super::simplify::is_zero;
use crate::inert::InertForm;
use crate::maple::negate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("`{0}` is neither a declared variable nor a known constant")]
    UnknownSymbol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    SymbolicZero,
    NumericConverged,
    NumericMismatch,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::SymbolicZero => "symbolic-zero",
            Outcome::NumericConverged => "numeric-converged",
            Outcome::NumericMismatch => "numeric-mismatch",
            Outcome::Inconclusive => "inconclusive",
        }
    }

    pub fn is_verified(self) -> bool {
        matches!(self, Outcome::SymbolicZero | Outcome::NumericConverged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    /// Variable name with `[re, im]` of its value.
    pub assignment: Vec<(String, [f64; 2])>,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub outcome: Outcome,
    pub samples: Vec<Sample>,
    pub max_difference: Option<f64>,
    /// Why the verdict is inconclusive, when it is.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub points: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Points where either side exceeds this magnitude are treated as
    /// near-singular and skipped.
    pub magnitude_limit: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            points: 20,
            tolerance: 1e-10,
            seed: 0,
            min_radius: 0.1,
            max_radius: 2.0,
            magnitude_limit: 1e6,
        }
    }
}

/// Sample assignments cycling through a real point, a complex point, its
/// conjugate, a second complex point and its conjugate.
pub fn sample_points(vars: &[String], cfg: &SamplingConfig) -> Vec<Vec<(String, Complex64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radius = |rng: &mut ChaCha8Rng| rng.gen_range(cfg.min_radius..=cfg.max_radius);
    let mut points: Vec<Vec<(String, Complex64)>> = Vec::with_capacity(cfg.points);
    for k in 0..cfg.points {
        let point = match k % 5 {
            0 => vars
                .iter()
                .map(|v| {
                    let r = radius(&mut rng);
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    (v.clone(), Complex64::new(sign * r, 0.0))
                })
                .collect(),
            2 | 4 => points[k - 1].iter().map(|(v, z)| (v.clone(), z.conj())).collect(),
            _ => vars
                .iter()
                .map(|v| {
                    let r = radius(&mut rng);
                    // keep clear of the real axis so conjugates are distinct points
                    let theta = rng.gen_range(0.1..(std::f64::consts::PI - 0.1));
                    let theta = if rng.gen_bool(0.5) { theta } else { -theta };
                    (v.clone(), Complex64::from_polar(r, theta))
                })
                .collect(),
        };
        points.push(point);
    }
    points
}

pub fn check_equivalence(
    lhs: &InertForm,
    rhs: &InertForm,
    vars: &[String],
    cfg: &SamplingConfig,
) -> Result<EquivalenceVerdict, EquivalenceError> {
    for name in lhs.free_names().into_iter().chain(rhs.free_names()) {
        if !vars.contains(&name) && constant_value(&name).is_none() {
            return Err(EquivalenceError::UnknownSymbol(name));
        }
    }
    let difference = InertForm::sum(vec![lhs.clone(), negate(rhs.clone())]);
    if is_zero(&difference) {
        return Ok(EquivalenceVerdict {
            outcome: Outcome::SymbolicZero,
            samples: Vec::new(),
            max_difference: Some(0.0),
            reason: None,
        });
    }

    let mut samples = Vec::new();
    for point in sample_points(vars, cfg) {
        let env: Env = point.iter().cloned().collect();
        let values = evaluate(lhs, &env).and_then(|l| Ok((l, evaluate(rhs, &env)?)));
        let (l, r) = match values {
            Ok(v) => v,
            Err(EvalError::Domain(_)) => continue,
            Err(e) => {
                return Ok(EquivalenceVerdict {
                    outcome: Outcome::Inconclusive,
                    samples,
                    max_difference: None,
                    reason: Some(e.to_string()),
                })
            }
        };
        let finite = l.is_finite() && r.is_finite();
        if !finite || l.norm() > cfg.magnitude_limit || r.norm() > cfg.magnitude_limit {
            continue;
        }
        samples.push(Sample {
            assignment: point.iter().map(|(v, z)| (v.clone(), [z.re, z.im])).collect(),
            difference: (l - r).norm(),
        });
    }

    if samples.is_empty() {
        return Ok(EquivalenceVerdict {
            outcome: Outcome::Inconclusive,
            samples,
            max_difference: None,
            reason: Some("every sample point was skipped".into()),
        });
    }
    let max = samples.iter().map(|s| s.difference).fold(0.0, f64::max);
    let outcome = if max >= cfg.tolerance {
        Outcome::NumericMismatch
    } else {
        Outcome::NumericConverged
    };
    Ok(EquivalenceVerdict {
        outcome,
        samples,
        max_difference: Some(max),
        reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maple::parse_maple;

    fn check(l: &str, r: &str) -> EquivalenceVerdict {
        let lhs = parse_maple(l).unwrap();
        let rhs = parse_maple(r).unwrap();
        let mut vars: Vec<String> = lhs.free_names();
        vars.extend(rhs.free_names());
        vars.retain(|v| constant_value(v).is_none());
        vars.sort();
        vars.dedup();
        check_equivalence(&lhs, &rhs, &vars, &SamplingConfig::default()).unwrap()
    }

    #[test]
    fn shifted_sine_is_cosine() {
        let v = check("sin(z+Pi/2)", "cos(z)");
        assert_eq!(v.outcome, Outcome::NumericConverged);
        assert_eq!(v.samples.len(), 20);
        assert!(v.max_difference.unwrap() < 1e-10);
    }

    #[test]
    fn identical_sides_are_symbolic_zero() {
        assert_eq!(check("sin(z)^2", "sin(z)^2").outcome, Outcome::SymbolicZero);
    }

    #[test]
    fn jacobi_degree_two() {
        assert_eq!(check("JacobiP(2,0,0,x)", "(3*x^2-1)/2").outcome, Outcome::NumericConverged);
    }

    #[test]
    fn branch_cut_sentinel() {
        let v = check("sqrt(z^2)", "z");
        assert_eq!(v.outcome, Outcome::NumericMismatch);
        assert!(v.samples.iter().any(|s| s.assignment[0].1[0] < 0.0 && s.difference >= 1e-10));
    }

    #[test]
    fn missing_evaluator_is_inconclusive() {
        let v = check("BesselK(1/4,z)", "BesselK(1/4,z)+0*z");
        assert_eq!(v.outcome, Outcome::SymbolicZero);
        let v = check("BesselK(1/4,z)", "z");
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(v.reason.unwrap().contains("BesselK"));
    }

    #[test]
    fn undeclared_symbol() {
        let lhs = parse_maple("x+y").unwrap();
        let err = check_equivalence(&lhs, &lhs, &["x".into()], &SamplingConfig::default()).unwrap_err();
        assert_eq!(err, EquivalenceError::UnknownSymbol("y".into()));
    }

    #[test]
    fn symmetric() {
        for (a, b) in [("sqrt(z^2)", "z"), ("exp(2*z)", "exp(z)^2"), ("ln(exp(z))", "z")] {
            let ab = check(a, b);
            let ba = check(b, a);
            assert_eq!(ab.outcome, ba.outcome);
            assert_eq!(ab.max_difference, ba.max_difference);
        }
    }

    #[test]
    fn points_include_real_and_conjugate_pairs() {
        let pts = sample_points(&["z".into()], &SamplingConfig::default());
        assert_eq!(pts.len(), 20);
        assert_eq!(pts[0][0].1.im, 0.0);
        assert_eq!(pts[2][0].1, pts[1][0].1.conj());
        assert_eq!(pts[4][0].1, pts[3][0].1.conj());
        for p in &pts {
            let r = p[0].1.norm();
            assert!((0.1..=2.0).contains(&r));
        }
    }
}
