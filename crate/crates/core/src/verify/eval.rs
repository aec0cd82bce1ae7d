//! Complex floating-point evaluation of inert trees.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::inert::{InertForm, Tag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("no numeric evaluator for `{0}`")]
    NoEvaluator(String),
    #[error("`{name}` takes {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("cannot evaluate {0} nodes")]
    Unsupported(Tag),
    #[error("outside the domain of `{0}`")]
    Domain(String),
}

pub type Env = HashMap<String, Complex64>;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const CATALAN: f64 = 0.915_965_594_177_219;

/// Value of a named constant.
pub fn constant_value(name: &str) -> Option<Complex64> {
    Some(match name {
        "Pi" => Complex64::new(PI, 0.0),
        "I" => Complex64::i(),
        "gamma" => Complex64::new(EULER_GAMMA, 0.0),
        "Catalan" => Complex64::new(CATALAN, 0.0),
        "infinity" => Complex64::new(f64::INFINITY, 0.0),
        _ => return None,
    })
}

/// Functions the evaluator implements, with their arities.
pub const FUNCTIONS: &[(&str, usize)] = &[
    ("sin", 1),
    ("cos", 1),
    ("tan", 1),
    ("exp", 1),
    ("ln", 1),
    ("log", 1),
    ("sqrt", 1),
    ("root", 2),
    ("arcsin", 1),
    ("arccos", 1),
    ("arctan", 1),
    ("abs", 1),
    ("JacobiP", 4),
];

pub fn evaluate(t: &InertForm, env: &Env) -> Result<Complex64, EvalError> {
    evaluate_node(t, env).map(unsign_zero)
}

/// Replaces `-0.0` parts by `+0.0`, so that a negative real number always
/// sits on the upper side of a branch cut, as an exact value would.
fn unsign_zero(z: Complex64) -> Complex64 {
    let fix = |v: f64| if v == 0.0 { 0.0 } else { v };
    Complex64::new(fix(z.re), fix(z.im))
}

fn evaluate_node(t: &InertForm, env: &Env) -> Result<Complex64, EvalError> {
    let re = |v: f64| Complex64::new(v, 0.0);
    Ok(match t.tag {
        Tag::Name => {
            let name = t.as_name().unwrap_or_default();
            match env.get(name) {
                Some(v) => *v,
                None => constant_value(name).ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?,
            }
        }
        Tag::IntPos | Tag::IntNeg => re(t.as_int().unwrap_or_default() as f64),
        Tag::Rational => {
            let (p, q) = t.as_rational().unwrap_or((0, 1));
            re(p as f64 / q as f64)
        }
        Tag::Float => {
            let m = t.children[0].as_int().unwrap_or_default() as f64;
            let e = t.children[1].as_int().unwrap_or_default() as i32;
            re(m * 10f64.powi(e))
        }
        Tag::Complex => evaluate(&t.children[0], env)? + Complex64::i() * evaluate(&t.children[1], env)?,
        Tag::Sum => t.children.iter().map(|c| evaluate(c, env)).sum::<Result<Complex64, _>>()?,
        Tag::Prod => t.children.iter().map(|c| evaluate(c, env)).product::<Result<Complex64, _>>()?,
        Tag::Divide => evaluate(&t.children[0], env)? / evaluate(&t.children[1], env)?,
        Tag::Power => power(evaluate(&t.children[0], env)?, &t.children[1], env)?,
        Tag::Function => function(t, env)?,
        other => return Err(EvalError::Unsupported(other)),
    })
}

fn power(base: Complex64, exponent: &InertForm, env: &Env) -> Result<Complex64, EvalError> {
    if let Some(n) = exponent.as_int().and_then(|n| i32::try_from(n).ok()) {
        return Ok(base.powi(n));
    }
    let e = evaluate(exponent, env)?;
    Ok(complex_pow(base, e))
}

/// Principal branch `exp(e * log b)`, with `0^e` handled explicitly.
pub fn complex_pow(base: Complex64, e: Complex64) -> Complex64 {
    if base == Complex64::new(0.0, 0.0) {
        return if e.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    (e * base.ln()).exp()
}

fn function(t: &InertForm, env: &Env) -> Result<Complex64, EvalError> {
    let name = t.function_name().unwrap_or_default();
    let args = t.function_args();
    let Some(&(_, expected)) = FUNCTIONS.iter().find(|(n, _)| *n == name) else {
        return Err(EvalError::NoEvaluator(name.to_string()));
    };
    if args.len() != expected {
        return Err(EvalError::Arity {
            name: name.to_string(),
            expected,
            found: args.len(),
        });
    }
    let vals = args.iter().map(|a| evaluate(a, env)).collect::<Result<Vec<_>, _>>()?;
    let x = vals[0];
    Ok(match name {
        "sin" => x.sin(),
        "cos" => x.cos(),
        "tan" => x.tan(),
        "exp" => x.exp(),
        "ln" | "log" => x.ln(),
        "sqrt" => x.sqrt(),
        "root" => complex_pow(x, vals[1].inv()),
        "arcsin" => x.asin(),
        "arccos" => x.acos(),
        "arctan" => x.atan(),
        "abs" => Complex64::new(x.norm(), 0.0),
        "JacobiP" => {
            let n = vals[0];
            let degree = n.re.round();
            if n.im.abs() > 1e-12 || (n.re - degree).abs() > 1e-12 || !(0.0..=10_000.0).contains(&degree) {
                return Err(EvalError::Domain("JacobiP".into()));
            }
            jacobi_p(degree as u32, vals[1], vals[2], vals[3])
        }
        _ => unreachable!("listed in FUNCTIONS"),
    })
}

/// Jacobi polynomial by the three-term recurrence in the degree. When a
/// recurrence coefficient vanishes (special parameter values) the explicit
/// sum is used instead.
pub fn jacobi_p(n: u32, a: Complex64, b: Complex64, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    if n == 0 {
        return one;
    }
    let p1 = (a + one) + (a + b + two) * (x - one) / two;
    if n == 1 {
        return p1;
    }
    let (mut prev, mut cur) = (one, p1);
    for k in 2..=n {
        let k = k as f64;
        let s = a + b + 2.0 * k;
        let lead = 2.0 * k * (k + a + b) * (s - two);
        if lead.norm() < 1e-300 {
            return jacobi_sum(n, a, b, x);
        }
        let c1 = (s - one) * (s * (s - two) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - one) * (k + b - one) * s;
        let next = (c1 * cur - c2 * prev) / lead;
        prev = cur;
        cur = next;
    }
    cur
}

fn binomial(z: Complex64, k: u32) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z - j as f64) / (k - j) as f64)
}

fn jacobi_sum(n: u32, a: Complex64, b: Complex64, x: Complex64) -> Complex64 {
    let nf = n as f64;
    let lo = (x - 1.0) / 2.0;
    let hi = (x + 1.0) / 2.0;
    (0..=n)
        .map(|s| binomial(a + nf, n - s) * binomial(b + nf, s) * lo.powi(s as i32) * hi.powi((n - s) as i32))
        .sum()
}
