//! Generators and property checks shared by the property and acceptance suites.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use texcas_core::inert::{InertForm, NestedList, Tag};
use texcas_core::scan::push_latex;
use texcas_core::verify::eval::{evaluate, Env, EvalError};
use texcas_core::verify::{simplify_light, Cycler, Side, Termination};
use texcas_core::{
    parse_maple, preprocess, preprocess_with, scan, translate_backward, translate_forward, Dialect, Lexicon,
    PreprocessOptions,
};

// ---------------------------------------------------------------- LaTeX

const LATEX_ATOMS: &[&str] = &[
    "a", "b", "x", "z", "i", "e", "C", "0", "1", "42", "3.5", "+", "-", "=", "<", ",", "'", "^", "_", "@", "@@",
    "&", "~", "\\\\", "\\,", "\\alpha", "\\Theta", "\\pi", "\\cpi", "\\iunit", "\\idt", "\\sin", "\\cos", "\\frac",
    "\\sqrt", "\\JacobiP", "\\qhyperg", "\\infty", "\\left(", "\\right)",
];

fn latex_token() -> impl Strategy<Value = String> {
    let leaf = proptest::sample::select(LATEX_ATOMS).prop_map(|s| s.to_string());
    leaf.prop_recursive(4, 48, 6, |inner| {
        let seq = prop::collection::vec(inner, 0..5).prop_map(|v| v.join(" "));
        prop_oneof![
            seq.clone().prop_map(|s| format!("{{{s}}}")),
            seq.clone().prop_map(|s| format!("({s})")),
            seq.clone().prop_map(|s| format!("\\left({s}\\right)")),
            seq.clone().prop_map(|s| format!("\\sqrt[{s}]")),
            seq,
        ]
    })
}

/// Balanced LaTeX fragments with random spacing between tokens.
pub fn latex_strategy() -> impl Strategy<Value = String> {
    (prop::collection::vec(latex_token(), 1..6), prop::collection::vec(0usize..3, 6)).prop_map(|(tokens, gaps)| {
        let mut out = String::new();
        for (k, t) in tokens.iter().enumerate() {
            if k > 0 {
                out.push_str(&" ".repeat(gaps[k % gaps.len()]));
            }
            out.push_str(t);
        }
        out
    })
}

/// Drops whitespace except where it separates a control word from a letter.
pub fn normalize_latex(s: &str) -> String {
    let mut out = String::new();
    for chunk in s.split_whitespace() {
        push_latex(&mut out, chunk);
    }
    out
}

pub fn check_scan_fidelity(src: &str, lex: &Lexicon) -> Result<(), TestCaseError> {
    let Ok(tree) = scan(src, lex) else {
        return Ok(());
    };
    prop_assert_eq!(normalize_latex(&tree.to_latex()), normalize_latex(src));
    prop_assert_eq!(scan(src, lex).ok(), Some(tree.clone()), "scan is deterministic");
    for term in tree.terms() {
        if term.lexeme == "^" || term.lexeme == "_" {
            prop_assert_eq!(term.lexeme.len(), 1);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- inert trees

fn name_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        proptest::sample::select(&["x", "Pi", "sin", "_a1", "infinity"][..]).prop_map(String::from),
        "[A-Za-z_][A-Za-z0-9_]{0,6}",
        "[ -~]{0,8}",
    ]
}

fn int_strategy() -> impl Strategy<Value = i128> {
    prop_oneof![-20i128..=20, -(1i128 << 100)..(1i128 << 100)]
}

/// Structurally valid inert trees over every tag.
pub fn inert_strategy() -> impl Strategy<Value = InertForm> {
    let leaf = prop_oneof![
        name_strategy().prop_map(InertForm::name),
        "[ -~]{0,8}".prop_map(InertForm::string),
        int_strategy().prop_map(InertForm::int),
        (int_strategy(), 1i128..1000).prop_map(|(p, q)| InertForm::rational(p, q)),
        (int_strategy(), -20i128..20).prop_map(|(m, e)| InertForm::float(m, e)),
    ];
    leaf.prop_recursive(5, 64, 4, |inner| {
        let two = (inner.clone(), inner.clone());
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..5).prop_map(InertForm::sum),
            prop::collection::vec(inner.clone(), 2..5).prop_map(InertForm::prod),
            prop::collection::vec(inner.clone(), 0..4).prop_map(InertForm::expseq),
            (name_strategy(), prop::collection::vec(inner.clone(), 0..4))
                .prop_map(|(n, args)| InertForm::function(n, args)),
            two.clone().prop_map(|(a, b)| InertForm::power(a, b)),
            two.clone().prop_map(|(a, b)| InertForm::equation(a, b)),
            two.clone().prop_map(|(a, b)| InertForm::range(a, b)),
            two.clone().prop_map(|(a, b)| InertForm::divide(a, b)),
            two.prop_map(|(a, b)| InertForm::complex(a, b)),
        ]
    })
}

pub fn check_nested_list_bijection(t: &InertForm) -> Result<(), TestCaseError> {
    prop_assert!(t.validate().is_ok());
    let nl = t.to_nested_list();
    prop_assert_eq!(&InertForm::from_nested_list(&nl).unwrap(), t);
    for compat in [false, true] {
        let text = nl.to_text(compat);
        prop_assert_eq!(&NestedList::parse_text(&text).unwrap(), &nl, "{}", text);
    }
    Ok(())
}

// ---------------------------------------------------------------- evaluable Maple

/// Maple source for arithmetic over `z`, `w`, small literals and a few
/// elementary functions.
pub fn maple_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("z".to_string()),
        Just("w".to_string()),
        Just("Pi".to_string()),
        Just("I".to_string()),
        (-5i32..=5).prop_map(|n| n.to_string()),
        (-5i32..=5, 1i32..=6).prop_map(|(p, q)| format!("{p}/{q}")),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})+({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})-({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), -3i32..=3).prop_map(|(a, n)| format!("({a})^({n})")),
            inner.clone().prop_map(|a| format!("({a})^(1/2)")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (proptest::sample::select(&["sin", "cos", "exp", "sqrt"][..]), inner)
                .prop_map(|(f, a)| format!("{f}({a})")),
        ]
    })
}

pub fn sample_envs() -> Vec<Env> {
    let pts = [
        (Complex64::new(0.7, 0.3), Complex64::new(-0.4, 1.1)),
        (Complex64::new(-1.3, -0.6), Complex64::new(0.9, 0.2)),
        (Complex64::new(0.25, -1.5), Complex64::new(-1.2, -0.8)),
    ];
    pts.iter()
        .map(|&(z, w)| Env::from([("z".to_string(), z), ("w".to_string(), w)]))
        .collect()
}

/// Largest magnitude among the values of every subterm, when all evaluate.
fn magnitude(t: &InertForm, env: &Env) -> Result<f64, EvalError> {
    let own = evaluate(t, env)?.norm();
    let own = if own.is_nan() { f64::INFINITY } else { own };
    let kids = if t.tag == Tag::Function {
        t.function_args()
    } else {
        &t.children[..]
    };
    kids.iter().try_fold(own, |m, c| Ok(m.max(magnitude(c, env)?)))
}

/// True when a square root or non-integer power is taken of a value within
/// rounding distance of the negative real axis, where the side of the cut is
/// decided by rounding noise.
fn on_branch_cut(t: &InertForm, env: &Env) -> bool {
    let near_cut = |arg: &InertForm| {
        evaluate(arg, env).is_ok_and(|v| v.re < 0.0 && v.im.abs() < 1e-9 * v.re.abs().max(1.0))
    };
    let multivalued = match t.tag {
        Tag::Power => t.children[1].as_int().is_none() && near_cut(&t.children[0]),
        Tag::Function => {
            matches!(t.function_name(), Some("sqrt" | "ln")) && t.function_args().first().is_some_and(near_cut)
        }
        _ => false,
    };
    let kids = if t.tag == Tag::Function {
        t.function_args()
    } else {
        &t.children[..]
    };
    multivalued || kids.iter().any(|c| on_branch_cut(c, env))
}

/// `a` and `b` agree to 1e-12 wherever `a` evaluates with every subterm at
/// most 100 in magnitude.
pub fn check_same_value(a: &InertForm, b: &InertForm) -> Result<(), TestCaseError> {
    for env in sample_envs() {
        match magnitude(a, &env) {
            Ok(m) if m.is_finite() && m <= 100.0 => {}
            _ => continue,
        }
        if on_branch_cut(a, &env) {
            continue;
        }
        let va = evaluate(a, &env).unwrap();
        let vb = match evaluate(b, &env) {
            Ok(v) => v,
            Err(e) => return Err(TestCaseError::fail(format!("rewritten tree fails to evaluate: {e}"))),
        };
        prop_assert!((va - vb).norm() <= 1e-12, "{} vs {} at {:?}", va, vb, env);
    }
    Ok(())
}

pub fn check_preprocess(src: &str) -> Result<(), TestCaseError> {
    let t = parse_maple(src).unwrap();
    for divide in [true, false] {
        let opts = PreprocessOptions { divide };
        let once = preprocess_with(&t, opts);
        prop_assert!(once.validate().is_ok());
        prop_assert_eq!(&preprocess_with(&once, opts), &once, "idempotence for {}", src);
        check_same_value(&t, &once)?;
    }
    Ok(())
}

pub fn check_simplify(src: &str) -> Result<(), TestCaseError> {
    let t = parse_maple(src).unwrap();
    let once = simplify_light(&t);
    prop_assert!(once.validate().is_ok());
    prop_assert_eq!(&simplify_light(&once), &once, "idempotence for {}", src);
    check_same_value(&t, &once)
}

/// Backward output rescans, and translating it forward again preserves value.
pub fn check_backward(src: &str, lex: &Lexicon) -> Result<(), TestCaseError> {
    let t = parse_maple(src).unwrap();
    let latex = translate_backward(&preprocess(&t), lex).unwrap().output;
    let tree = scan(&latex, lex).map_err(|e| TestCaseError::fail(format!("{latex}: {e}")))?;
    let maple = translate_forward(&tree, lex, Dialect::Maple)
        .map_err(|e| TestCaseError::fail(format!("{latex}: {e}")))?
        .output;
    let again = parse_maple(&maple).map_err(|e| TestCaseError::fail(format!("{maple}: {e}")))?;
    check_same_value(&t, &again)
}

// ---------------------------------------------------------------- divergence

pub const ELLIPTIC_ARGUMENTS: &[&str] = &["\\phi", "\\theta", "z", "x"];

pub fn check_elliptic_growth(arg: &str, max_steps: usize, lex: &Lexicon) -> Result<(), TestCaseError> {
    let start = format!("\\EllIntF@{{{arg}}}{{k}}");
    let report = Cycler::new(lex).round_trip(&start, Side::SemanticLatex, max_steps);
    prop_assert_eq!(report.terminated_reason, Termination::MaxSteps);
    prop_assert!(!report.fixed_point_reached);
    prop_assert_eq!(report.steps.len(), max_steps + 1);
    for pair in report.steps.windows(3) {
        prop_assert!(pair[2].text.len() > pair[0].text.len(), "no growth at step {}", pair[2].index);
    }
    let layers: Vec<usize> = report
        .steps
        .iter()
        .filter(|s| s.side == Side::SemanticLatex)
        .map(|s| s.text.matches("\\asin@{\\sin@{").count())
        .collect();
    prop_assert_eq!(layers, (0..=max_steps / 2).collect::<Vec<_>>());
    Ok(())
}
