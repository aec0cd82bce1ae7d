//! Rewrites a parsed tree into the shape the LaTeX renderer expects:
//! numeric factors folded and moved to the front, negation carried by a
//! leading `-1` (or negative coefficient), and negative integer powers turned
//! into DIVIDE nodes.

use crate::inert::{InertForm, Tag};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    /// Introduce DIVIDE nodes for negative integer powers.
    pub divide: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions { divide: true }
    }
}

pub fn preprocess(tree: &InertForm) -> InertForm {
    preprocess_with(tree, PreprocessOptions::default())
}

pub fn preprocess_with(tree: &InertForm, opts: PreprocessOptions) -> InertForm {
    if tree.tag == Tag::Prod {
        // Factors are gathered before any of them is rewritten, so that
        // negative powers reach the product as powers, not as DIVIDE nodes.
        let mut raw = Vec::new();
        flatten_prod(tree, &mut raw);
        let factors = raw
            .into_iter()
            .map(|f| match f.tag {
                Tag::Power => InertForm::power(
                    preprocess_with(&f.children[0], opts),
                    preprocess_with(&f.children[1], opts),
                ),
                _ => preprocess_with(f, opts),
            })
            .collect();
        return product(factors, opts);
    }
    let children: Vec<InertForm> = tree.children.iter().map(|c| preprocess_with(c, opts)).collect();
    match tree.tag {
        Tag::Sum => sum(children),
        Tag::Power => power(children, opts),
        _ => InertForm {
            tag: tree.tag,
            payload: tree.payload.clone(),
            children,
        },
    }
}

fn flatten_prod<'a>(t: &'a InertForm, out: &mut Vec<&'a InertForm>) {
    for c in &t.children {
        if c.tag == Tag::Prod {
            flatten_prod(c, out);
        } else {
            out.push(c);
        }
    }
}

fn sum(children: Vec<InertForm>) -> InertForm {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        if c.tag == Tag::Sum {
            flat.extend(c.children);
        } else {
            flat.push(c);
        }
    }
    let (mut numbers, rest): (Vec<_>, Vec<_>) = flat.into_iter().partition(InertForm::is_numeric_literal);
    numbers.extend(rest);
    InertForm::sum(numbers)
}

/// Exact value of a foldable numeric factor.
fn exact_value(f: &InertForm) -> Option<Q> {
    match f.tag {
        Tag::IntPos | Tag::IntNeg | Tag::Rational => f.as_rational().map(|(p, q)| Q::new(p, q)),
        Tag::Power => {
            let base = f.children[0].as_int()?;
            let n = f.children[1].as_int().filter(|n| *n < 0)?;
            Q::from_int(base).checked_powi(n)
        }
        _ => None,
    }
}

fn product(children: Vec<InertForm>, opts: PreprocessOptions) -> InertForm {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        if c.tag == Tag::Prod {
            flat.extend(c.children);
        } else {
            flat.push(c);
        }
    }

    let mut exact = Vec::new();
    let mut floats = Vec::new();
    let mut others = Vec::new();
    for f in flat {
        if let Some(v) = exact_value(&f) {
            exact.push((f, v));
        } else if f.tag == Tag::Float {
            floats.push(f);
        } else {
            others.push(f);
        }
    }

    // A lone literal stays as written; several exact constants fold into one.
    // On overflow they are kept as written.
    let mut leading: Vec<InertForm> = Vec::new();
    let coefficient = if exact.len() == 1 && exact[0].0.tag != Tag::Power {
        Some(exact.pop().expect("literal").0)
    } else {
        match exact.iter().try_fold(Q::ONE, |acc, (_, v)| acc.checked_mul(*v)) {
            Some(v) => Some(v.to_inert()),
            None => {
                leading.extend(exact.into_iter().map(|(f, _)| f));
                None
            }
        }
    }
    .filter(|c| !c.is_one());
    leading.extend(floats);

    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for f in others {
        match negative_power(&f) {
            Some((base, 1)) if opts.divide && base.tag == Tag::Prod => denom.extend(base.children.iter().cloned()),
            Some((base, n)) if opts.divide => denom.push(if n == 1 {
                base.clone()
            } else {
                InertForm::power(base.clone(), InertForm::int(n))
            }),
            _ => numer.push(f),
        }
    }

    if denom.is_empty() {
        let mut factors: Vec<InertForm> = coefficient.into_iter().collect();
        factors.extend(leading);
        factors.extend(numer);
        return build_prod(factors);
    }

    let mut outer = Vec::new();
    match coefficient {
        Some(c) if c.is_integer() => {
            let v = c.as_int().expect("integer");
            if v.abs() != 1 {
                numer.insert(0, InertForm::int(v.abs()));
            }
            if v < 0 {
                outer.push(InertForm::int(-1));
            }
        }
        Some(c) => outer.push(c),
        None => {}
    }
    outer.extend(leading);
    outer.push(InertForm::divide(build_prod(numer), product(denom, opts)));
    build_prod(outer)
}

fn negative_power(f: &InertForm) -> Option<(&InertForm, i128)> {
    if f.tag != Tag::Power {
        return None;
    }
    let n = f.children[1].as_int().filter(|n| *n < 0)?;
    Some((&f.children[0], -n))
}

fn build_prod(mut factors: Vec<InertForm>) -> InertForm {
    match factors.len() {
        0 => InertForm::int(1),
        1 => factors.pop().expect("factor"),
        _ => InertForm::prod(factors),
    }
}

fn power(children: Vec<InertForm>, opts: PreprocessOptions) -> InertForm {
    let [base, exponent]: [InertForm; 2] = children.try_into().expect("POWER has two children");
    let n = exponent.as_int().filter(|n| *n < 0);
    match n {
        Some(n) if opts.divide => {
            if let Some(v) = base.as_int().and_then(|b| Q::from_int(b).checked_powi(n)) {
                return v.to_inert();
            }
            let den = if n == -1 {
                base
            } else {
                InertForm::power(base, InertForm::int(-n))
            };
            InertForm::divide(InertForm::int(1), den)
        }
        _ => InertForm::power(base, exponent),
    }
}
