//! A small, value-preserving simplifier used to test formula differences.
//!
//! Rules: flatten sums and products, fold exact rational arithmetic, collect
//! like terms and like factors, spread a numeric factor over a sum,
//! `x^0 -> 1`, `x^1 -> x`, push integer powers through products and nested
//! powers, and sort commutative operands by their nested-list text. The rules
//! are applied until nothing changes.

use std::collections::BTreeMap;

use crate::inert::{InertForm, Tag};
use crate::rational::Q;

const MAX_PASSES: usize = 16;

pub fn simplify_light(t: &InertForm) -> InertForm {
    let mut cur = t.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// True when `simplify_light(t)` is the literal zero.
pub fn is_zero(t: &InertForm) -> bool {
    simplify_light(t).as_int() == Some(0)
}

fn key(t: &InertForm) -> String {
    t.to_nested_list().to_text(false)
}

fn exact(t: &InertForm) -> Option<Q> {
    t.as_rational().and_then(|(p, q)| Q::checked_new(p, q))
}

fn pass(t: &InertForm) -> InertForm {
    let kids: Vec<InertForm> = t.children.iter().map(pass).collect();
    match t.tag {
        Tag::Rational => exact(t).map_or_else(|| t.clone(), Q::to_inert),
        Tag::Sum => sum(kids),
        Tag::Prod => prod(kids),
        Tag::Power => {
            let [b, e]: [InertForm; 2] = kids.try_into().expect("POWER has two children");
            power(b, e)
        }
        Tag::Divide => {
            let [n, d]: [InertForm; 2] = kids.try_into().expect("DIVIDE has two children");
            prod(vec![n, power(d, InertForm::int(-1))])
        }
        Tag::Complex => {
            let [re, im]: [InertForm; 2] = kids.try_into().expect("COMPLEX has two children");
            sum(vec![re, prod(vec![im, InertForm::name("I")])])
        }
        _ => InertForm {
            tag: t.tag,
            payload: t.payload.clone(),
            children: kids,
        },
    }
}

/// Splits a term into its exact coefficient and the remaining factor.
fn split_coefficient(t: &InertForm) -> (Q, InertForm) {
    if t.tag == Tag::Prod {
        if let Some(c) = exact(&t.children[0]) {
            let rest: Vec<InertForm> = t.children[1..].to_vec();
            return (c, rebuild(Tag::Prod, rest, InertForm::int(1)));
        }
    }
    (Q::ONE, t.clone())
}

fn rebuild(tag: Tag, mut items: Vec<InertForm>, empty: InertForm) -> InertForm {
    match items.len() {
        0 => empty,
        1 => items.pop().expect("item"),
        _ => InertForm {
            tag,
            payload: crate::inert::Payload::None,
            children: items,
        },
    }
}

fn with_coefficient(c: Q, rest: InertForm) -> InertForm {
    if c.is_one() {
        return rest;
    }
    let mut factors = vec![c.to_inert()];
    if rest.tag == Tag::Prod {
        factors.extend(rest.children);
    } else {
        factors.push(rest);
    }
    InertForm::prod(factors)
}

fn sum(kids: Vec<InertForm>) -> InertForm {
    let mut flat = Vec::new();
    for k in kids {
        if k.tag == Tag::Sum {
            flat.extend(k.children);
        } else {
            flat.push(k);
        }
    }
    let mut constant = Q::ZERO;
    let mut loose = Vec::new();
    let mut groups: BTreeMap<String, (Q, InertForm)> = BTreeMap::new();
    for term in flat {
        if let Some(v) = exact(&term) {
            match constant.checked_add(v) {
                Some(c) => constant = c,
                None => loose.push(term),
            }
            continue;
        }
        let (c, rest) = split_coefficient(&term);
        let slot = groups.entry(key(&rest)).or_insert((Q::ZERO, rest));
        match slot.0.checked_add(c) {
            Some(total) => slot.0 = total,
            None => loose.push(term),
        }
    }
    let mut terms: Vec<InertForm> = groups
        .into_values()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, rest)| with_coefficient(c, rest))
        .chain(loose)
        .collect();
    terms.sort_by_cached_key(key);
    if !constant.is_zero() {
        terms.insert(0, constant.to_inert());
    }
    rebuild(Tag::Sum, terms, InertForm::int(0))
}

fn prod(kids: Vec<InertForm>) -> InertForm {
    let mut flat = Vec::new();
    for k in kids {
        if k.tag == Tag::Prod {
            flat.extend(k.children);
        } else {
            flat.push(k);
        }
    }
    let mut coefficient = Q::ONE;
    let mut groups: BTreeMap<String, (InertForm, Vec<InertForm>)> = BTreeMap::new();
    for f in flat {
        if let Some(v) = exact(&f) {
            if let Some(c) = coefficient.checked_mul(v) {
                coefficient = c;
                continue;
            }
        }
        let (base, exponent) = match f.tag {
            Tag::Power => (f.children[0].clone(), f.children[1].clone()),
            _ => (f, InertForm::int(1)),
        };
        groups
            .entry(key(&base))
            .or_insert_with(|| (base, Vec::new()))
            .1
            .push(exponent);
    }
    if coefficient.is_zero() {
        return InertForm::int(0);
    }
    let mut factors = Vec::new();
    for (base, exponents) in groups.into_values() {
        let exponent = if exponents.len() == 1 {
            exponents.into_iter().next().expect("exponent")
        } else {
            sum(exponents)
        };
        let f = power(base, exponent);
        match exact(&f).and_then(|v| coefficient.checked_mul(v)) {
            Some(c) => coefficient = c,
            None => factors.push(f),
        }
    }
    if coefficient.is_zero() {
        return InertForm::int(0);
    }
    if factors.len() == 1 && factors[0].tag == Tag::Sum && !coefficient.is_one() {
        let c = coefficient.to_inert();
        let terms = factors[0].children.iter().map(|t| prod(vec![c.clone(), t.clone()])).collect();
        return sum(terms);
    }
    factors.sort_by_cached_key(key);
    if !coefficient.is_one() {
        factors.insert(0, coefficient.to_inert());
    }
    rebuild(Tag::Prod, factors, InertForm::int(1))
}

fn power(base: InertForm, exponent: InertForm) -> InertForm {
    let Some(e) = exact(&exponent) else {
        return InertForm::power(base, exponent);
    };
    if e.is_zero() {
        return InertForm::int(1);
    }
    if e.is_one() {
        return base;
    }
    if base.is_one() {
        return base;
    }
    if e.is_integer() {
        let n = e.numer();
        if let Some(v) = exact(&base).and_then(|b| b.checked_powi(n)) {
            return v.to_inert();
        }
        match base.tag {
            Tag::Power => {
                if let Some(f) = exact(&base.children[1]).and_then(|f| f.checked_mul(e)) {
                    return power(base.children[0].clone(), f.to_inert());
                }
            }
            Tag::Prod => {
                let factors = base
                    .children
                    .iter()
                    .map(|f| power(f.clone(), exponent.clone()))
                    .collect();
                return prod(factors);
            }
            _ => {}
        }
    }
    InertForm::power(base, e.to_inert())
}
