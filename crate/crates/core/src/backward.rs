//! Preprocessed inert trees back to semantic LaTeX.
//!
//! Reverse rules are derived from the lexicon's Maple patterns: any pattern
//! of the shape `Name(a, b, ...)` whose arguments are placeholders, or a known
//! elementary function applied to a placeholder, can be inverted. The
//! latter case wraps the argument in the inverse function's macro, so that
//! `EllipticF(sin($0),$1)` inverts to `\EllIntF@{\asin@{$0}}{$1}`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::forward::TranslationResult;
use crate::inert::{InertForm, Tag};
use crate::lexicon::{CasPattern, Dialect, Lexicon, LexiconEntry, Role};
use crate::maple::{parse_maple, render_maple};
use crate::scan::push_latex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackwardError {
    #[error("no reverse rule for `{name}` with {arity} arguments")]
    UnknownFunction { name: String, arity: usize },
    #[error("cannot render {0} nodes as LaTeX")]
    UnsupportedTag(Tag),
}

/// Maple function name and the Maple name of its inverse.
const INVERSES: &[(&str, &str)] = &[
    ("sin", "arcsin"),
    ("cos", "arccos"),
    ("tan", "arctan"),
    ("exp", "ln"),
    ("arcsin", "sin"),
    ("arccos", "cos"),
    ("arctan", "tan"),
    ("ln", "exp"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReverseRule {
    pub function_name: String,
    pub arity: usize,
    /// `$i` refers to the i-th Maple argument.
    pub latex_template: String,
    /// Per Maple argument, a macro prefix such as `\asin@` to wrap it in.
    pub argument_wrappers: Vec<Option<String>>,
}

/// Everything needed to render trees for one lexicon.
#[derive(Debug, Clone)]
pub struct ReverseLexicon {
    rules: HashMap<(String, usize), ReverseRule>,
    constants: Vec<(InertForm, String)>,
    names: HashMap<String, String>,
}

const PLACEHOLDER: &str = "_texcas_arg";

impl ReverseLexicon {
    pub fn new(lex: &Lexicon) -> Self {
        let mut rules = HashMap::new();
        let function_entries = lex
            .entries
            .values()
            .chain(lex.builtins.values())
            .filter(|e| e.role == Role::Function);
        for entry in function_entries {
            let candidates = [
                (entry.translation(Dialect::Maple), false),
                (entry.optional_translations.get(&Dialect::Maple), true),
            ];
            for (pattern, optional) in candidates {
                if let Some(rule) = pattern.and_then(|p| reverse_rule(lex, entry, p, optional)) {
                    rules.entry((rule.function_name.clone(), rule.arity)).or_insert(rule);
                }
            }
        }

        let mut constants = Vec::new();
        for c in &lex.constants {
            if let Some(Some(t)) = c.translations.get(&Dialect::Maple) {
                if let Ok(tree) = parse_maple(t) {
                    constants.push((tree, c.semantic_macro.clone()));
                }
            }
        }
        for (name, e) in &lex.builtins {
            if e.role == Role::Constant {
                if let Some(tree) = e.translation(Dialect::Maple).and_then(|p| parse_maple(p.template()).ok()) {
                    constants.push((tree, name.clone()));
                }
            }
        }

        let mut names: HashMap<String, String> = HashMap::new();
        for (command, e) in &lex.greek {
            if let Some(p) = e.translation(Dialect::Maple) {
                let slot = names.entry(p.template().to_string()).or_insert_with(|| command.clone());
                if command.len() < slot.len() {
                    *slot = command.clone();
                }
            }
        }
        ReverseLexicon { rules, constants, names }
    }

    pub fn rule(&self, name: &str, arity: usize) -> Option<&ReverseRule> {
        self.rules.get(&(name.to_string(), arity))
    }

    pub fn rules(&self) -> impl Iterator<Item = &ReverseRule> {
        self.rules.values()
    }

    pub fn translate(&self, tree: &InertForm) -> Result<TranslationResult, BackwardError> {
        let output = if tree.tag == Tag::Equation {
            format!("{}={}", self.render(&tree.children[0])?, self.render(&tree.children[1])?)
        } else {
            self.render(tree)?
        };
        Ok(TranslationResult {
            output,
            infos: Vec::new(),
        })
    }

    fn render(&self, t: &InertForm) -> Result<String, BackwardError> {
        if let Some((_, command)) = self.constants.iter().find(|(c, _)| c == t) {
            return Ok(command.clone());
        }
        Ok(match t.tag {
            Tag::Name => {
                let name = t.as_name().unwrap_or_default();
                self.names.get(name).cloned().unwrap_or_else(|| name.to_string())
            }
            Tag::IntPos | Tag::IntNeg => t.as_int().unwrap_or_default().to_string(),
            Tag::Rational => {
                let (p, q) = t.as_rational().unwrap_or((0, 1));
                let sign = if p < 0 { "-" } else { "" };
                format!("{sign}\\frac{{{}}}{{{q}}}", p.abs())
            }
            Tag::Float => render_maple(t),
            Tag::Complex => {
                let mut out = self.render(&t.children[0])?;
                let im = self.factor(&t.children[1], false)?;
                if !im.starts_with('-') {
                    out.push('+');
                }
                out.push_str(&im);
                out.push_str("\\idt\\iunit");
                out
            }
            Tag::Sum => {
                let mut out = String::new();
                for (i, c) in t.children.iter().enumerate() {
                    let part = if c.tag == Tag::Sum {
                        format!("({})", self.render(c)?)
                    } else {
                        self.render(c)?
                    };
                    if i > 0 && !part.starts_with('-') {
                        out.push('+');
                    }
                    out.push_str(&part);
                }
                out
            }
            Tag::Prod => {
                let mut out = String::new();
                let mut factors = &t.children[..];
                if factors.len() > 1 && factors[0].is_minus_one() {
                    out.push('-');
                    factors = &factors[1..];
                }
                for (i, f) in factors.iter().enumerate() {
                    if i > 0 {
                        out.push_str("\\idt");
                    }
                    push_latex(&mut out, &self.factor(f, i == 0)?);
                }
                out
            }
            Tag::Divide => format!(
                "\\frac{{{}}}{{{}}}",
                self.render(&t.children[0])?,
                self.render(&t.children[1])?
            ),
            Tag::Power => {
                let base = self.power_base(&t.children[0])?;
                format!("{base}^{{{}}}", self.render(&t.children[1])?)
            }
            Tag::Function => self.function(t)?,
            Tag::String | Tag::ExpSeq | Tag::Equation | Tag::Range => return Err(BackwardError::UnsupportedTag(t.tag)),
        })
    }

    fn factor(&self, f: &InertForm, leading: bool) -> Result<String, BackwardError> {
        let s = self.render(f)?;
        let wrap = match f.tag {
            Tag::Sum | Tag::Prod => true,
            _ => !leading && s.starts_with('-'),
        };
        Ok(if wrap { format!("({s})") } else { s })
    }

    fn power_base(&self, b: &InertForm) -> Result<String, BackwardError> {
        let s = self.render(b)?;
        let radical = matches!(b.function_name(), Some("sqrt" | "root"));
        let plain_parens = b.tag == Tag::Sum || s.starts_with('-');
        let atomic = match b.tag {
            Tag::Name | Tag::IntPos | Tag::Float => true,
            Tag::Function => !radical,
            _ => self.constants.iter().any(|(c, _)| c == b),
        };
        Ok(if plain_parens {
            format!("({s})")
        } else if atomic {
            s
        } else {
            format!("\\left({s}\\right)")
        })
    }

    fn function(&self, t: &InertForm) -> Result<String, BackwardError> {
        let name = t.function_name().unwrap_or_default();
        let args = t.function_args();
        let rule = self.rule(name, args.len()).ok_or_else(|| BackwardError::UnknownFunction {
            name: name.to_string(),
            arity: args.len(),
        })?;
        let rendered = args
            .iter()
            .zip(&rule.argument_wrappers)
            .map(|(a, wrapper)| {
                let s = self.render(a)?;
                Ok(match wrapper {
                    Some(w) => format!("{w}{{{s}}}"),
                    None => s,
                })
            })
            .collect::<Result<Vec<_>, BackwardError>>()?;
        let template = CasPattern::new(&rule.latex_template).expect("reverse templates are non-empty");
        Ok(template.apply(&rendered))
    }
}

/// Inverts one Maple pattern of `entry`, if it has an invertible shape.
fn reverse_rule(lex: &Lexicon, entry: &LexiconEntry, pattern: &CasPattern, optional: bool) -> Option<ReverseRule> {
    let slots = entry.arity() + usize::from(optional);
    let mut args_text = pattern.template().to_string();
    for i in (0..slots).rev() {
        args_text = args_text.replace(&format!("${i}"), &format!("{PLACEHOLDER}{i}"));
    }
    let tree = parse_maple(&args_text).ok()?;
    let function_name = tree.function_name()?.to_string();
    let placeholder_index = |t: &InertForm| t.as_name()?.strip_prefix(PLACEHOLDER)?.parse::<usize>().ok();

    let mut slot_of_arg = Vec::new();
    let mut wrappers = Vec::new();
    for a in tree.function_args() {
        if let Some(slot) = placeholder_index(a) {
            slot_of_arg.push(slot);
            wrappers.push(None);
            continue;
        }
        let inner = a.function_args();
        let slot = match inner {
            [x] => placeholder_index(x)?,
            _ => return None,
        };
        let inverse = INVERSES.iter().find(|(f, _)| Some(*f) == a.function_name())?.1;
        let inverse_macro = lex.entries.values().find(|e| {
            e.arity() == 1 && e.translation(Dialect::Maple).map(CasPattern::template) == Some(&format!("{inverse}($0)"))
        })?;
        slot_of_arg.push(slot);
        wrappers.push(Some(format!(
            "{}{}",
            inverse_macro.macro_name,
            "@".repeat(inverse_macro.preferred_at())
        )));
    }
    let mut sorted = slot_of_arg.clone();
    sorted.sort_unstable();
    if sorted != (0..slots).collect::<Vec<_>>() {
        return None;
    }
    let arg_for_slot = |slot: usize| slot_of_arg.iter().position(|&s| s == slot).expect("bijective");

    let mut template = entry.macro_name.clone();
    let mut slot = 0;
    if optional {
        template.push_str(&format!("[${}]", arg_for_slot(0)));
        slot = 1;
    }
    for _ in 0..entry.num_params {
        template.push_str(&format!("{{${}}}", arg_for_slot(slot)));
        slot += 1;
    }
    if entry.num_vars > 0 {
        template.push_str(&"@".repeat(entry.preferred_at()));
        for _ in 0..entry.num_vars {
            template.push_str(&format!("{{${}}}", arg_for_slot(slot)));
            slot += 1;
        }
    }
    Some(ReverseRule {
        function_name,
        arity: slots,
        latex_template: template,
        argument_wrappers: wrappers,
    })
}

/// Renders a preprocessed tree as semantic LaTeX.
pub fn translate_backward(tree: &InertForm, lex: &Lexicon) -> Result<TranslationResult, BackwardError> {
    ReverseLexicon::new(lex).translate(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{preprocess, preprocess_with, PreprocessOptions};

    fn back(s: &str) -> String {
        let lex = Lexicon::seed();
        translate_backward(&preprocess(&parse_maple(s).unwrap()), &lex).unwrap().output
    }

    #[test]
    fn table_three_step_two() {
        assert_eq!(back("(cos(a*Theta))/(2)"), "\\frac{1}{2}\\idt\\cos@{a\\idt\\Theta}");
        assert_eq!(back("(1)/(2)*cos(a*Theta)"), "\\frac{1}{2}\\idt\\cos@{a\\idt\\Theta}");
    }

    #[test]
    fn divide_examples() {
        assert_eq!(
            back("cos(Pi*2)/sqrt((3*beta)/4-3*I)"),
            "\\frac{\\cos@{2\\idt\\cpi}}{\\sqrt{\\frac{3}{4}\\idt\\beta-3\\idt\\iunit}}"
        );
        assert_eq!(back("(1/(x+3))^(-I)"), "\\left(\\frac{1}{3+x}\\right)^{-\\iunit}");
    }

    #[test]
    fn without_divide() {
        let lex = Lexicon::seed();
        let t = preprocess_with(&parse_maple("(1/(x+3))^(-I)").unwrap(), PreprocessOptions { divide: false });
        assert_eq!(translate_backward(&t, &lex).unwrap().output, "\\left((3+x)^{-1}\\right)^{-\\iunit}");
    }

    #[test]
    fn simple_and_reordered() {
        assert_eq!(back("x"), "x");
        assert_eq!(back("a*(-1)"), "-a");
        assert_eq!(back("JacobiP(n,alpha,beta,x)"), "\\JacobiP{\\alpha}{\\beta}{n}@{x}");
        assert_eq!(back("EllipticF(z,k)"), "\\EllIntF@{\\asin@{z}}{k}");
        assert_eq!(back("root(x,3)"), "\\sqrt[3]{x}");
        assert_eq!(back("exp(1)^2"), "\\expe^{2}");
        assert_eq!(back("sqrt(z)^2"), "\\left(\\sqrt{z}\\right)^{2}");
        assert_eq!(back("2*z"), "2\\idt z");
        assert_eq!(back("a-b*c"), "a-b\\idt c");
        assert_eq!(back("x=infinity"), "x=\\infty");
        assert_eq!(back("gamma+Catalan"), "\\EulerConstant+\\CatalansConstant");
    }

    #[test]
    fn errors() {
        let lex = Lexicon::seed();
        let t = parse_maple("int(x,x=0..1)").unwrap();
        assert_eq!(
            translate_backward(&t, &lex),
            Err(BackwardError::UnknownFunction {
                name: "int".into(),
                arity: 2
            })
        );
        let t = parse_maple("0..1").unwrap();
        assert_eq!(translate_backward(&t, &lex), Err(BackwardError::UnsupportedTag(Tag::Range)));
        let t = parse_maple("sin(a=b)").unwrap();
        assert_eq!(translate_backward(&t, &lex), Err(BackwardError::UnsupportedTag(Tag::Equation)));
    }

    #[test]
    fn derived_rules() {
        let rev = ReverseLexicon::new(&Lexicon::seed());
        let r = rev.rule("EllipticF", 2).unwrap();
        assert_eq!(r.latex_template, "\\EllIntF@{$0}{$1}");
        assert_eq!(r.argument_wrappers[0].as_deref(), Some("\\asin@"));
        assert_eq!(rev.rule("JacobiP", 4).unwrap().latex_template, "\\JacobiP{$1}{$2}{$0}@{$3}");
        assert_eq!(rev.rule("root", 2).unwrap().latex_template, "\\sqrt[$1]{$0}");
    }
}
