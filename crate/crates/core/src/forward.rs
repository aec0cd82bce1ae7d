//! Semantic LaTeX to CAS syntax.
//!
//! Each node of the scanned tree is translated in place: macros by filling
//! their lexicon pattern with the recursively translated argument groups,
//! letters and digits verbatim, groups by translating their children. The
//! flat `x ^ 3` siblings left by the scanner are re-associated here.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{AdvisoryKind, Dialect, Lexicon, LexiconEntry, Role, CONSTANT_LETTERS};
use crate::scan::{DelimiterClass, MathTerm, PomTree, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoKind {
    ConstantSuggestion,
    BranchCut,
    Domain,
    DefinitionDifference,
    NoDirectTranslation,
    DlmfLink,
}

impl InfoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InfoKind::ConstantSuggestion => "constant-suggestion",
            InfoKind::BranchCut => "branch-cut",
            InfoKind::Domain => "domain",
            InfoKind::DefinitionDifference => "definition-difference",
            InfoKind::NoDirectTranslation => "no-direct-translation",
            InfoKind::DlmfLink => "dlmf-link",
        }
    }

    /// Advisories that can make a translation wrong are warnings.
    pub fn is_warning(self) -> bool {
        !matches!(self, InfoKind::ConstantSuggestion | InfoKind::DlmfLink)
    }
}

impl From<AdvisoryKind> for InfoKind {
    fn from(k: AdvisoryKind) -> Self {
        match k {
            AdvisoryKind::BranchCut => InfoKind::BranchCut,
            AdvisoryKind::Domain => InfoKind::Domain,
            AdvisoryKind::DefinitionDifference => InfoKind::DefinitionDifference,
            AdvisoryKind::NoDirectTranslation => InfoKind::NoDirectTranslation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfoMessage {
    pub kind: InfoKind,
    pub text: String,
}

impl fmt::Display for InfoMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = if self.kind.is_warning() { "warn" } else { "info" };
        write!(f, "{level}: {}: {}", self.kind.as_str(), self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationResult {
    pub output: String,
    pub infos: Vec<InfoMessage>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("`{macro_name}` expects {expected} argument groups, found {found}")]
    ArityMismatch {
        macro_name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{macro_name}` has no direct translation to {dialect}")]
    NoDirectTranslation { macro_name: String, dialect: Dialect },
    #[error("`{macro_name}` does not support {count} `@` symbols")]
    UnsupportedAtVariant { macro_name: String, count: usize },
    #[error("missing {0}")]
    MissingOperand(String),
    #[error("unsupported term `{0}`")]
    UnsupportedTerm(String),
    #[error("empty expression")]
    EmptyExpression,
}

const SPACING: &[&str] = &["\\,", "\\;", "\\:", "\\!", "\\ ", "\\quad", "\\qquad"];

pub fn translate_forward(tree: &PomTree, lex: &Lexicon, dialect: Dialect) -> Result<TranslationResult, TranslateError> {
    let mut t = Translator {
        lex,
        dialect,
        infos: Vec::new(),
    };
    let output = match tree {
        PomTree::Sequence(children) => t.seq(children)?,
        other => t.seq(std::slice::from_ref(other))?,
    };
    Ok(TranslationResult {
        output,
        infos: t.infos,
    })
}

enum Piece {
    Operand { text: String, digits: bool },
    Operator(String),
}

enum Atom {
    Operand(String),
    Operator(String),
    Skip,
}

struct Translator<'a> {
    lex: &'a Lexicon,
    dialect: Dialect,
    infos: Vec<InfoMessage>,
}

impl Translator<'_> {
    fn info(&mut self, kind: InfoKind, text: String) {
        let msg = InfoMessage { kind, text };
        if !self.infos.contains(&msg) {
            self.infos.push(msg);
        }
    }

    fn seq(&mut self, nodes: &[PomTree]) -> Result<String, TranslateError> {
        let mut pieces: Vec<Piece> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            if let PomTree::Leaf(term) = &nodes[i] {
                match term.kind {
                    TermKind::Caret | TermKind::Underscore => {
                        let base = match pieces.pop() {
                            Some(Piece::Operand { text, .. }) => text,
                            _ => return Err(TranslateError::MissingOperand(format!("operand before `{}`", term.lexeme))),
                        };
                        i += 1;
                        let (arg, leftover) = self.script_argument(nodes, &mut i, term)?;
                        let text = if term.kind == TermKind::Caret {
                            format!("{}^{}", parenthesize(&base), arg)
                        } else {
                            match self.dialect {
                                Dialect::Maple => format!("{base}[{}]", unwrap_parens(&arg)),
                                Dialect::Mathematica => format!("Subscript[{base},{}]", unwrap_parens(&arg)),
                            }
                        };
                        pieces.push(Piece::Operand { text, digits: false });
                        if let Some(rest) = leftover {
                            pieces.push(Piece::Operand { text: rest, digits: true });
                        }
                        continue;
                    }
                    TermKind::OperatorSymbol | TermKind::RelationSymbol => {
                        i += 1;
                        if term.lexeme == "." && self.fuse_decimal(&mut pieces, nodes.get(i)) {
                            i += 1;
                            continue;
                        }
                        if matches!(term.lexeme.as_str(), "[" | "]") {
                            return Err(TranslateError::UnsupportedTerm(term.lexeme.clone()));
                        }
                        let op = if term.lexeme == "=" {
                            self.dialect.equals_token().to_string()
                        } else {
                            term.lexeme.clone()
                        };
                        pieces.push(Piece::Operator(op));
                        continue;
                    }
                    TermKind::AtMarker | TermKind::Reserved => {
                        return Err(TranslateError::UnsupportedTerm(term.lexeme.clone()))
                    }
                    _ => {}
                }
            }
            let digits = matches!(&nodes[i], PomTree::Leaf(t) if t.kind == TermKind::DigitSequence);
            match self.atom(nodes, &mut i)? {
                Atom::Operand(text) => pieces.push(Piece::Operand { text, digits }),
                Atom::Operator(op) => pieces.push(Piece::Operator(op)),
                Atom::Skip => {}
            }
        }
        if !pieces.iter().any(|p| matches!(p, Piece::Operand { .. })) {
            return Err(TranslateError::EmptyExpression);
        }
        let mut out = String::new();
        let mut previous_operand = false;
        for piece in pieces {
            match piece {
                Piece::Operand { text, .. } => {
                    if previous_operand {
                        out.push_str(self.dialect.mult_token());
                    }
                    out.push_str(&text);
                    previous_operand = true;
                }
                Piece::Operator(op) => {
                    out.push_str(&op);
                    previous_operand = false;
                }
            }
        }
        Ok(out)
    }

    /// Joins `3`, `.`, `14` into one decimal literal.
    fn fuse_decimal(&self, pieces: &mut [Piece], next: Option<&PomTree>) -> bool {
        let Some(PomTree::Leaf(next)) = next else {
            return false;
        };
        if next.kind != TermKind::DigitSequence {
            return false;
        }
        match pieces.last_mut() {
            Some(Piece::Operand { text, digits: true }) => {
                text.push('.');
                text.push_str(&next.lexeme);
                true
            }
            _ => false,
        }
    }

    /// Argument of `^` or `_`. A bare digit run contributes only its first
    /// digit, as in TeX; the rest is returned as a separate operand.
    fn script_argument(
        &mut self,
        nodes: &[PomTree],
        i: &mut usize,
        script: &MathTerm,
    ) -> Result<(String, Option<String>), TranslateError> {
        let missing = || TranslateError::MissingOperand(format!("argument of `{}`", script.lexeme));
        let node = nodes.get(*i).ok_or_else(missing)?;
        if let PomTree::Leaf(t) = node {
            if t.kind == TermKind::DigitSequence && t.lexeme.len() > 1 {
                *i += 1;
                let (first, rest) = t.lexeme.split_at(1);
                return Ok((first.to_string(), Some(rest.to_string())));
            }
        }
        match self.atom(nodes, i)? {
            Atom::Operand(text) => Ok((parenthesize(&text), None)),
            _ => Err(missing()),
        }
    }

    fn atom(&mut self, nodes: &[PomTree], i: &mut usize) -> Result<Atom, TranslateError> {
        match &nodes[*i] {
            PomTree::Leaf(term) => match term.kind {
                TermKind::LatinLetter => {
                    *i += 1;
                    self.letter(term);
                    Ok(Atom::Operand(term.lexeme.clone()))
                }
                TermKind::DigitSequence => {
                    *i += 1;
                    Ok(Atom::Operand(term.lexeme.clone()))
                }
                TermKind::MacroCommand | TermKind::GreekLetterCommand => self.command(nodes, i),
                _ => Err(TranslateError::UnsupportedTerm(term.lexeme.clone())),
            },
            PomTree::Group { class, children, open, .. } => {
                *i += 1;
                match class {
                    DelimiterClass::Paren => Ok(Atom::Operand(format!("({})", self.seq(children)?))),
                    DelimiterClass::Curly => Ok(Atom::Operand(parenthesize(&self.seq(children)?))),
                    DelimiterClass::BracketOptional => Err(TranslateError::UnsupportedTerm(open.clone())),
                }
            }
            PomTree::Sequence(children) => {
                *i += 1;
                Ok(Atom::Operand(parenthesize(&self.seq(children)?)))
            }
        }
    }

    fn letter(&mut self, term: &MathTerm) {
        let Some(letter) = term.lexeme.chars().next().filter(|c| CONSTANT_LETTERS.contains(c)) else {
            return;
        };
        if let Some(c) = self.lex.constant_for_letter(letter) {
            let text = format!("`{letter}` is translated as a plain letter; write {} for the constant", c.semantic_macro);
            self.info(InfoKind::ConstantSuggestion, text);
        }
    }

    fn surface(&mut self, entry: &LexiconEntry) {
        if let Some(link) = &entry.dlmf_link {
            self.info(InfoKind::DlmfLink, format!("{} {link}", entry.macro_name));
        }
        for a in &entry.advisories {
            self.info(a.kind.into(), format!("{}: {}", entry.macro_name, a.text));
        }
    }

    fn command(&mut self, nodes: &[PomTree], i: &mut usize) -> Result<Atom, TranslateError> {
        let PomTree::Leaf(term) = &nodes[*i] else {
            unreachable!("command atoms are leaves")
        };
        let name = term.lexeme.as_str();
        *i += 1;
        if SPACING.contains(&name) {
            return Ok(Atom::Skip);
        }
        let lex = self.lex;
        let entry = lex.lookup(name).ok_or_else(|| TranslateError::UnknownMacro(name.to_string()))?;
        if let Some(c) = lex.constant_for_command(name) {
            let text = format!("`{name}` is translated as a plain symbol; write {} for the constant", c.semantic_macro);
            self.info(InfoKind::ConstantSuggestion, text);
        }
        let no_direct = || TranslateError::NoDirectTranslation {
            macro_name: name.to_string(),
            dialect: self.dialect,
        };
        match entry.role {
            Role::Operator => {
                let op = entry.translation(self.dialect).ok_or_else(no_direct)?;
                Ok(Atom::Operator(op.template().to_string()))
            }
            Role::GreekLetter | Role::Constant => {
                let text = entry.translation(self.dialect).ok_or_else(no_direct)?.template().to_string();
                self.surface(entry);
                Ok(Atom::Operand(text))
            }
            Role::Function => self.function(entry, nodes, i).map(Atom::Operand),
        }
    }

    fn function(&mut self, entry: &LexiconEntry, nodes: &[PomTree], i: &mut usize) -> Result<String, TranslateError> {
        let name = entry.macro_name.as_str();
        let group = |node: Option<&PomTree>, class: DelimiterClass| match node {
            Some(PomTree::Group { class: c, children, .. }) if *c == class => Some(children.clone()),
            _ => None,
        };
        let mut args = Vec::with_capacity(entry.arity() + 1);

        let optional = group(nodes.get(*i), DelimiterClass::BracketOptional);
        if let Some(children) = &optional {
            if !entry.accepts_optional() {
                return Err(TranslateError::UnsupportedTerm(format!("{name}[")));
            }
            *i += 1;
            args.push(self.seq(children)?);
        }

        let arity_error = |found| TranslateError::ArityMismatch {
            macro_name: name.to_string(),
            expected: entry.arity(),
            found,
        };
        for k in 0..entry.num_params {
            let children = group(nodes.get(*i), DelimiterClass::Curly).ok_or_else(|| arity_error(k))?;
            *i += 1;
            args.push(self.seq(&children)?);
        }
        if entry.num_vars > 0 {
            let count = match nodes.get(*i) {
                Some(PomTree::Leaf(t)) if t.kind == TermKind::AtMarker => {
                    *i += 1;
                    t.at_count()
                }
                _ => 0,
            };
            if !entry.at_variants.contains(&(count as u8)) {
                return Err(TranslateError::UnsupportedAtVariant {
                    macro_name: name.to_string(),
                    count,
                });
            }
            for k in 0..entry.num_vars {
                let children =
                    group(nodes.get(*i), DelimiterClass::Curly).ok_or_else(|| arity_error(entry.num_params + k))?;
                *i += 1;
                args.push(self.seq(&children)?);
            }
        }

        let pattern = if optional.is_some() {
            entry.optional_translations.get(&self.dialect)
        } else {
            entry.translation(self.dialect)
        };
        let pattern = pattern.ok_or_else(|| TranslateError::NoDirectTranslation {
            macro_name: name.to_string(),
            dialect: self.dialect,
        })?;
        self.surface(entry);
        Ok(pattern.apply(&args))
    }
}

/// True when `s` has no operator or space outside brackets.
pub fn is_atomic(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' | '-' | '*' | '/' | '^' | '=' | ',' | ' ' | '<' | '>' if depth == 0 => return false,
            _ => {}
        }
    }
    true
}

fn parenthesize(s: &str) -> String {
    if is_atomic(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

fn unwrap_parens(s: &str) -> &str {
    s.strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .filter(|inner| is_atomic(&format!("({inner})")))
        .unwrap_or(s)
}
