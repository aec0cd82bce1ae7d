//! First-scan tokenizer for math-mode LaTeX.
//!
//! The scan is deliberately shallow: it splits the input into [`MathTerm`]s,
//! groups delimited balanced expressions and attaches features from the
//! lexicon. It does not build operator hierarchy, so `x^3` yields the three
//! sibling leaves `x`, `^`, `3`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{Lexicon, CONSTANT_LETTERS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced delimiters at byte {position}: {detail}")]
    UnbalancedDelimiters { position: usize, detail: String },
    #[error("unexpected character `{ch}` at byte {position}")]
    UnexpectedCharacter { position: usize, ch: char },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    MacroCommand,
    LatinLetter,
    GreekLetterCommand,
    DigitSequence,
    OperatorSymbol,
    RelationSymbol,
    AtMarker,
    Caret,
    Underscore,
    Reserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSource {
    Lexicon,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureRecord {
    pub role: String,
    pub source: FeatureSource,
}

/// A tagged lexical unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MathTerm {
    /// Exact source slice.
    pub lexeme: String,
    pub kind: TermKind,
    pub definite_tags: BTreeSet<String>,
    pub tentative_features: Vec<FeatureRecord>,
    /// Byte offset of the lexeme in the input.
    pub offset: usize,
}

impl MathTerm {
    /// Number of `@` symbols for an at-marker, zero otherwise.
    pub fn at_count(&self) -> usize {
        match self.kind {
            TermKind::AtMarker => self.lexeme.len(),
            _ => 0,
        }
    }

    pub fn is_macro(&self, name: &str) -> bool {
        matches!(self.kind, TermKind::MacroCommand | TermKind::GreekLetterCommand) && self.lexeme == name
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelimiterClass {
    Curly,
    BracketOptional,
    Paren,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PomTree {
    Leaf(MathTerm),
    Group {
        class: DelimiterClass,
        /// Source spelling of the delimiters, e.g. `\left(` and `\right)`.
        open: String,
        close: String,
        children: Vec<PomTree>,
    },
    Sequence(Vec<PomTree>),
}

impl PomTree {
    pub fn children(&self) -> &[PomTree] {
        match self {
            PomTree::Leaf(_) => &[],
            PomTree::Group { children, .. } | PomTree::Sequence(children) => children,
        }
    }

    pub fn as_leaf(&self) -> Option<&MathTerm> {
        match self {
            PomTree::Leaf(t) => Some(t),
            _ => None,
        }
    }

    pub fn group_class(&self) -> Option<DelimiterClass> {
        match self {
            PomTree::Group { class, .. } => Some(*class),
            _ => None,
        }
    }

    /// All leaves in document order.
    pub fn terms(&self) -> Vec<&MathTerm> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a MathTerm>) {
        match self {
            PomTree::Leaf(t) => out.push(t),
            _ => self.children().iter().for_each(|c| c.collect_terms(out)),
        }
    }

    /// Reassembles LaTeX source from the tree. Whitespace is only emitted where
    /// it is needed to keep a control word apart from a following letter.
    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        self.write_latex(&mut out);
        out
    }

    fn write_latex(&self, out: &mut String) {
        match self {
            PomTree::Leaf(t) => push_latex(out, &t.lexeme),
            PomTree::Group {
                open,
                close,
                children,
                ..
            } => {
                push_latex(out, open);
                children.iter().for_each(|c| c.write_latex(out));
                push_latex(out, close);
            }
            PomTree::Sequence(children) => children.iter().for_each(|c| c.write_latex(out)),
        }
    }

    /// Number of `=` relation leaves outside any group.
    pub fn top_level_equals(&self) -> usize {
        self.children()
            .iter()
            .filter(|c| c.as_leaf().is_some_and(|t| t.kind == TermKind::RelationSymbol && t.lexeme == "="))
            .count()
    }
}

impl fmt::Display for PomTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PomTree::Leaf(t) => write!(f, "{}", t.lexeme),
            PomTree::Group {
                class, children, ..
            } => {
                let name = match class {
                    DelimiterClass::Curly => "curly",
                    DelimiterClass::BracketOptional => "optional",
                    DelimiterClass::Paren => "paren",
                };
                write!(f, "{name}[")?;
                write_list(f, children)?;
                write!(f, "]")
            }
            PomTree::Sequence(children) => {
                write!(f, "seq[")?;
                write_list(f, children)?;
                write!(f, "]")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[PomTree]) -> fmt::Result {
    for (i, c) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// Appends a LaTeX fragment, inserting a space when the previous text ends
/// in a control word and the fragment starts with a letter.
pub fn push_latex(out: &mut String, fragment: &str) {
    if fragment.starts_with(|c: char| c.is_ascii_alphabetic()) && ends_with_control_word(out) {
        out.push(' ');
    }
    out.push_str(fragment);
}

fn ends_with_control_word(s: &str) -> bool {
    let letters = s.bytes().rev().take_while(u8::is_ascii_alphabetic).count();
    letters > 0 && s.len() > letters && s.as_bytes()[s.len() - letters - 1] == b'\\' && {
        // an escaped backslash (`\\`) followed by letters is not a control word
        let before = &s[..s.len() - letters - 1];
        before.bytes().rev().take_while(|&b| b == b'\\').count() % 2 == 0
    }
}

const OPERATORS: &str = "+-*/.,!|';:";
const RELATIONS: &str = "=<>";

struct Frame {
    class: DelimiterClass,
    open: String,
    position: usize,
    children: Vec<PomTree>,
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    kb: &'a Lexicon,
    stack: Vec<Frame>,
}

/// Scans math-mode LaTeX (without `$` delimiters) into a [`PomTree`].
pub fn scan(input: &str, kb: &Lexicon) -> Result<PomTree, ScanError> {
    if input.trim().is_empty() {
        return Err(ScanError::EmptyInput);
    }
    let mut s = Scanner {
        src: input,
        pos: 0,
        kb,
        stack: vec![Frame {
            class: DelimiterClass::Curly,
            open: String::new(),
            position: 0,
            children: Vec::new(),
        }],
    };
    s.run()?;
    if s.stack.len() > 1 {
        let frame = s.stack.pop().expect("open frame");
        return Err(ScanError::UnbalancedDelimiters {
            position: frame.position,
            detail: format!("`{}` is never closed", frame.open),
        });
    }
    let root = s.stack.pop().expect("root frame");
    if root.children.is_empty() {
        return Err(ScanError::EmptyInput);
    }
    Ok(PomTree::Sequence(root.children))
}

impl<'a> Scanner<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn push(&mut self, node: PomTree) {
        self.stack.last_mut().expect("frame").children.push(node);
    }

    fn leaf(&mut self, start: usize, kind: TermKind) {
        let lexeme = &self.src[start..self.pos];
        let term = self.tag(lexeme, kind, start);
        self.push(PomTree::Leaf(term));
    }

    fn open(&mut self, class: DelimiterClass, start: usize) {
        self.stack.push(Frame {
            class,
            open: self.src[start..self.pos].to_string(),
            position: start,
            children: Vec::new(),
        });
    }

    fn close(&mut self, class: DelimiterClass, start: usize) -> Result<(), ScanError> {
        let close = &self.src[start..self.pos];
        let frame = match self.stack.last() {
            Some(f) if self.stack.len() > 1 => f,
            _ => {
                return Err(ScanError::UnbalancedDelimiters {
                    position: start,
                    detail: format!("`{close}` without an opening delimiter"),
                })
            }
        };
        let sized_open = frame.open.starts_with("\\left");
        let sized_close = close.starts_with("\\right");
        if frame.class != class || sized_open != sized_close {
            return Err(ScanError::UnbalancedDelimiters {
                position: start,
                detail: format!("`{close}` does not match `{}` at byte {}", frame.open, frame.position),
            });
        }
        let frame = self.stack.pop().expect("frame");
        self.push(PomTree::Group {
            class: frame.class,
            open: frame.open,
            close: close.to_string(),
            children: frame.children,
        });
        Ok(())
    }

    fn previous_is_macro(&self) -> bool {
        self.stack
            .last()
            .and_then(|f| f.children.last())
            .and_then(PomTree::as_leaf)
            .is_some_and(|t| t.kind == TermKind::MacroCommand)
    }

    fn in_bracket(&self) -> bool {
        self.stack.len() > 1 && self.stack.last().is_some_and(|f| f.class == DelimiterClass::BracketOptional)
    }

    fn run(&mut self) -> Result<(), ScanError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                c if c.is_whitespace() => self.pos += c.len_utf8(),
                '\\' => self.control(start)?,
                'a'..='z' | 'A'..='Z' => {
                    self.pos += 1;
                    self.leaf(start, TermKind::LatinLetter);
                }
                '0'..='9' => {
                    self.pos += self.rest().bytes().take_while(u8::is_ascii_digit).count();
                    self.leaf(start, TermKind::DigitSequence);
                }
                '@' => {
                    self.pos += self.rest().bytes().take_while(|&b| b == b'@').count().min(3);
                    self.leaf(start, TermKind::AtMarker);
                }
                '^' => {
                    self.pos += 1;
                    self.leaf(start, TermKind::Caret);
                }
                '_' => {
                    self.pos += 1;
                    self.leaf(start, TermKind::Underscore);
                }
                '{' => {
                    self.pos += 1;
                    self.open(DelimiterClass::Curly, start);
                }
                '}' => {
                    self.pos += 1;
                    self.close(DelimiterClass::Curly, start)?;
                }
                '(' => {
                    self.pos += 1;
                    self.open(DelimiterClass::Paren, start);
                }
                ')' => {
                    self.pos += 1;
                    self.close(DelimiterClass::Paren, start)?;
                }
                '[' if self.previous_is_macro() => {
                    self.pos += 1;
                    self.open(DelimiterClass::BracketOptional, start);
                }
                ']' if self.in_bracket() => {
                    self.pos += 1;
                    self.close(DelimiterClass::BracketOptional, start)?;
                }
                '[' | ']' => {
                    self.pos += 1;
                    self.leaf(start, TermKind::OperatorSymbol);
                }
                '&' | '~' => {
                    self.pos += 1;
                    self.leaf(start, TermKind::Reserved);
                }
                '%' => {
                    self.pos += self.rest().find('\n').unwrap_or(self.rest().len());
                    self.leaf(start, TermKind::Reserved);
                }
                c if OPERATORS.contains(c) => {
                    self.pos += 1;
                    self.leaf(start, TermKind::OperatorSymbol);
                }
                c if RELATIONS.contains(c) => {
                    self.pos += 1;
                    self.leaf(start, TermKind::RelationSymbol);
                }
                other => {
                    return Err(ScanError::UnexpectedCharacter {
                        position: start,
                        ch: other,
                    })
                }
            }
        }
        Ok(())
    }

    fn control(&mut self, start: usize) -> Result<(), ScanError> {
        let after = &self.rest()[1..];
        let letters = after.bytes().take_while(u8::is_ascii_alphabetic).count();
        if letters == 0 {
            let Some(next) = after.chars().next() else {
                return Err(ScanError::UnexpectedCharacter {
                    position: start,
                    ch: '\\',
                });
            };
            self.pos += 1 + next.len_utf8();
            let kind = if next == '\\' {
                TermKind::Reserved
            } else {
                TermKind::MacroCommand
            };
            self.leaf(start, kind);
            return Ok(());
        }
        self.pos += 1 + letters;
        let name = &self.src[start..self.pos];
        match (name, self.peek()) {
            ("\\left", Some(d @ ('(' | '['))) => {
                self.pos += 1;
                let _ = d;
                self.open(DelimiterClass::Paren, start);
            }
            ("\\right", Some(')' | ']')) => {
                self.pos += 1;
                self.close(DelimiterClass::Paren, start)?;
            }
            _ => {
                let kind = if self.kb.is_greek(name) {
                    TermKind::GreekLetterCommand
                } else {
                    TermKind::MacroCommand
                };
                self.leaf(start, kind);
            }
        }
        Ok(())
    }

    fn tag(&self, lexeme: &str, kind: TermKind, offset: usize) -> MathTerm {
        let definite: &[&str] = match kind {
            TermKind::MacroCommand => &["command"],
            TermKind::LatinLetter => &["letter"],
            TermKind::GreekLetterCommand => &["command", "greek-letter"],
            TermKind::DigitSequence => &["number"],
            TermKind::OperatorSymbol => &["operation"],
            TermKind::RelationSymbol => &["relation"],
            TermKind::AtMarker => &["at-marker"],
            TermKind::Caret => &["exponent"],
            TermKind::Underscore => &["subscript"],
            TermKind::Reserved => &["reserved"],
        };
        let mut features = Vec::new();
        match kind {
            TermKind::MacroCommand | TermKind::GreekLetterCommand => {
                if let Some(entry) = self.kb.lookup(lexeme) {
                    let source = if self.kb.is_builtin(lexeme) {
                        FeatureSource::Builtin
                    } else {
                        FeatureSource::Lexicon
                    };
                    features.push(FeatureRecord {
                        role: entry.role.as_str().to_string(),
                        source,
                    });
                }
                if let Some(c) = self.kb.constant_for_command(lexeme) {
                    features.push(constant_feature(&c.semantic_macro));
                }
            }
            TermKind::LatinLetter => {
                let letter = lexeme.chars().next().unwrap_or(' ');
                if CONSTANT_LETTERS.contains(&letter) {
                    if let Some(c) = self.kb.constant_for_letter(letter) {
                        features.push(constant_feature(&c.semantic_macro));
                    }
                }
            }
            _ => {}
        }
        MathTerm {
            lexeme: lexeme.to_string(),
            kind,
            definite_tags: definite.iter().map(|s| s.to_string()).collect(),
            tentative_features: features,
            offset,
        }
    }
}

fn constant_feature(semantic_macro: &str) -> FeatureRecord {
    FeatureRecord {
        role: format!("constant {semantic_macro}"),
        source: FeatureSource::Lexicon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb() -> Lexicon {
        Lexicon::seed()
    }

    fn shape(t: &PomTree) -> String {
        t.to_string()
    }

    #[test]
    fn frac_groups_numerator_and_denominator() {
        let t = scan("\\frac{1}{2}", &kb()).unwrap();
        assert_eq!(shape(&t), "seq[\\frac curly[1] curly[2]]");
        assert_eq!(t.children()[1].group_class(), Some(DelimiterClass::Curly));
    }

    #[test]
    fn single_letter() {
        let t = scan("x", &kb()).unwrap();
        let leaf = t.children()[0].as_leaf().unwrap();
        assert_eq!(leaf.kind, TermKind::LatinLetter);
        assert!(leaf.tentative_features.is_empty());
    }

    #[test]
    fn radical_example_tree() {
        let t = scan("\\sqrt[3]{x^3} + \\frac{y}{2}", &kb()).unwrap();
        assert_eq!(shape(&t), "seq[\\sqrt optional[3] curly[x ^ 3] + \\frac curly[y] curly[2]]");
        let kids = t.children();
        assert_eq!(kids[1].group_class(), Some(DelimiterClass::BracketOptional));
        let caret = kids[2].children()[1].as_leaf().unwrap();
        assert_eq!(caret.kind, TermKind::Caret);
    }

    #[test]
    fn jacobi_example_tree() {
        let t = scan("\\JacobiP{\\alpha}{\\beta}{n}@{\\cos@{a\\Theta}}", &kb()).unwrap();
        assert_eq!(
            shape(&t),
            "seq[\\JacobiP curly[\\alpha] curly[\\beta] curly[n] @ curly[\\cos @ curly[a \\Theta]]]"
        );
        let jac = t.children()[0].as_leaf().unwrap();
        assert_eq!(jac.tentative_features[0].role, "function");
        assert_eq!(jac.tentative_features[0].source, FeatureSource::Lexicon);
        let alpha = t.children()[1].children()[0].as_leaf().unwrap();
        assert_eq!(alpha.kind, TermKind::GreekLetterCommand);
        assert!(alpha.tentative_features.iter().any(|f| f.role.contains("\\finestructure")));
    }

    #[test]
    fn at_markers_fuse() {
        let t = scan("\\sin@@{z}", &kb()).unwrap();
        let at = t.children()[1].as_leaf().unwrap();
        assert_eq!(at.at_count(), 2);
        let t = scan("\\sin@@@@{z}", &kb()).unwrap();
        assert_eq!(t.children()[1].as_leaf().unwrap().at_count(), 3);
        assert_eq!(t.children()[2].as_leaf().unwrap().at_count(), 1);
    }

    #[test]
    fn digits_are_maximal_runs() {
        let t = scan("3.51", &kb()).unwrap();
        assert_eq!(shape(&t), "seq[3 . 51]");
    }

    #[test]
    fn builtin_features_and_unknown_macros() {
        let t = scan("\\frac{\\qhyperg}{2}", &kb()).unwrap();
        let frac = t.children()[0].as_leaf().unwrap();
        assert_eq!(frac.tentative_features[0].source, FeatureSource::Builtin);
        let unknown = t.children()[1].children()[0].as_leaf().unwrap();
        assert_eq!(unknown.kind, TermKind::MacroCommand);
        assert!(unknown.tentative_features.is_empty());
    }

    #[test]
    fn constant_letters_get_tentative_constant_feature() {
        let t = scan("e", &kb()).unwrap();
        let e = t.children()[0].as_leaf().unwrap();
        assert_eq!(e.tentative_features[0].role, "constant \\expe");
    }

    #[test]
    fn sized_parens_form_one_group() {
        let t = scan("\\left(\\frac{1}{3+x}\\right)^{-\\iunit}", &kb()).unwrap();
        let g = &t.children()[0];
        assert_eq!(g.group_class(), Some(DelimiterClass::Paren));
        assert_eq!(t.to_latex(), "\\left(\\frac{1}{3+x}\\right)^{-\\iunit}");
    }

    #[test]
    fn errors() {
        assert_eq!(scan("  ", &kb()), Err(ScanError::EmptyInput));
        assert!(matches!(scan("\\frac{1}{2", &kb()), Err(ScanError::UnbalancedDelimiters { position: 8, .. })));
        assert!(matches!(scan("x}", &kb()), Err(ScanError::UnbalancedDelimiters { position: 1, .. })));
        assert!(matches!(scan("\\sqrt[3}{x}", &kb()), Err(ScanError::UnbalancedDelimiters { .. })));
        assert!(matches!(scan("\\left(x)", &kb()), Err(ScanError::UnbalancedDelimiters { .. })));
        assert!(matches!(scan("x#", &kb()), Err(ScanError::UnexpectedCharacter { ch: '#', .. })));
        assert!(matches!(scan("x\\", &kb()), Err(ScanError::UnexpectedCharacter { .. })));
    }

    #[test]
    fn reserved_symbols() {
        let t = scan("a \\\\ b & c % note\n d", &kb()).unwrap();
        let reserved: Vec<_> = t
            .terms()
            .into_iter()
            .filter(|t| t.kind == TermKind::Reserved)
            .map(|t| t.lexeme.clone())
            .collect();
        assert_eq!(reserved, ["\\\\", "&", "% note"]);
    }

    #[test]
    fn reassembly_keeps_control_words_apart() {
        let t = scan("2\\idt z", &kb()).unwrap();
        assert_eq!(t.to_latex(), "2\\idt z");
        let t = scan("\\\\a", &kb()).unwrap();
        assert_eq!(t.to_latex(), "\\\\a");
    }

    #[test]
    fn bracket_not_after_macro_is_a_symbol() {
        let t = scan("[0,1]", &kb()).unwrap();
        assert_eq!(shape(&t), "seq[[ 0 , 1 ]]");
    }

    #[test]
    fn top_level_equals_ignores_groups() {
        let t = scan("a=\\frac{b=c}{2}", &kb()).unwrap();
        assert_eq!(t.top_level_equals(), 1);
    }
}
