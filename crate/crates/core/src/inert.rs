//! Inert expression trees and their nested-list serialization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prefix carried by tag names in the compatibility spelling.
pub const COMPAT_PREFIX: &str = "_Inert_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Name,
    String,
    IntPos,
    IntNeg,
    Rational,
    Float,
    Complex,
    Sum,
    Prod,
    Power,
    Function,
    ExpSeq,
    Equation,
    Range,
    Divide,
}

impl Tag {
    pub const ALL: [Tag; 15] = [
        Tag::Name,
        Tag::String,
        Tag::IntPos,
        Tag::IntNeg,
        Tag::Rational,
        Tag::Float,
        Tag::Complex,
        Tag::Sum,
        Tag::Prod,
        Tag::Power,
        Tag::Function,
        Tag::ExpSeq,
        Tag::Equation,
        Tag::Range,
        Tag::Divide,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Name => "NAME",
            Tag::String => "STRING",
            Tag::IntPos => "INTPOS",
            Tag::IntNeg => "INTNEG",
            Tag::Rational => "RATIONAL",
            Tag::Float => "FLOAT",
            Tag::Complex => "COMPLEX",
            Tag::Sum => "SUM",
            Tag::Prod => "PROD",
            Tag::Power => "POWER",
            Tag::Function => "FUNCTION",
            Tag::ExpSeq => "EXPSEQ",
            Tag::Equation => "EQUATION",
            Tag::Range => "RANGE",
            Tag::Divide => "DIVIDE",
        }
    }

    fn is_leaf(self) -> bool {
        matches!(self, Tag::Name | Tag::String | Tag::IntPos | Tag::IntNeg)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = InertError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.strip_prefix(COMPAT_PREFIX).unwrap_or(s);
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == bare)
            .ok_or_else(|| InertError::MalformedList(format!("unknown tag `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    None,
    Int(i128),
    Str(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InertError {
    #[error("malformed nested list: {0}")]
    MalformedList(String),
}

/// A node of the inert tree. Integers store their magnitude; the sign lives
/// in the tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InertForm {
    pub tag: Tag,
    pub payload: Payload,
    pub children: Vec<InertForm>,
}

impl InertForm {
    fn node(tag: Tag, children: Vec<InertForm>) -> Self {
        InertForm {
            tag,
            payload: Payload::None,
            children,
        }
    }

    pub fn name(s: impl Into<String>) -> Self {
        InertForm {
            tag: Tag::Name,
            payload: Payload::Str(s.into()),
            children: Vec::new(),
        }
    }

    pub fn string(s: impl Into<String>) -> Self {
        InertForm {
            tag: Tag::String,
            payload: Payload::Str(s.into()),
            children: Vec::new(),
        }
    }

    /// INTPOS or INTNEG depending on the sign of `v`.
    pub fn int(v: i128) -> Self {
        InertForm {
            tag: if v < 0 { Tag::IntNeg } else { Tag::IntPos },
            payload: Payload::Int(v.abs()),
            children: Vec::new(),
        }
    }

    pub fn rational(p: i128, q: i128) -> Self {
        Self::node(Tag::Rational, vec![Self::int(p), Self::int(q)])
    }

    /// `mantissa * 10^exponent`.
    pub fn float(mantissa: i128, exponent: i128) -> Self {
        Self::node(Tag::Float, vec![Self::int(mantissa), Self::int(exponent)])
    }

    pub fn complex(re: InertForm, im: InertForm) -> Self {
        Self::node(Tag::Complex, vec![re, im])
    }

    pub fn sum(children: Vec<InertForm>) -> Self {
        Self::node(Tag::Sum, children)
    }

    pub fn prod(children: Vec<InertForm>) -> Self {
        Self::node(Tag::Prod, children)
    }

    pub fn power(base: InertForm, exponent: InertForm) -> Self {
        Self::node(Tag::Power, vec![base, exponent])
    }

    pub fn function(name: impl Into<String>, args: Vec<InertForm>) -> Self {
        Self::node(Tag::Function, vec![Self::name(name), Self::expseq(args)])
    }

    pub fn expseq(children: Vec<InertForm>) -> Self {
        Self::node(Tag::ExpSeq, children)
    }

    pub fn equation(lhs: InertForm, rhs: InertForm) -> Self {
        Self::node(Tag::Equation, vec![lhs, rhs])
    }

    pub fn range(lo: InertForm, hi: InertForm) -> Self {
        Self::node(Tag::Range, vec![lo, hi])
    }

    pub fn divide(num: InertForm, den: InertForm) -> Self {
        Self::node(Tag::Divide, vec![num, den])
    }

    /// Signed value of an INTPOS/INTNEG leaf.
    pub fn as_int(&self) -> Option<i128> {
        match (self.tag, &self.payload) {
            (Tag::IntPos, Payload::Int(v)) => Some(*v),
            (Tag::IntNeg, Payload::Int(v)) => Some(-*v),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<(i128, i128)> {
        match self.tag {
            Tag::IntPos | Tag::IntNeg => self.as_int().map(|v| (v, 1)),
            Tag::Rational => Some((self.children[0].as_int()?, self.children[1].as_int()?)),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match (self.tag, &self.payload) {
            (Tag::Name, Payload::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_str_payload(&self) -> Option<&str> {
        match &self.payload {
            Payload::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn function_name(&self) -> Option<&str> {
        match self.tag {
            Tag::Function => self.children.first()?.as_name(),
            _ => None,
        }
    }

    pub fn function_args(&self) -> &[InertForm] {
        match self.tag {
            Tag::Function => self.children.get(1).map_or(&[], |s| &s.children[..]),
            _ => &[],
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.tag, Tag::IntPos | Tag::IntNeg)
    }

    /// Integer, rational or float literal.
    pub fn is_numeric_literal(&self) -> bool {
        matches!(self.tag, Tag::IntPos | Tag::IntNeg | Tag::Rational | Tag::Float)
    }

    pub fn is_one(&self) -> bool {
        self.as_int() == Some(1)
    }

    pub fn is_minus_one(&self) -> bool {
        self.as_int() == Some(-1)
    }

    /// Names that are not in function-name position, in first-seen order.
    pub fn free_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self.tag {
            Tag::Name => {
                if let Some(n) = self.as_name() {
                    if !out.iter().any(|o| o == n) {
                        out.push(n.to_string());
                    }
                }
            }
            Tag::Function => self.function_args().iter().for_each(|a| a.collect_names(out)),
            _ => self.children.iter().for_each(|c| c.collect_names(out)),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(InertForm::size).sum::<usize>()
    }

    /// Checks the structural invariants of every node.
    pub fn validate(&self) -> Result<(), InertError> {
        let bad = |why: &str| Err(InertError::MalformedList(format!("{}: {why}", self.tag)));
        let n = self.children.len();
        match self.tag {
            Tag::Name | Tag::String => {
                if !matches!(self.payload, Payload::Str(_)) || n != 0 {
                    return bad("expects a single string payload");
                }
            }
            Tag::IntPos | Tag::IntNeg => match self.payload {
                Payload::Int(v) if n == 0 && v >= 0 && (self.tag == Tag::IntPos || v > 0) => {}
                _ => return bad("expects a single non-negative integer payload (positive for INTNEG)"),
            },
            _ if self.payload != Payload::None => return bad("takes no payload"),
            Tag::Rational => {
                if n != 2 || !self.children[0].is_integer() || self.children[1].tag != Tag::IntPos {
                    return bad("expects an integer numerator and a positive denominator");
                }
                if self.children[1].as_int() == Some(0) {
                    return bad("denominator is zero");
                }
            }
            Tag::Float => {
                if n != 2 || !self.children.iter().all(InertForm::is_integer) {
                    return bad("expects integer mantissa and exponent");
                }
            }
            Tag::Sum | Tag::Prod => {
                if n < 2 {
                    return bad("needs at least two operands");
                }
            }
            Tag::Power | Tag::Equation | Tag::Range | Tag::Divide | Tag::Complex => {
                if n != 2 {
                    return bad("needs exactly two children");
                }
            }
            Tag::Function => {
                if n != 2 || self.children[0].tag != Tag::Name || self.children[1].tag != Tag::ExpSeq {
                    return bad("expects a NAME and an EXPSEQ");
                }
            }
            Tag::ExpSeq => {}
        }
        self.children.iter().try_for_each(InertForm::validate)
    }

    pub fn to_nested_list(&self) -> NestedList {
        let mut items: Vec<NlItem> = match &self.payload {
            Payload::None => Vec::new(),
            Payload::Int(v) => vec![NlItem::Int(*v)],
            Payload::Str(s) => vec![NlItem::Str(s.clone())],
        };
        items.extend(self.children.iter().map(|c| NlItem::List(c.to_nested_list())));
        NestedList { head: self.tag, items }
    }

    pub fn from_nested_list(nl: &NestedList) -> Result<InertForm, InertError> {
        let malformed = |why: String| InertError::MalformedList(why);
        let form = if nl.head.is_leaf() {
            let payload = match (nl.head, nl.items.as_slice()) {
                (Tag::Name | Tag::String, [NlItem::Str(s)]) => Payload::Str(s.clone()),
                (Tag::IntPos | Tag::IntNeg, [NlItem::Int(v)]) => Payload::Int(*v),
                _ => return Err(malformed(format!("{} expects exactly one scalar", nl.head))),
            };
            InertForm {
                tag: nl.head,
                payload,
                children: Vec::new(),
            }
        } else {
            let children = nl
                .items
                .iter()
                .map(|item| match item {
                    NlItem::List(sub) => InertForm::from_nested_list(sub),
                    _ => Err(malformed(format!("{} takes only sub-lists", nl.head))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            InertForm::node(nl.head, children)
        };
        form.validate()?;
        Ok(form)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NlItem {
    Int(i128),
    Str(String),
    List(NestedList),
}

/// A list whose head is a tag and whose tail holds payloads and sub-lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedList {
    pub head: Tag,
    pub items: Vec<NlItem>,
}

impl NestedList {
    /// Bracketed text such as `[EQUATION, [NAME, "x"], ...]`.
    pub fn to_text(&self, compat_prefix: bool) -> String {
        let mut out = String::new();
        self.write(&mut out, compat_prefix);
        out
    }

    fn write(&self, out: &mut String, compat: bool) {
        out.push('[');
        if compat {
            out.push_str(COMPAT_PREFIX);
        }
        out.push_str(self.head.as_str());
        for item in &self.items {
            out.push_str(", ");
            match item {
                NlItem::Int(v) => out.push_str(&v.to_string()),
                NlItem::Str(s) => {
                    out.push('"');
                    for c in s.chars() {
                        if c == '"' || c == '\\' {
                            out.push('\\');
                        }
                        out.push(c);
                    }
                    out.push('"');
                }
                NlItem::List(l) => l.write(out, compat),
            }
        }
        out.push(']');
    }

    /// Parses the bracketed text form; tags may carry the compat prefix.
    pub fn parse_text(text: &str) -> Result<NestedList, InertError> {
        let mut p = TextParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let list = p.list()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(list)
    }
}

impl fmt::Display for NestedList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

struct TextParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn err(&self, why: &str) -> InertError {
        InertError::MalformedList(format!("{why} at byte {}", self.pos))
    }

    fn ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), InertError> {
        self.ws();
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", b as char)))
        }
    }

    fn list(&mut self) -> Result<NestedList, InertError> {
        self.expect(b'[')?;
        self.ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            self.pos += 1;
        }
        let head: Tag = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("invalid tag"))?
            .parse()?;
        let mut items = Vec::new();
        loop {
            self.ws();
            match self.src.get(self.pos) {
                Some(b']') => {
                    self.pos += 1;
                    return Ok(NestedList { head, items });
                }
                Some(b',') => {
                    self.pos += 1;
                    items.push(self.item()?);
                }
                _ => return Err(self.err("expected `,` or `]`")),
            }
        }
    }

    fn item(&mut self) -> Result<NlItem, InertError> {
        self.ws();
        match self.src.get(self.pos) {
            Some(b'[') => Ok(NlItem::List(self.list()?)),
            Some(b'"') => {
                self.pos += 1;
                let mut bytes = Vec::new();
                loop {
                    match self.src.get(self.pos) {
                        None => return Err(self.err("unterminated string")),
                        Some(b'"') => break,
                        Some(b'\\') => {
                            self.pos += 1;
                            let c = *self.src.get(self.pos).ok_or_else(|| self.err("dangling escape"))?;
                            bytes.push(c);
                        }
                        Some(c) => bytes.push(*c),
                    }
                    self.pos += 1;
                }
                self.pos += 1;
                String::from_utf8(bytes).map(NlItem::Str).map_err(|_| self.err("invalid UTF-8"))
            }
            Some(b'-' | b'0'..=b'9') => {
                let start = self.pos;
                self.pos += 1;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.src[start..self.pos])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .map(NlItem::Int)
                    .ok_or_else(|| self.err("invalid integer"))
            }
            _ => Err(self.err("expected a list, string or integer")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq_range() -> InertForm {
        InertForm::equation(
            InertForm::name("x"),
            InertForm::range(InertForm::int(0), InertForm::name("infinity")),
        )
    }

    #[test]
    fn leaf_text() {
        assert_eq!(InertForm::int(0).to_nested_list().to_text(false), "[INTPOS, 0]");
        assert_eq!(InertForm::int(-2).to_nested_list().to_text(false), "[INTNEG, 2]");
    }

    #[test]
    fn equation_listing() {
        let nl = eq_range().to_nested_list();
        assert_eq!(
            nl.to_text(true),
            r#"[_Inert_EQUATION, [_Inert_NAME, "x"], [_Inert_RANGE, [_Inert_INTPOS, 0], [_Inert_NAME, "infinity"]]]"#
        );
        assert_eq!(
            nl.to_text(false),
            r#"[EQUATION, [NAME, "x"], [RANGE, [INTPOS, 0], [NAME, "infinity"]]]"#
        );
    }

    #[test]
    fn text_round_trip_with_and_without_prefix() {
        let t = InertForm::function("f", vec![InertForm::string("a\"b\\c"), InertForm::rational(-3, 4)]);
        for compat in [false, true] {
            let text = t.to_nested_list().to_text(compat);
            let back = InertForm::from_nested_list(&NestedList::parse_text(&text).unwrap()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn malformed_lists_are_rejected() {
        for text in [
            "[SUM, [INTPOS, 1]]",
            "[POWER, [NAME, \"x\"]]",
            "[INTNEG, 0]",
            "[INTPOS, -1]",
            "[NAME, 3]",
            "[FOO, 1]",
            "[RATIONAL, [INTPOS, 1], [INTPOS, 0]]",
            "[FUNCTION, [NAME, \"f\"], [NAME, \"x\"]]",
            "[NAME, \"x\"] extra",
            "[NAME, \"x\"",
        ] {
            let res = NestedList::parse_text(text).and_then(|nl| InertForm::from_nested_list(&nl));
            assert!(res.is_err(), "{text} should be rejected");
        }
    }

    #[test]
    fn free_names_skip_function_heads() {
        let t = InertForm::function("sin", vec![InertForm::prod(vec![InertForm::name("a"), InertForm::name("b"), InertForm::name("a")])]);
        assert_eq!(t.free_names(), ["a", "b"]);
    }
}
