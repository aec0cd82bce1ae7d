//! Maple 1D syntax: a recursive-descent parser into [`InertForm`] and a
//! canonical printer. The grammar is written out in `docs/maple-grammar.ebnf`.
//!
//! Parsing performs no simplification. The only normalizations are the ones
//! the inert representation itself forces: `-x` becomes a product with `-1`,
//! `a/b` becomes `a*b^(-1)`, and an integer literal divided by an integer
//! literal becomes an unreduced RATIONAL.

use thiserror::Error;

use crate::inert::{InertForm, Tag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapleError {
    #[error("syntax error at byte {position}: expected {expected}")]
    SyntaxError { position: usize, expected: String },
    #[error("unsupported construct `{0}`")]
    UnsupportedConstruct(String),
}

const KEYWORDS: &[&str] = &[
    "proc", "module", "table", "end", "local", "global", "if", "then", "else", "elif", "fi", "for", "do", "od",
    "while", "from", "to", "by", "in", "return", "use", "and", "or", "not", "xor", "implies", "mod", "union",
    "intersect", "minus", "subset",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i128),
    Float(i128, i128),
    Str(String),
    Sym(&'static str),
    Eof,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, MapleError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            if KEYWORDS.contains(&word) {
                return Err(MapleError::UnsupportedConstruct(word.to_string()));
            }
            out.push((start, Tok::Ident(word.to_string())));
            continue;
        }
        if c.is_ascii_digit() {
            let (tok, end) = number(src, start)?;
            out.push((start, tok));
            i = end;
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                match bytes.get(i) {
                    None => {
                        return Err(MapleError::SyntaxError {
                            position: start,
                            expected: "closing `\"`".into(),
                        })
                    }
                    Some(b'"') => break,
                    Some(b'\\') if i + 1 < bytes.len() => {
                        s.push(bytes[i + 1] as char);
                        i += 2;
                    }
                    Some(_) => {
                        let ch = src[i..].chars().next().expect("char");
                        s.push(ch);
                        i += ch.len_utf8();
                    }
                }
            }
            out.push((start, Tok::Str(s)));
            i += 1;
            continue;
        }
        let two = src.get(i..i + 2).unwrap_or("");
        if matches!(two, ":=" | "->" | "<=" | ">=" | "<>" | "||") {
            return Err(MapleError::UnsupportedConstruct(two.to_string()));
        }
        if two == ".." {
            out.push((start, Tok::Sym("..")));
            i += 2;
            continue;
        }
        let sym = match c {
            b'+' => "+",
            b'-' => "-",
            b'*' => "*",
            b'/' => "/",
            b'^' => "^",
            b'=' => "=",
            b'(' => "(",
            b')' => ")",
            b',' => ",",
            b'\'' => "'",
            b';' => ";",
            _ => {
                let ch = src[i..].chars().next().expect("char");
                return Err(MapleError::UnsupportedConstruct(ch.to_string()));
            }
        };
        out.push((start, Tok::Sym(sym)));
        i += 1;
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

fn number(src: &str, start: usize) -> Result<(Tok, usize), MapleError> {
    let bytes = src.as_bytes();
    let overflow = || MapleError::SyntaxError {
        position: start,
        expected: "an integer that fits in 127 bits".into(),
    };
    let digits_end = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let int_end = digits_end(start);
    // `1..2` is a range, not a float
    let is_float = bytes.get(int_end) == Some(&b'.') && bytes.get(int_end + 1) != Some(&b'.');
    if !is_float {
        let v: i128 = src[start..int_end].parse().map_err(|_| overflow())?;
        return Ok((Tok::Int(v), int_end));
    }
    let frac_end = digits_end(int_end + 1);
    let mut digits = String::from(&src[start..int_end]);
    digits.push_str(&src[int_end + 1..frac_end]);
    let mut exponent = -((frac_end - int_end - 1) as i128);
    let mut end = frac_end;
    if matches!(bytes.get(end), Some(b'e' | b'E')) {
        let mut j = end + 1;
        let neg = bytes.get(j) == Some(&b'-');
        if matches!(bytes.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        let e_end = digits_end(j);
        if e_end == j {
            return Err(MapleError::SyntaxError {
                position: end,
                expected: "exponent digits".into(),
            });
        }
        let e: i128 = src[j..e_end].parse().map_err(|_| overflow())?;
        exponent += if neg { -e } else { e };
        end = e_end;
    }
    let mantissa: i128 = digits.parse().map_err(|_| overflow())?;
    Ok((Tok::Float(mantissa, exponent), end))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

/// Parses a Maple 1D expression without simplifying it.
pub fn parse_maple(input: &str) -> Result<InertForm, MapleError> {
    let mut p = Parser {
        toks: tokenize(input)?,
        pos: 0,
    };
    if p.peek() == &Tok::Eof {
        return Err(p.error("an expression"));
    }
    let expr = p.expr()?;
    p.eat(";");
    if p.peek() != &Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(expr)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn error(&self, expected: &str) -> MapleError {
        MapleError::SyntaxError {
            position: self.toks[self.pos].0,
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), MapleError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(&format!("`{sym}`")))
        }
    }

    fn expr(&mut self) -> Result<InertForm, MapleError> {
        let lhs = self.range()?;
        if self.eat("=") {
            let rhs = self.range()?;
            return Ok(InertForm::equation(lhs, rhs));
        }
        Ok(lhs)
    }

    fn range(&mut self) -> Result<InertForm, MapleError> {
        let lo = self.additive()?;
        if self.eat("..") {
            let hi = self.additive()?;
            return Ok(InertForm::range(lo, hi));
        }
        Ok(lo)
    }

    fn additive(&mut self) -> Result<InertForm, MapleError> {
        let mut terms = Vec::new();
        let first = if self.eat("-") {
            negate(self.term()?)
        } else {
            self.eat("+");
            self.term()?
        };
        terms.push(first);
        loop {
            if self.eat("+") {
                terms.push(self.term()?);
            } else if self.eat("-") {
                terms.push(negate(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("term")
        } else {
            InertForm::sum(terms)
        })
    }

    fn term(&mut self) -> Result<InertForm, MapleError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat("*") {
                factors.push(self.factor()?);
            } else if self.eat("/") {
                let divisor = self.factor()?;
                match (factors.as_slice(), divisor.as_int()) {
                    ([single], Some(q)) if single.is_integer() && q > 0 => {
                        let p = single.as_int().expect("integer");
                        factors[0] = InertForm::rational(p, q);
                    }
                    _ => factors.push(reciprocal(divisor)),
                }
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("factor")
        } else {
            InertForm::prod(factors)
        })
    }

    fn factor(&mut self) -> Result<InertForm, MapleError> {
        if self.eat("-") {
            return Ok(negate(self.factor()?));
        }
        if self.eat("+") {
            return self.factor();
        }
        let base = self.primary()?;
        if self.eat("^") {
            let exponent = self.factor()?;
            return Ok(InertForm::power(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<InertForm, MapleError> {
        let tok = self.peek().clone();
        match tok {
            Tok::Int(v) => {
                self.pos += 1;
                Ok(InertForm::int(v))
            }
            Tok::Float(m, e) => {
                self.pos += 1;
                Ok(InertForm::float(m, e))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Ok(InertForm::string(s))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if !self.eat("(") {
                    return Ok(InertForm::name(name));
                }
                let mut args = Vec::new();
                if !self.eat(")") {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(InertForm::function(name, args))
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Sym("'") => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect("'")?;
                Ok(inner)
            }
            _ => Err(self.error("an operand")),
        }
    }
}

/// Arithmetic negation in inert shape: literals flip sign, a product with a
/// leading literal flips that literal, anything else gains a `-1` factor.
pub fn negate(t: InertForm) -> InertForm {
    match t.tag {
        Tag::IntPos | Tag::IntNeg => InertForm::int(-t.as_int().expect("integer")),
        Tag::Rational | Tag::Float => {
            let mut t = t;
            t.children[0] = negate(t.children[0].clone());
            t
        }
        Tag::Prod if t.children[0].is_numeric_literal() => {
            let mut kids = t.children;
            if kids[0].is_minus_one() {
                kids.remove(0);
            } else {
                kids[0] = negate(kids[0].clone());
            }
            if kids.len() == 1 {
                kids.pop().expect("factor")
            } else {
                InertForm::prod(kids)
            }
        }
        Tag::Prod => {
            let mut kids = vec![InertForm::int(-1)];
            kids.extend(t.children);
            InertForm::prod(kids)
        }
        _ => InertForm::prod(vec![InertForm::int(-1), t]),
    }
}

fn reciprocal(divisor: InertForm) -> InertForm {
    if divisor.tag == Tag::Power && divisor.children[1].tag == Tag::IntPos && !divisor.children[1].is_one() {
        let mut d = divisor;
        let n = d.children[1].as_int().expect("integer");
        d.children[1] = InertForm::int(-n);
        return d;
    }
    InertForm::power(divisor, InertForm::int(-1))
}

/// Prints a tree as Maple 1D syntax that parses back to the same tree.
pub fn render_maple(t: &InertForm) -> String {
    render(t, Prec::Top)
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Top,
    Range,
    Sum,
    Prod,
    Power,
    Atom,
}

fn own_prec(t: &InertForm) -> Prec {
    match t.tag {
        Tag::Equation => Prec::Top,
        Tag::Range => Prec::Range,
        Tag::Sum | Tag::Complex => Prec::Sum,
        Tag::Prod | Tag::Divide => Prec::Prod,
        Tag::Power => Prec::Power,
        Tag::IntNeg => Prec::Sum,
        Tag::Float | Tag::Rational if t.children[0].tag == Tag::IntNeg => Prec::Sum,
        Tag::Rational => Prec::Prod,
        _ => Prec::Atom,
    }
}

fn wrap(s: String, inner: Prec, outer: Prec) -> String {
    if inner <= outer && !(inner == Prec::Top && outer == Prec::Top) {
        format!("({s})")
    } else {
        s
    }
}

fn render(t: &InertForm, ctx: Prec) -> String {
    let s = match t.tag {
        Tag::Name => t.as_name().unwrap_or_default().to_string(),
        Tag::String => {
            let raw = t.as_str_payload().unwrap_or_default();
            format!("\"{}\"", raw.replace('\\', "\\\\").replace('"', "\\\""))
        }
        Tag::IntPos | Tag::IntNeg => t.as_int().unwrap_or_default().to_string(),
        Tag::Float => render_float(t),
        Tag::Rational => format!(
            "{}/{}",
            t.children[0].as_int().unwrap_or_default(),
            t.children[1].as_int().unwrap_or_default()
        ),
        Tag::Complex => format!(
            "{}+{}*I",
            render(&t.children[0], Prec::Sum),
            render(&t.children[1], Prec::Prod)
        ),
        Tag::Sum => {
            let mut out = String::new();
            for (i, c) in t.children.iter().enumerate() {
                let part = render_term(c);
                if i > 0 && !part.starts_with('-') {
                    out.push('+');
                }
                out.push_str(&part);
            }
            out
        }
        Tag::Prod => render_prod(t),
        Tag::Power => {
            let base = render(&t.children[0], Prec::Power);
            let exp = &t.children[1];
            let exp_s = if own_prec(exp) == Prec::Atom {
                render(exp, Prec::Power)
            } else {
                format!("({})", render(exp, Prec::Top))
            };
            format!("{base}^{exp_s}")
        }
        Tag::Function => {
            let args: Vec<String> = t.function_args().iter().map(|a| render(a, Prec::Top)).collect();
            format!("{}({})", t.function_name().unwrap_or_default(), args.join(","))
        }
        Tag::ExpSeq => t.children.iter().map(|a| render(a, Prec::Top)).collect::<Vec<_>>().join(","),
        Tag::Equation => format!("{}={}", render(&t.children[0], Prec::Top), render(&t.children[1], Prec::Top)),
        Tag::Range => format!("{}..{}", render(&t.children[0], Prec::Range), render(&t.children[1], Prec::Range)),
        Tag::Divide => format!("({})/({})", render(&t.children[0], Prec::Top), render(&t.children[1], Prec::Top)),
    };
    wrap(s, own_prec(t), ctx)
}

/// A SUM operand: negative leaders print bare so the sum reads `a-b`.
fn render_term(t: &InertForm) -> String {
    match t.tag {
        Tag::Sum | Tag::Equation | Tag::Range => format!("({})", render(t, Prec::Top)),
        Tag::IntNeg | Tag::Float | Tag::Complex => render(t, Prec::Top),
        _ => render(t, Prec::Range),
    }
}

fn render_prod(t: &InertForm) -> String {
    let kids = &t.children;
    let mut out = String::new();
    let mut rest = &kids[..];
    // `-(a*b)` would parse back with the sign merged into the inner product
    let lone_product = kids.len() == 2 && kids[1].tag == Tag::Prod;
    if kids[0].is_minus_one() && kids.len() > 1 && !kids[1].is_numeric_literal() && !lone_product {
        out.push('-');
        rest = &kids[1..];
    }
    for (i, c) in rest.iter().enumerate() {
        let leading = i == 0;
        if !leading {
            let only_integer_so_far = i == 1 && rest[0].is_integer() && out.trim_start_matches('-').parse::<i128>().is_ok();
            if let Some(den) = divisor_of(c).filter(|_| !only_integer_so_far || !divisor_is_integer(c)) {
                out.push('/');
                out.push_str(&den);
                continue;
            }
            out.push('*');
        }
        let negative_lead = leading && (c.tag == Tag::IntNeg || c.tag == Tag::Rational || c.tag == Tag::Float);
        let s = match c.tag {
            _ if negative_lead => render(c, Prec::Top),
            Tag::Rational if !leading => format!("({})", render(c, Prec::Top)),
            _ => render(c, Prec::Prod),
        };
        out.push_str(&s);
    }
    out
}

/// `b^(-n)` prints as `/b^n` (or `/b` when n is 1) inside a product.
fn divisor_of(c: &InertForm) -> Option<String> {
    if c.tag != Tag::Power {
        return None;
    }
    let n = c.children[1].as_int().filter(|n| *n < 0)?;
    let base = &c.children[0];
    if n == -1 {
        if base.tag == Tag::Power && base.children[1].tag == Tag::IntPos {
            return None;
        }
        Some(render(base, Prec::Power))
    } else {
        Some(format!("{}^{}", render(base, Prec::Power), -n))
    }
}

fn divisor_is_integer(c: &InertForm) -> bool {
    c.children[0].is_integer() && c.children[1].is_minus_one()
}

fn render_float(t: &InertForm) -> String {
    let m = t.children[0].as_int().unwrap_or_default();
    let e = t.children[1].as_int().unwrap_or_default();
    let sign = if m < 0 { "-" } else { "" };
    let digits = m.abs().to_string();
    if e >= 0 {
        return if e == 0 {
            format!("{sign}{digits}.")
        } else {
            format!("{sign}{digits}.e{e}")
        };
    }
    let shift = (-e) as usize;
    if shift < digits.len() {
        let (int, frac) = digits.split_at(digits.len() - shift);
        format!("{sign}{int}.{frac}")
    } else {
        format!("{sign}0.{}{digits}", "0".repeat(shift - digits.len()))
    }
}
