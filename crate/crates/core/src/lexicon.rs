//! Translation knowledge: DLMF/DRMF macro records, Greek letters,
//! mathematical constants and built-in generic LaTeX commands.
//!
//! Macro records are authored as CSV (one row per macro), the other three
//! sources as JSON objects keyed by command name. [`Lexicon::compile`] merges
//! and validates them; the result can be persisted as a single JSON lexicon
//! file and reloaded with [`Lexicon::from_json`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

const SEED_MACROS: &str = include_str!("../data/macros.csv");
const SEED_CONSTANTS: &str = include_str!("../data/constants.json");
const SEED_GREEK: &str = include_str!("../data/greek.json");
const SEED_BUILTINS: &str = include_str!("../data/builtins.json");

const MACRO_COLUMNS: [&str; 8] = [
    "macro",
    "num_params",
    "num_vars",
    "at_variants",
    "dlmf_link",
    "maple",
    "mathematica",
    "advisories",
];

/// Latin letters that commonly stand for a mathematical constant.
pub const CONSTANT_LETTERS: [char; 3] = ['i', 'e', 'C'];

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("{file}:{line}: {reason}")]
    SchemaError {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("placeholder ${index} is out of range for {macro_name}")]
    PlaceholderOutOfRange { macro_name: String, index: usize },
    #[error("duplicate macro {0}")]
    DuplicateMacro(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Target computer algebra system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Maple,
    Mathematica,
}

/// How a dialect spells Greek letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreekStyle {
    /// `alpha`, `Theta`
    BareName,
    /// `\[Alpha]`, `\[CapitalTheta]`
    BracketedName,
}

impl Dialect {
    pub const ALL: [Dialect; 2] = [Dialect::Maple, Dialect::Mathematica];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Maple => "maple",
            Dialect::Mathematica => "mathematica",
        }
    }

    /// Token used for multiplication, explicit (`\idt`) or implicit.
    pub fn mult_token(self) -> &'static str {
        match self {
            Dialect::Maple => "*",
            Dialect::Mathematica => " ",
        }
    }

    pub fn call_delims(self) -> (char, char) {
        match self {
            Dialect::Maple => ('(', ')'),
            Dialect::Mathematica => ('[', ']'),
        }
    }

    pub fn greek_style(self) -> GreekStyle {
        match self {
            Dialect::Maple => GreekStyle::BareName,
            Dialect::Mathematica => GreekStyle::BracketedName,
        }
    }

    pub fn equals_token(self) -> &'static str {
        match self {
            Dialect::Maple => "=",
            Dialect::Mathematica => "==",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "maple" => Ok(Dialect::Maple),
            "mathematica" => Ok(Dialect::Mathematica),
            other => Err(format!("unknown dialect `{other}`")),
        }
    }
}

/// One piece of a compiled [`CasPattern`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Literal(String),
    Placeholder(usize),
}

/// CAS template with `$i` placeholders for the i-th parameter or variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CasPattern {
    template: String,
    segments: Vec<Segment>,
}

impl CasPattern {
    pub fn new(template: &str) -> Result<Self, String> {
        if template.is_empty() {
            return Err("empty pattern".into());
        }
        let mut segments = Vec::new();
        let mut literal = String::new();
        let mut chars = template.chars().peekable();
        while let Some(c) = chars.next() {
            if c == '$' && chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                let mut digits = String::new();
                while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                    digits.push(d);
                    chars.next();
                }
                if !literal.is_empty() {
                    segments.push(Segment::Literal(std::mem::take(&mut literal)));
                }
                let index = digits
                    .parse()
                    .map_err(|_| format!("placeholder ${digits} is too large"))?;
                segments.push(Segment::Placeholder(index));
            } else {
                literal.push(c);
            }
        }
        if !literal.is_empty() {
            segments.push(Segment::Literal(literal));
        }
        Ok(CasPattern {
            template: template.to_string(),
            segments,
        })
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn max_placeholder(&self) -> Option<usize> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Placeholder(i) => Some(*i),
                Segment::Literal(_) => None,
            })
            .max()
    }

    /// Substitutes `args[i]` for every `$i`. Arguments are inserted verbatim.
    pub fn apply<S: AsRef<str>>(&self, args: &[S]) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(s) => out.push_str(s),
                Segment::Placeholder(i) => out.push_str(args[*i].as_ref()),
            }
        }
        out
    }
}

impl TryFrom<String> for CasPattern {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        CasPattern::new(&value)
    }
}

impl From<CasPattern> for String {
    fn from(p: CasPattern) -> String {
        p.template
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdvisoryKind {
    BranchCut,
    Domain,
    DefinitionDifference,
    NoDirectTranslation,
}

impl AdvisoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdvisoryKind::BranchCut => "branch-cut",
            AdvisoryKind::Domain => "domain",
            AdvisoryKind::DefinitionDifference => "definition-difference",
            AdvisoryKind::NoDirectTranslation => "no-direct-translation",
        }
    }
}

impl FromStr for AdvisoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "branch-cut" => Ok(AdvisoryKind::BranchCut),
            "domain" => Ok(AdvisoryKind::Domain),
            "definition-difference" => Ok(AdvisoryKind::DefinitionDifference),
            "no-direct-translation" => Ok(AdvisoryKind::NoDirectTranslation),
            other => Err(format!("unknown advisory kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Advisory {
    pub kind: AdvisoryKind,
    pub text: String,
}

/// Parses `kind:text` pairs separated by `;`. An empty cell means no advisories.
pub fn parse_advisories(cell: &str) -> Result<Vec<Advisory>, String> {
    cell.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (kind, text) = pair
                .split_once(':')
                .ok_or_else(|| format!("advisory `{pair}` is not of the form kind:text"))?;
            Ok(Advisory {
                kind: kind.parse()?,
                text: text.trim().to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Function,
    Constant,
    GreekLetter,
    Operator,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Function => "function",
            Role::Constant => "constant",
            Role::GreekLetter => "greek-letter",
            Role::Operator => "operator",
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "function" => Ok(Role::Function),
            "constant" => Ok(Role::Constant),
            "greek-letter" => Ok(Role::GreekLetter),
            "operator" => Ok(Role::Operator),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// Translation record for one macro.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub macro_name: String,
    /// Brace groups before the `@` marker.
    pub num_params: usize,
    /// Argument groups after the `@` marker.
    pub num_vars: usize,
    pub at_variants: BTreeSet<u8>,
    pub dlmf_link: Option<String>,
    pub translations: BTreeMap<Dialect, CasPattern>,
    /// Patterns used when a bracketed optional argument is present (`\sqrt[n]{x}`).
    /// `$0` is the optional argument, the mandatory ones follow.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub optional_translations: BTreeMap<Dialect, CasPattern>,
    pub advisories: Vec<Advisory>,
    pub role: Role,
}

impl LexiconEntry {
    pub fn arity(&self) -> usize {
        self.num_params + self.num_vars
    }

    pub fn accepts_optional(&self) -> bool {
        !self.optional_translations.is_empty()
    }

    pub fn translation(&self, dialect: Dialect) -> Option<&CasPattern> {
        self.translations.get(&dialect)
    }

    /// Number of `@` symbols used when rendering this macro.
    pub fn preferred_at(&self) -> usize {
        self.at_variants
            .iter()
            .copied()
            .find(|&n| n > 0)
            .unwrap_or(1) as usize
    }

    fn validate(&self) -> Result<(), LexiconError> {
        let arity = self.arity();
        for pattern in self.translations.values() {
            if let Some(index) = pattern.max_placeholder().filter(|&i| i >= arity) {
                return Err(LexiconError::PlaceholderOutOfRange {
                    macro_name: self.macro_name.clone(),
                    index,
                });
            }
        }
        for pattern in self.optional_translations.values() {
            if let Some(index) = pattern.max_placeholder().filter(|&i| i > arity) {
                return Err(LexiconError::PlaceholderOutOfRange {
                    macro_name: self.macro_name.clone(),
                    index,
                });
            }
        }
        Ok(())
    }
}

/// A semantic constant and the bare symbol it is often written as.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRecord {
    pub semantic_macro: String,
    /// `None` marks a dialect without a direct translation.
    pub translations: BTreeMap<Dialect, Option<String>>,
    /// One of `i`, `e`, `C`.
    pub plain_letter_alias: Option<char>,
    /// Generic command such as `\pi` that may denote the constant.
    pub command_alias: Option<String>,
    pub dlmf_link: Option<String>,
    pub advisories: Vec<Advisory>,
}

/// Compiled translation knowledge. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub entries: BTreeMap<String, LexiconEntry>,
    pub constants: Vec<ConstantRecord>,
    pub greek: BTreeMap<String, LexiconEntry>,
    pub builtins: BTreeMap<String, LexiconEntry>,
    #[serde(skip)]
    constant_entries: BTreeMap<String, LexiconEntry>,
}

/// The four source documents a lexicon is compiled from.
#[derive(Debug, Clone, Copy)]
pub struct LexiconSources<'a> {
    pub macro_csv: &'a str,
    pub constants_json: &'a str,
    pub greek_json: &'a str,
    pub builtins_json: &'a str,
}

impl LexiconSources<'static> {
    pub fn seed() -> Self {
        LexiconSources {
            macro_csv: SEED_MACROS,
            constants_json: SEED_CONSTANTS,
            greek_json: SEED_GREEK,
            builtins_json: SEED_BUILTINS,
        }
    }
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn seed() -> Lexicon {
        Lexicon::compile(LexiconSources::seed()).expect("seed lexicon compiles")
    }

    pub fn compile(src: LexiconSources<'_>) -> Result<Lexicon, LexiconError> {
        let entries = compile_macro_csv(src.macro_csv, "macros.csv")?;
        let constants = compile_constants(src.constants_json, "constants.json")?;
        let greek = compile_json_entries(src.greek_json, "greek.json", Role::GreekLetter)?;
        let builtins = compile_json_entries(src.builtins_json, "builtins.json", Role::Function)?;
        Lexicon::assemble(entries, constants, greek, builtins)
    }

    pub fn compile_files(
        macro_csv: &Path,
        constants_json: &Path,
        greek_json: &Path,
        builtins_json: &Path,
    ) -> Result<Lexicon, LexiconError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| LexiconError::Io {
                path: p.display().to_string(),
                reason: e.to_string(),
            })
        };
        let (m, c, g, b) = (
            read(macro_csv)?,
            read(constants_json)?,
            read(greek_json)?,
            read(builtins_json)?,
        );
        let file = |p: &Path| {
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        let entries = compile_macro_csv(&m, &file(macro_csv))?;
        let constants = compile_constants(&c, &file(constants_json))?;
        let greek = compile_json_entries(&g, &file(greek_json), Role::GreekLetter)?;
        let builtins = compile_json_entries(&b, &file(builtins_json), Role::Function)?;
        Lexicon::assemble(entries, constants, greek, builtins)
    }

    fn assemble(
        entries: BTreeMap<String, LexiconEntry>,
        constants: Vec<ConstantRecord>,
        greek: BTreeMap<String, LexiconEntry>,
        builtins: BTreeMap<String, LexiconEntry>,
    ) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon {
            entries,
            constants,
            greek,
            builtins,
            constant_entries: BTreeMap::new(),
        };
        lex.finish()?;
        Ok(lex)
    }

    /// Re-derives indexes and re-checks every invariant.
    fn finish(&mut self) -> Result<(), LexiconError> {
        self.constant_entries = self.constants.iter().map(constant_entry).collect::<Result<_, _>>()?;
        let mut seen = BTreeSet::new();
        let all = self
            .entries
            .values()
            .chain(self.builtins.values())
            .chain(self.greek.values())
            .chain(self.constant_entries.values());
        for entry in all {
            if !seen.insert(entry.macro_name.as_str()) {
                return Err(LexiconError::DuplicateMacro(entry.macro_name.clone()));
            }
            entry.validate()?;
        }
        for c in &self.constants {
            if let Some(letter) = c.plain_letter_alias {
                if !CONSTANT_LETTERS.contains(&letter) {
                    return Err(LexiconError::SchemaError {
                        file: "constants".into(),
                        line: 0,
                        reason: format!("{}: `{letter}` is not a constant letter", c.semantic_macro),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex: Lexicon = serde_json::from_str(text).map_err(|e| LexiconError::SchemaError {
            file: "lexicon".into(),
            line: e.line(),
            reason: e.to_string(),
        })?;
        lex.finish()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Lexicon, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Lexicon::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lexicon serializes")
    }

    /// Exact-name lookup across macros, built-ins, Greek letters and constants.
    pub fn lookup(&self, name: &str) -> Option<&LexiconEntry> {
        self.entries
            .get(name)
            .or_else(|| self.builtins.get(name))
            .or_else(|| self.greek.get(name))
            .or_else(|| self.constant_entries.get(name))
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtins.contains_key(name)
    }

    pub fn is_greek(&self, name: &str) -> bool {
        self.greek.contains_key(name)
    }

    pub fn constant(&self, semantic_macro: &str) -> Option<&ConstantRecord> {
        self.constants.iter().find(|c| c.semantic_macro == semantic_macro)
    }

    /// Constant commonly written as the bare Latin letter `letter`.
    pub fn constant_for_letter(&self, letter: char) -> Option<&ConstantRecord> {
        self.constants.iter().find(|c| c.plain_letter_alias == Some(letter))
    }

    /// Constant commonly written as the generic command `command` (e.g. `\pi`).
    pub fn constant_for_command(&self, command: &str) -> Option<&ConstantRecord> {
        self.constants
            .iter()
            .find(|c| c.command_alias.as_deref() == Some(command))
    }

    /// Every macro name known to the lexicon, in sorted order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries
            .keys()
            .chain(self.builtins.keys())
            .chain(self.greek.keys())
            .chain(self.constant_entries.keys())
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len() + self.builtins.len() + self.greek.len() + self.constant_entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn constant_entry(c: &ConstantRecord) -> Result<(String, LexiconEntry), LexiconError> {
    let mut translations = BTreeMap::new();
    for (dialect, t) in &c.translations {
        if let Some(t) = t {
            let pattern = CasPattern::new(t).map_err(|reason| LexiconError::SchemaError {
                file: "constants".into(),
                line: 0,
                reason: format!("{}: {reason}", c.semantic_macro),
            })?;
            translations.insert(*dialect, pattern);
        }
    }
    let entry = LexiconEntry {
        macro_name: c.semantic_macro.clone(),
        num_params: 0,
        num_vars: 0,
        at_variants: BTreeSet::new(),
        dlmf_link: c.dlmf_link.clone(),
        translations,
        optional_translations: BTreeMap::new(),
        advisories: c.advisories.clone(),
        role: Role::Constant,
    };
    Ok((c.semantic_macro.clone(), entry))
}

fn compile_macro_csv(text: &str, file: &str) -> Result<BTreeMap<String, LexiconEntry>, LexiconError> {
    let schema = |line: usize, reason: String| LexiconError::SchemaError {
        file: file.to_string(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| schema(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != MACRO_COLUMNS {
        return Err(schema(
            1,
            format!("expected header `{}`", MACRO_COLUMNS.join(",")),
        ));
    }

    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            schema(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let macro_name = field(0).to_string();
        if !macro_name.starts_with('\\') || macro_name.len() < 2 {
            return Err(schema(line, format!("`{macro_name}` is not a macro name")));
        }
        let count = |i: usize, what: &str| {
            field(i)
                .parse::<usize>()
                .map_err(|_| schema(line, format!("{what} `{}` is not a non-negative integer", field(i))))
        };
        let num_params = count(1, "num_params")?;
        let num_vars = count(2, "num_vars")?;
        let at_variants = parse_at_variants(field(3)).map_err(|r| schema(line, r))?;
        let dlmf_link = Some(field(4).to_string()).filter(|s| !s.is_empty());
        let mut translations = BTreeMap::new();
        for (col, dialect) in [(5, Dialect::Maple), (6, Dialect::Mathematica)] {
            if !field(col).is_empty() {
                let pattern = CasPattern::new(field(col)).map_err(|r| schema(line, r))?;
                translations.insert(dialect, pattern);
            }
        }
        let advisories = parse_advisories(field(7)).map_err(|r| schema(line, r))?;
        let entry = LexiconEntry {
            macro_name: macro_name.clone(),
            num_params,
            num_vars,
            at_variants,
            dlmf_link,
            translations,
            optional_translations: BTreeMap::new(),
            advisories,
            role: Role::Function,
        };
        entry.validate()?;
        if out.insert(macro_name.clone(), entry).is_some() {
            return Err(schema(line, format!("duplicate macro {macro_name}")));
        }
    }
    Ok(out)
}

fn parse_at_variants(cell: &str) -> Result<BTreeSet<u8>, String> {
    cell.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<u8>() {
            Ok(n) if n <= 3 => Ok(n),
            _ => Err(format!("at variant `{s}` is not one of 0, 1, 2, 3")),
        })
        .collect()
}

/// Line number (1-based) of the first occurrence of a JSON object key.
fn key_line(text: &str, key: &str) -> usize {
    let quoted = serde_json::to_string(key).unwrap_or_default();
    text.find(&quoted)
        .map_or(0, |pos| text[..pos].matches('\n').count() + 1)
}

fn json_object<'a>(
    value: &'a Value,
    file: &str,
    line: usize,
    what: &str,
) -> Result<&'a serde_json::Map<String, Value>, LexiconError> {
    value.as_object().ok_or_else(|| LexiconError::SchemaError {
        file: file.to_string(),
        line,
        reason: format!("{what} must be a JSON object"),
    })
}

fn parse_json_root(text: &str, file: &str) -> Result<serde_json::Map<String, Value>, LexiconError> {
    let root: Value = serde_json::from_str(text).map_err(|e| LexiconError::SchemaError {
        file: file.to_string(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    Ok(json_object(&root, file, 1, "document")?.clone())
}

fn dialect_patterns(
    obj: &serde_json::Map<String, Value>,
    err: &dyn Fn(String) -> LexiconError,
) -> Result<BTreeMap<Dialect, CasPattern>, LexiconError> {
    let mut out = BTreeMap::new();
    for dialect in Dialect::ALL {
        match obj.get(dialect.name()) {
            None | Some(Value::Null) => {}
            Some(Value::String(s)) => {
                out.insert(dialect, CasPattern::new(s).map_err(err)?);
            }
            Some(other) => return Err(err(format!("{dialect} must be a string or null, got {other}"))),
        }
    }
    Ok(out)
}

fn string_field(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    err: &dyn Fn(String) -> LexiconError,
) -> Result<Option<String>, LexiconError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(other) => Err(err(format!("`{key}` must be a string, got {other}"))),
    }
}

fn count_field(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    err: &dyn Fn(String) -> LexiconError,
) -> Result<usize, LexiconError> {
    match obj.get(key) {
        None => Ok(0),
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| err(format!("`{key}` must be a non-negative integer"))),
    }
}

fn compile_json_entries(
    text: &str,
    file: &str,
    default_role: Role,
) -> Result<BTreeMap<String, LexiconEntry>, LexiconError> {
    let root = parse_json_root(text, file)?;
    let mut out = BTreeMap::new();
    for (name, value) in &root {
        let line = key_line(text, name);
        let err = |reason: String| LexiconError::SchemaError {
            file: file.to_string(),
            line,
            reason: format!("{name}: {reason}"),
        };
        if !name.starts_with('\\') {
            return Err(err("key is not a macro name".into()));
        }
        let obj = json_object(value, file, line, name)?;
        let role = match string_field(obj, "role", &err)? {
            Some(r) => r.parse().map_err(err)?,
            None => default_role,
        };
        let translations = dialect_patterns(obj, &err)?;
        let optional_translations = match obj.get("optional") {
            None => BTreeMap::new(),
            Some(v) => dialect_patterns(json_object(v, file, line, "optional")?, &err)?,
        };
        let advisories = match string_field(obj, "advisory", &err)? {
            Some(a) => parse_advisories(&a).map_err(err)?,
            None => Vec::new(),
        };
        let num_params = count_field(obj, "num_params", &err)?;
        let num_vars = count_field(obj, "num_vars", &err)?;
        let at_variants = match obj.get("at_variants") {
            None => {
                if num_vars > 0 {
                    BTreeSet::from([1])
                } else {
                    BTreeSet::new()
                }
            }
            Some(Value::String(s)) => parse_at_variants(s).map_err(err)?,
            Some(_) => return Err(err("`at_variants` must be a string such as \"1;2\"".into())),
        };
        if role == Role::Constant && num_params + num_vars != 0 {
            return Err(err("a constant takes no arguments".into()));
        }
        if role != Role::Operator && translations.is_empty() && advisories.is_empty() {
            return Err(err("entry has neither a translation nor an advisory".into()));
        }
        let entry = LexiconEntry {
            macro_name: name.clone(),
            num_params,
            num_vars,
            at_variants,
            dlmf_link: string_field(obj, "dlmf", &err)?,
            translations,
            optional_translations,
            advisories,
            role,
        };
        entry.validate()?;
        out.insert(name.clone(), entry);
    }
    Ok(out)
}

fn compile_constants(text: &str, file: &str) -> Result<Vec<ConstantRecord>, LexiconError> {
    let root = parse_json_root(text, file)?;
    let mut out = Vec::new();
    for (name, value) in &root {
        let line = key_line(text, name);
        let err = |reason: String| LexiconError::SchemaError {
            file: file.to_string(),
            line,
            reason: format!("{name}: {reason}"),
        };
        if !name.starts_with('\\') {
            return Err(err("key is not a macro name".into()));
        }
        let obj = json_object(value, file, line, name)?;
        let mut translations = BTreeMap::new();
        for dialect in Dialect::ALL {
            translations.insert(dialect, string_field(obj, dialect.name(), &err)?);
        }
        let (plain_letter_alias, command_alias) = match string_field(obj, "alias", &err)? {
            None => (None, None),
            Some(a) if a.starts_with('\\') => (None, Some(a)),
            Some(a) => {
                let mut chars = a.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if CONSTANT_LETTERS.contains(&c) => (Some(c), None),
                    _ => return Err(err(format!("alias `{a}` must be one of i, e, C or a command"))),
                }
            }
        };
        let advisories = match string_field(obj, "advisory", &err)? {
            Some(a) => parse_advisories(&a).map_err(err)?,
            None => Vec::new(),
        };
        out.push(ConstantRecord {
            semantic_macro: name.clone(),
            translations,
            plain_letter_alias,
            command_alias,
            dlmf_link: string_field(obj, "dlmf", &err)?,
            advisories,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "macro,num_params,num_vars,at_variants,dlmf_link,maple,mathematica,advisories\n";

    fn with_macros(csv: &str) -> Result<Lexicon, LexiconError> {
        Lexicon::compile(LexiconSources {
            macro_csv: csv,
            ..LexiconSources::seed()
        })
    }

    #[test]
    fn seed_has_sine_entry() {
        let lex = Lexicon::seed();
        let sin = lex.lookup("\\sin").unwrap();
        assert_eq!(sin.translation(Dialect::Maple).unwrap().template(), "sin($0)");
        assert_eq!(sin.translation(Dialect::Mathematica).unwrap().template(), "Sin[$0]");
        assert_eq!(sin.dlmf_link.as_deref(), Some("http://dlmf.nist.gov/4.14#E1"));
        assert_eq!(sin.at_variants, BTreeSet::from([1, 2]));
        assert_eq!((sin.num_params, sin.num_vars), (0, 1));
    }

    #[test]
    fn unknown_name_is_absent() {
        assert!(Lexicon::seed().lookup("\\nosuchmacro").is_none());
    }

    #[test]
    fn frac_builtin_pattern() {
        let lex = Lexicon::seed();
        let frac = lex.lookup("\\frac").unwrap();
        assert_eq!(frac.translation(Dialect::Maple).unwrap().template(), "($0)/($1)");
        assert!(lex.is_builtin("\\frac"));
    }

    #[test]
    fn seed_covers_required_symbols() {
        let lex = Lexicon::seed();
        for name in [
            "\\frac", "\\sqrt", "\\sin", "\\cos", "\\asin", "\\JacobiP", "\\BesselK", "\\EllIntF",
            "\\iunit", "\\expe", "\\CatalansConstant", "\\cpi", "\\idt", "\\alpha", "\\Theta",
            "\\EulerConstant",
        ] {
            assert!(lex.lookup(name).is_some(), "{name} missing");
        }
    }

    #[test]
    fn constant_aliases() {
        let lex = Lexicon::seed();
        assert_eq!(lex.constant_for_letter('e').unwrap().semantic_macro, "\\expe");
        assert_eq!(lex.constant_for_letter('i').unwrap().semantic_macro, "\\iunit");
        assert_eq!(lex.constant_for_letter('C').unwrap().semantic_macro, "\\CatalansConstant");
        assert_eq!(lex.constant_for_command("\\pi").unwrap().semantic_macro, "\\cpi");
        assert_eq!(lex.constant_for_command("\\alpha").unwrap().semantic_macro, "\\finestructure");
        assert!(lex.constant_for_letter('x').is_none());
        let fs = lex.lookup("\\finestructure").unwrap();
        assert!(fs.translations.is_empty());
    }

    #[test]
    fn jacobi_reorders_arguments() {
        let lex = Lexicon::seed();
        let p = lex.lookup("\\JacobiP").unwrap().translation(Dialect::Maple).unwrap();
        assert_eq!(p.apply(&["alpha", "beta", "n", "cos(a*Theta)"]), "JacobiP(n,alpha,beta,cos(a*Theta))");
    }

    #[test]
    fn placeholder_out_of_range() {
        let err = with_macros(&format!("{HEADER}\\foo,0,1,1,,foo($1),Foo[$0],\n")).unwrap_err();
        assert_eq!(
            err,
            LexiconError::PlaceholderOutOfRange {
                macro_name: "\\foo".into(),
                index: 1
            }
        );
    }

    #[test]
    fn duplicate_rows_rejected() {
        let csv = format!("{HEADER}\\foo,0,1,1,,foo($0),,\n\\foo,0,1,1,,foo($0),,\n");
        assert_eq!(
            with_macros(&csv).unwrap_err(),
            LexiconError::SchemaError {
                file: "macros.csv".into(),
                line: 3,
                reason: "duplicate macro \\foo".into()
            }
        );
    }

    #[test]
    fn duplicate_across_sources_rejected() {
        let csv = format!("{HEADER}\\frac,2,0,,,($0)/($1),,\n");
        assert_eq!(with_macros(&csv).unwrap_err(), LexiconError::DuplicateMacro("\\frac".into()));
    }

    #[test]
    fn header_only_csv_gives_no_macro_entries() {
        let lex = with_macros(HEADER).unwrap();
        assert!(lex.entries.is_empty());
        assert!(lex.lookup("\\sin").is_none());
    }

    #[test]
    fn schema_errors_carry_line() {
        let csv = format!("{HEADER}\\foo,0,1,1,,foo($0),,\n\\bar,x,1,1,,bar($0),,\n");
        match with_macros(&csv).unwrap_err() {
            LexiconError::SchemaError { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad_header = "macro,params\n\\foo,1\n";
        assert!(matches!(with_macros(bad_header), Err(LexiconError::SchemaError { line: 1, .. })));
        let bad_adv = format!("{HEADER}\\foo,0,1,1,,foo($0),,weird:thing\n");
        assert!(matches!(with_macros(&bad_adv), Err(LexiconError::SchemaError { .. })));
    }

    #[test]
    fn bad_constant_alias() {
        let err = Lexicon::compile(LexiconSources {
            constants_json: r#"{"\\foo": {"maple": "x", "mathematica": "x", "alias": "q"}}"#,
            ..LexiconSources::seed()
        })
        .unwrap_err();
        assert!(matches!(err, LexiconError::SchemaError { .. }));
    }

    #[test]
    fn json_round_trip_is_identical() {
        let lex = Lexicon::seed();
        let again = Lexicon::from_json(&lex.to_json()).unwrap();
        assert_eq!(lex, again);
        assert_eq!(lex.to_json(), again.to_json());
    }

    #[test]
    fn advisories_parse() {
        let adv = parse_advisories("branch-cut:a, b;domain: x > 0").unwrap();
        assert_eq!(adv.len(), 2);
        assert_eq!(adv[0].kind, AdvisoryKind::BranchCut);
        assert_eq!(adv[0].text, "a, b");
        assert_eq!(adv[1].text, "x > 0");
        assert!(parse_advisories("").unwrap().is_empty());
    }

    #[test]
    fn pattern_segments() {
        let p = CasPattern::new("f($10,$ x)").unwrap();
        assert_eq!(p.max_placeholder(), Some(10));
        assert_eq!(p.segments()[2], Segment::Literal(",$ x)".into()));
        assert!(CasPattern::new("").is_err());
    }
}
