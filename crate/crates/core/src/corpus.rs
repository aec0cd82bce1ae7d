//! Batch runs over a corpus of semantic LaTeX formulae.
//!
//! A corpus file holds one record per line, `id<TAB>latex[<TAB>constraint]`.
//! Blank lines and lines starting with `#` are skipped.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::forward::{translate_forward, TranslateError};
use crate::inert::Tag;
use crate::lexicon::{Dialect, Lexicon};
use crate::maple::parse_maple;
use crate::scan::scan;
use crate::verify::eval::constant_value;
use crate::verify::{check_equivalence, Cycler, HalfCycles, Outcome, SamplingConfig, Side, Termination};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusRecord {
    pub id: String,
    pub semantic_latex: String,
    /// Kept with the record and copied to the log; not used when sampling.
    pub constraint: Option<String>,
    /// Exactly one `=` outside any braces, brackets or parentheses.
    pub expected_relation: bool,
}

/// Number of `=` signs at nesting depth zero.
pub fn top_level_equals(latex: &str) -> usize {
    let mut depth = 0i32;
    let mut count = 0;
    let mut chars = latex.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                chars.next();
            }
            '{' | '(' | '[' => depth += 1,
            '}' | ')' | ']' => depth -= 1,
            '=' if depth == 0 => count += 1,
            _ => {}
        }
    }
    count
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(CorpusError::Format {
                line,
                reason: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let id = fields[0].trim();
        let latex = fields[1].trim();
        if id.is_empty() || latex.is_empty() {
            return Err(CorpusError::Format {
                line,
                reason: "empty id or formula".into(),
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        let constraint = fields.get(2).map(|c| c.trim().to_string()).filter(|c| !c.is_empty());
        records.push(CorpusRecord {
            id: id.to_string(),
            semantic_latex: latex.to_string(),
            constraint,
            expected_relation: top_level_equals(latex) == 1,
        });
    }
    Ok(records)
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_corpus(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Verified,
    TranslatedUnverified,
    Ignored,
    UntranslatedUnknownMacro,
    Errored,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Verified => "verified",
            Classification::TranslatedUnverified => "translated_unverified",
            Classification::Ignored => "ignored",
            Classification::UntranslatedUnknownMacro => "untranslated_unknown_macro",
            Classification::Errored => "errored",
        }
    }
}

/// Counts per classification. `translated` covers verified, unverified and
/// ignored records; the other four partition `total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub total: usize,
    pub translated: usize,
    pub verified: usize,
    pub translated_unverified: usize,
    pub untranslated_unknown_macro: usize,
    pub errored: usize,
    pub ignored: usize,
}

impl CorpusStats {
    fn add(&mut self, c: Classification) {
        self.total += 1;
        match c {
            Classification::Verified => self.verified += 1,
            Classification::TranslatedUnverified => self.translated_unverified += 1,
            Classification::Ignored => self.ignored += 1,
            Classification::UntranslatedUnknownMacro => self.untranslated_unknown_macro += 1,
            Classification::Errored => self.errored += 1,
        }
        if matches!(
            c,
            Classification::Verified | Classification::TranslatedUnverified | Classification::Ignored
        ) {
            self.translated += 1;
        }
    }
}

/// One line of the structured log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordLog {
    pub id: String,
    pub classification: Classification,
    pub outcome: Option<Outcome>,
    pub max_difference: Option<f64>,
    /// Strings recorded by the round trip, including the start.
    pub steps: usize,
    pub fixed_point_reached: bool,
    pub cycles_to_fixed_point: Option<HalfCycles>,
    pub maple: Option<String>,
    pub constraint: Option<String>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusOptions {
    pub sampling: SamplingConfig,
    pub max_steps: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            sampling: SamplingConfig::default(),
            max_steps: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRun {
    pub stats: CorpusStats,
    pub records: Vec<RecordLog>,
}

pub fn run_corpus(records: &[CorpusRecord], lex: &Lexicon, options: &CorpusOptions) -> CorpusRun {
    let cycler = Cycler::new(lex);
    let mut logs: Vec<RecordLog> = records.par_iter().map(|r| run_record(r, lex, &cycler, options)).collect();
    logs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut stats = CorpusStats::default();
    for log in &logs {
        stats.add(log.classification);
    }
    CorpusRun { stats, records: logs }
}

fn run_record(record: &CorpusRecord, lex: &Lexicon, cycler: &Cycler<'_>, options: &CorpusOptions) -> RecordLog {
    let mut log = RecordLog {
        id: record.id.clone(),
        classification: Classification::Errored,
        outcome: None,
        max_difference: None,
        steps: 0,
        fixed_point_reached: false,
        cycles_to_fixed_point: None,
        maple: None,
        constraint: record.constraint.clone(),
        detail: None,
    };
    let tree = match scan(&record.semantic_latex, lex) {
        Ok(t) => t,
        Err(e) => {
            log.detail = Some(e.to_string());
            return log;
        }
    };
    let maple = match translate_forward(&tree, lex, Dialect::Maple) {
        Ok(r) => r.output,
        Err(e) => {
            if matches!(e, TranslateError::UnknownMacro(_)) {
                log.classification = Classification::UntranslatedUnknownMacro;
            }
            log.detail = Some(e.to_string());
            return log;
        }
    };
    log.maple = Some(maple.clone());

    let trip = cycler.round_trip(&record.semantic_latex, Side::SemanticLatex, options.max_steps);
    log.steps = trip.steps.len();
    log.fixed_point_reached = trip.fixed_point_reached;
    log.cycles_to_fixed_point = trip.cycles_to_fixed_point;
    if trip.terminated_reason == Termination::TranslationError {
        log.detail = trip.error;
    }

    if !record.expected_relation {
        log.classification = Classification::Ignored;
        return log;
    }
    log.classification = Classification::TranslatedUnverified;
    let relation = match parse_maple(&maple) {
        Ok(t) if t.tag == Tag::Equation => t,
        Ok(_) => {
            log.detail = Some("translation is not an equation".into());
            return log;
        }
        Err(e) => {
            log.detail = Some(e.to_string());
            return log;
        }
    };
    let (lhs, rhs) = (&relation.children[0], &relation.children[1]);
    let mut vars = relation.free_names();
    vars.retain(|v| constant_value(v).is_none());
    vars.sort();
    vars.dedup();
    match check_equivalence(lhs, rhs, &vars, &options.sampling) {
        Ok(verdict) => {
            if verdict.outcome.is_verified() {
                log.classification = Classification::Verified;
            }
            log.outcome = Some(verdict.outcome);
            log.max_difference = verdict.max_difference;
            if verdict.reason.is_some() {
                log.detail = verdict.reason;
            }
        }
        Err(e) => log.detail = Some(e.to_string()),
    }
    log
}

impl CorpusRun {
    /// One JSON object per record, in id order.
    pub fn log_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("log records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn report(&self, options: &CorpusOptions) -> String {
        let s = &self.stats;
        let mut out = String::new();
        out.push_str("# corpus statistics\n");
        out.push_str(
            "# no pre-conversion category: records that would need rewriting before a \
             symbolic check are counted under translated_unverified\n",
        );
        let _ = writeln!(
            out,
            "# sampling: {} points, tolerance {:e}, seed {}; round trips capped at {} steps",
            options.sampling.points, options.sampling.tolerance, options.sampling.seed, options.max_steps
        );
        for (name, value) in [
            ("total", s.total),
            ("translated", s.translated),
            ("verified", s.verified),
            ("translated_unverified", s.translated_unverified),
            ("untranslated_unknown_macro", s.untranslated_unknown_macro),
            ("errored", s.errored),
            ("ignored", s.ignored),
        ] {
            let _ = writeln!(out, "{name}\t{value}");
        }
        out
    }
}
