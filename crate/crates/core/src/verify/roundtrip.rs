//! Round trips between semantic LaTeX and Maple until the strings stop changing.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::backward::ReverseLexicon;
use crate::forward::translate_forward;
use crate::lexicon::{Dialect, Lexicon};
use crate::maple::parse_maple;
use crate::preprocess::{preprocess_with, PreprocessOptions};
use crate::scan::scan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    SemanticLatex,
    Maple,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::SemanticLatex => Side::Maple,
            Side::Maple => Side::SemanticLatex,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::SemanticLatex => "semantic-latex",
            Side::Maple => "maple",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub index: usize,
    pub side: Side,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    FixedPoint,
    MaxSteps,
    TranslationError,
}

/// A cycle count with half-cycle granularity. One translation is half a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfCycles(pub usize);

impl HalfCycles {
    pub fn cycles(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfCycles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.0 / 2, self.0 % 2) {
            (0, 1) => write!(f, "½"),
            (n, 1) => write!(f, "{n}½"),
            (n, _) => write!(f, "{n}"),
        }
    }
}

impl Serialize for HalfCycles {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.cycles())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub steps: Vec<Step>,
    pub fixed_point_reached: bool,
    /// Half-cycles until both sides stopped changing.
    pub cycles_to_fixed_point: Option<HalfCycles>,
    pub latex_fixed_after: Option<HalfCycles>,
    pub maple_fixed_after: Option<HalfCycles>,
    pub terminated_reason: Termination,
    pub error: Option<String>,
}

impl RoundTripReport {
    pub fn fixed_after(&self, side: Side) -> Option<HalfCycles> {
        match side {
            Side::SemanticLatex => self.latex_fixed_after,
            Side::Maple => self.maple_fixed_after,
        }
    }
}

/// Translates one step in either direction.
pub struct Cycler<'a> {
    lex: &'a Lexicon,
    reverse: ReverseLexicon,
    options: PreprocessOptions,
}

impl<'a> Cycler<'a> {
    pub fn new(lex: &'a Lexicon) -> Self {
        Cycler {
            lex,
            reverse: ReverseLexicon::new(lex),
            options: PreprocessOptions::default(),
        }
    }

    pub fn with_options(mut self, options: PreprocessOptions) -> Self {
        self.options = options;
        self
    }

    /// Translates `text` from `side` to the other side.
    pub fn translate(&self, text: &str, side: Side) -> Result<String, String> {
        match side {
            Side::SemanticLatex => {
                let tree = scan(text, self.lex).map_err(|e| e.to_string())?;
                translate_forward(&tree, self.lex, Dialect::Maple)
                    .map(|r| r.output)
                    .map_err(|e| e.to_string())
            }
            Side::Maple => {
                let tree = parse_maple(text).map_err(|e| e.to_string())?;
                self.reverse
                    .translate(&preprocess_with(&tree, self.options))
                    .map(|r| r.output)
                    .map_err(|e| e.to_string())
            }
        }
    }

    pub fn round_trip(&self, start_text: &str, start_side: Side, max_steps: usize) -> RoundTripReport {
        let mut steps = vec![Step {
            index: 0,
            side: start_side,
            text: start_text.to_string(),
        }];
        let mut report = RoundTripReport {
            steps: Vec::new(),
            fixed_point_reached: false,
            cycles_to_fixed_point: None,
            latex_fixed_after: None,
            maple_fixed_after: None,
            terminated_reason: Termination::MaxSteps,
            error: None,
        };
        while steps.len() <= max_steps {
            let last = steps.last().expect("start step");
            match self.translate(&last.text, last.side) {
                Ok(text) => {
                    let k = steps.len();
                    let side = last.side.other();
                    steps.push(Step { index: k, side, text });
                    if k >= 2 && steps[k].text == steps[k - 2].text {
                        report.fixed_point_reached = true;
                        report.terminated_reason = Termination::FixedPoint;
                        report.cycles_to_fixed_point = Some(HalfCycles(k - 1));
                        let (this, other) = (HalfCycles(k - 2), HalfCycles(k - 1));
                        let (latex, maple) = match side {
                            Side::SemanticLatex => (this, other),
                            Side::Maple => (other, this),
                        };
                        report.latex_fixed_after = Some(latex);
                        report.maple_fixed_after = Some(maple);
                        break;
                    }
                }
                Err(e) => {
                    report.terminated_reason = Termination::TranslationError;
                    report.error = Some(e);
                    break;
                }
            }
        }
        report.steps = steps;
        report
    }
}

pub fn round_trip(start_text: &str, start_side: Side, lex: &Lexicon, max_steps: usize) -> RoundTripReport {
    Cycler::new(lex).round_trip(start_text, start_side, max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_three() {
        let lex = Lexicon::seed();
        let r = round_trip("\\frac{\\cos@{a\\Theta}}{2}", Side::SemanticLatex, &lex, 10);
        let texts: Vec<&str> = r.steps.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(
            texts,
            [
                "\\frac{\\cos@{a\\Theta}}{2}",
                "(cos(a*Theta))/(2)",
                "\\frac{1}{2}\\idt\\cos@{a\\idt\\Theta}",
                "(1)/(2)*cos(a*Theta)",
                "\\frac{1}{2}\\idt\\cos@{a\\idt\\Theta}",
            ]
        );
        assert!(r.fixed_point_reached);
        assert_eq!(r.latex_fixed_after.unwrap().to_string(), "1");
        assert_eq!(r.maple_fixed_after.unwrap().to_string(), "1½");
        assert_eq!(r.cycles_to_fixed_point, Some(HalfCycles(3)));
    }

    #[test]
    fn fixed_maple_start_takes_half_a_cycle() {
        let lex = Lexicon::seed();
        let r = round_trip("(1)/(2)*cos(a*Theta)", Side::Maple, &lex, 10);
        assert!(r.fixed_point_reached);
        assert_eq!(r.steps.len(), 3);
        assert_eq!(r.maple_fixed_after, Some(HalfCycles(0)));
        assert_eq!(r.latex_fixed_after, Some(HalfCycles(1)));
        assert!(r.cycles_to_fixed_point.unwrap() <= HalfCycles(1));
    }

    #[test]
    fn elliptic_chain_grows() {
        let lex = Lexicon::seed();
        let r = round_trip("\\EllIntF@{\\phi}{k}", Side::SemanticLatex, &lex, 8);
        assert_eq!(r.terminated_reason, Termination::MaxSteps);
        assert!(!r.fixed_point_reached);
        assert_eq!(r.steps.len(), 9);
        let layers: Vec<usize> = r
            .steps
            .iter()
            .filter(|s| s.side == Side::SemanticLatex)
            .map(|s| s.text.matches("\\asin@{\\sin@{").count())
            .collect();
        assert_eq!(layers, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn errors_stop_the_trip() {
        let lex = Lexicon::seed();
        let r = round_trip("\\qhyperg{a}", Side::SemanticLatex, &lex, 4);
        assert_eq!(r.terminated_reason, Termination::TranslationError);
        assert_eq!(r.steps.len(), 1);
        assert!(r.error.unwrap().contains("qhyperg"));
    }

    #[test]
    fn half_cycle_display() {
        assert_eq!(HalfCycles(0).to_string(), "0");
        assert_eq!(HalfCycles(1).to_string(), "½");
        assert_eq!(HalfCycles(4).to_string(), "2");
    }
}
