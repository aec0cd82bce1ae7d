//! Translation between semantic LaTeX and computer algebra syntax.
//!
//! The forward path scans LaTeX into a shallow term tree ([`scan`]) and
//! renders it through the lexicon ([`forward`]). The backward path parses
//! Maple into an inert tree ([`maple`]), reshapes it ([`preprocess`]) and
//! renders semantic LaTeX ([`backward`]). [`verify`] runs round trips and
//! equivalence checks; [`corpus`] drives both over a file of formulae.

pub mod backward;
pub mod corpus;
pub mod forward;
pub mod inert;
pub mod lexicon;
pub mod maple;
pub mod preprocess;
pub mod rational;
pub mod scan;
pub mod verify;

use thiserror::Error;

pub use backward::{translate_backward, BackwardError, ReverseLexicon};
pub use forward::{translate_forward, InfoKind, InfoMessage, TranslateError, TranslationResult};
pub use inert::{InertError, InertForm, NestedList, Tag};
pub use lexicon::{Dialect, Lexicon, LexiconEntry, LexiconError};
pub use maple::{parse_maple, render_maple, MapleError};
pub use preprocess::{preprocess, preprocess_with, PreprocessOptions};
pub use scan::{scan, PomTree, ScanError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Parse(#[from] MapleError),
    #[error(transparent)]
    Backward(#[from] BackwardError),
}

impl Error {
    /// True for errors in reading the input, as opposed to translating it.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Scan(_) | Error::Parse(_))
    }
}

/// Scans and translates semantic LaTeX.
pub fn latex_to_cas(input: &str, lex: &Lexicon, dialect: Dialect) -> Result<TranslationResult, Error> {
    let tree = scan(input, lex)?;
    Ok(translate_forward(&tree, lex, dialect)?)
}

/// Parses, preprocesses and renders a Maple expression as semantic LaTeX.
pub fn maple_to_latex(input: &str, lex: &Lexicon, options: PreprocessOptions) -> Result<TranslationResult, Error> {
    let tree = parse_maple(input)?;
    Ok(translate_backward(&preprocess_with(&tree, options), lex)?)
}
