//! `texcas` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 translation error, 3 parse error,
//! 4 lexicon schema error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use texcas_core::corpus::{load_corpus, run_corpus, CorpusError, CorpusOptions};
use texcas_core::lexicon::LexiconSources;
use texcas_core::verify::{Cycler, SamplingConfig, Side};
use texcas_core::{
    latex_to_cas, maple_to_latex, parse_maple, preprocess_with, Dialect, Error, Lexicon, LexiconError,
    PreprocessOptions,
};

const EXIT_IO: u8 = 1;
const EXIT_TRANSLATION: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_SCHEMA: u8 = 4;

#[derive(Parser)]
#[command(name = "texcas", version, about = "Translate between semantic LaTeX and computer algebra syntax")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate one formula.
    Translate(TranslateArgs),
    /// Compile lexicon sources into a single lexicon file.
    CompileLexicon(CompileArgs),
    /// Translate and verify every record of a corpus file.
    Corpus(CorpusArgs),
    /// Translate back and forth until the strings stop changing.
    Roundtrip(RoundtripArgs),
    /// Print the inert nested list of a Maple expression.
    Inert(InertArgs),
}

#[derive(Args)]
struct LexiconArg {
    /// Compiled lexicon (JSON). Defaults to the built-in seed lexicon.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    /// Semantic LaTeX to a CAS (default).
    #[arg(long, conflicts_with = "backward")]
    forward: bool,
    /// Maple to semantic LaTeX.
    #[arg(long)]
    backward: bool,
    #[arg(long, value_enum, default_value_t = DialectArg::Maple)]
    dialect: DialectArg,
    /// Read the formula from a file instead of the argument.
    #[arg(long, conflicts_with = "input")]
    file: Option<PathBuf>,
    /// Keep negative powers instead of forming quotients (backward only).
    #[arg(long)]
    no_divide: bool,
    #[command(flatten)]
    lexicon: LexiconArg,
    input: Option<String>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    macros: PathBuf,
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long)]
    greek: Option<PathBuf>,
    #[arg(long)]
    builtins: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 8)]
    max_steps: usize,
}

#[derive(Args)]
struct CorpusArgs {
    corpus: PathBuf,
    /// Stats report path; stats go to stdout as JSON either way.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-record JSON lines log.
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    lexicon: LexiconArg,
}

#[derive(Args)]
struct RoundtripArgs {
    text: String,
    #[arg(long, value_enum, default_value_t = StartArg::Latex)]
    start: StartArg,
    #[arg(long, default_value_t = 8)]
    max_steps: usize,
    #[arg(long)]
    no_divide: bool,
    /// Print the full report as JSON instead of one step per line.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    lexicon: LexiconArg,
}

#[derive(Args)]
struct InertArgs {
    maple: String,
    /// Prefix tags with `_Inert_`.
    #[arg(long)]
    compat_prefix: bool,
    /// Apply preprocessing before printing.
    #[arg(long)]
    preprocess: bool,
    #[arg(long)]
    no_divide: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Maple,
    Mathematica,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    Latex,
    Maple,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<LexiconError> for Failure {
    fn from(e: LexiconError) -> Self {
        let code = match e {
            LexiconError::Io { .. } => EXIT_IO,
            _ => EXIT_SCHEMA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_parse_error() { EXIT_PARSE } else { EXIT_TRANSLATION };
        Failure::new(code, e.to_string())
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::Io { .. } => EXIT_IO,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Translate(a) => translate(a),
        Command::CompileLexicon(a) => compile_lexicon(a),
        Command::Corpus(a) => corpus(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Inert(a) => inert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

fn lexicon(arg: &LexiconArg) -> Result<Lexicon, Failure> {
    match &arg.lexicon {
        Some(p) => Ok(Lexicon::load(p)?),
        None => Ok(Lexicon::seed()),
    }
}

fn divide(no_divide: bool) -> PreprocessOptions {
    PreprocessOptions { divide: !no_divide }
}

fn translate(a: TranslateArgs) -> Result<(), Failure> {
    let lex = lexicon(&a.lexicon)?;
    let input = match (&a.file, &a.input) {
        (Some(p), _) => read(p)?.trim().to_string(),
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(Failure::new(EXIT_PARSE, "no input formula given")),
    };
    let result = if a.backward {
        if matches!(a.dialect, DialectArg::Mathematica) {
            return Err(Failure::new(EXIT_TRANSLATION, "backward translation reads Maple only"));
        }
        maple_to_latex(&input, &lex, divide(a.no_divide))?
    } else {
        let dialect = match a.dialect {
            DialectArg::Maple => Dialect::Maple,
            DialectArg::Mathematica => Dialect::Mathematica,
        };
        latex_to_cas(&input, &lex, dialect)?
    };
    for info in &result.infos {
        eprintln!("{info}");
    }
    println!("{}", result.output);
    Ok(())
}

fn compile_lexicon(a: CompileArgs) -> Result<(), Failure> {
    let optional = |p: &Option<PathBuf>| p.as_deref().map_or(Ok("{}".to_string()), read);
    let macro_csv = read(&a.macros)?;
    let (constants, greek, builtins) = (optional(&a.constants)?, optional(&a.greek)?, optional(&a.builtins)?);
    let lex = Lexicon::compile(LexiconSources {
        macro_csv: &macro_csv,
        constants_json: &constants,
        greek_json: &greek,
        builtins_json: &builtins,
    })?;
    let json = lex.to_json();
    match &a.out {
        Some(p) => {
            write(p, &json)?;
            eprintln!("info: compiled {} entries into {}", lex.len(), p.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn corpus(a: CorpusArgs) -> Result<(), Failure> {
    let lex = lexicon(&a.lexicon)?;
    let records = load_corpus(&a.corpus)?;
    let options = CorpusOptions {
        sampling: SamplingConfig {
            points: a.sampling.points,
            tolerance: a.sampling.tolerance,
            seed: a.sampling.seed,
            ..SamplingConfig::default()
        },
        max_steps: a.sampling.max_steps,
    };
    let run = run_corpus(&records, &lex, &options);
    if let Some(p) = &a.report {
        write(p, &run.report(&options))?;
    }
    if let Some(p) = &a.log {
        write(p, &run.log_jsonl())?;
    }
    println!("{}", serde_json::to_string(&run.stats).expect("stats serialize"));
    Ok(())
}

fn roundtrip(a: RoundtripArgs) -> Result<(), Failure> {
    let lex = lexicon(&a.lexicon)?;
    let side = match a.start {
        StartArg::Latex => Side::SemanticLatex,
        StartArg::Maple => Side::Maple,
    };
    let report = Cycler::new(&lex)
        .with_options(divide(a.no_divide))
        .round_trip(&a.text, side, a.max_steps);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for step in &report.steps {
            println!("{}\t{}\t{}", step.index, step.side.as_str(), step.text);
        }
        match (report.latex_fixed_after, report.maple_fixed_after) {
            (Some(l), Some(m)) => eprintln!("info: fixed point: semantic LaTeX after {l} cycles, Maple after {m}"),
            _ => eprintln!("info: no fixed point ({:?})", report.terminated_reason),
        }
    }
    match report.error {
        Some(e) => Err(Failure::new(EXIT_TRANSLATION, e)),
        None => Ok(()),
    }
}

fn inert(a: InertArgs) -> Result<(), Failure> {
    let tree = parse_maple(&a.maple).map_err(Error::from)?;
    let tree = if a.preprocess {
        preprocess_with(&tree, divide(a.no_divide))
    } else {
        tree
    };
    println!("{}", tree.to_nested_list().to_text(a.compat_prefix));
    Ok(())
}
