//! Python bindings for `texcas_core`.

use std::path::PathBuf;
use std::sync::OnceLock;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use texcas_core::verify::{check_equivalence as check, Cycler, SamplingConfig, Side};
use texcas_core::{lexicon::LexiconSources, Dialect, Error, Lexicon, LexiconError, PreprocessOptions};

create_exception!(texcas, TranslationError, PyException);
create_exception!(texcas, ParseError, PyException);
create_exception!(texcas, LexiconSchemaError, PyException);

fn to_py(e: Error) -> PyErr {
    if e.is_parse_error() {
        ParseError::new_err(e.to_string())
    } else {
        TranslationError::new_err(e.to_string())
    }
}

fn lexicon_err(e: LexiconError) -> PyErr {
    match e {
        LexiconError::Io { .. } => pyo3::exceptions::PyOSError::new_err(e.to_string()),
        _ => LexiconSchemaError::new_err(e.to_string()),
    }
}

fn seed() -> &'static Lexicon {
    static SEED: OnceLock<Lexicon> = OnceLock::new();
    SEED.get_or_init(Lexicon::seed)
}

/// A compiled, immutable lexicon.
#[pyclass(name = "Lexicon", frozen)]
struct PyLexicon {
    inner: Lexicon,
}

#[pymethods]
impl PyLexicon {
    /// The lexicon bundled with the library.
    #[staticmethod]
    fn seed() -> Self {
        PyLexicon { inner: seed().clone() }
    }

    /// Load a lexicon previously written by `to_json` or `texcas compile-lexicon`.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Lexicon::load(&path).map(|inner| PyLexicon { inner }).map_err(lexicon_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Lexicon::from_json(text).map(|inner| PyLexicon { inner }).map_err(lexicon_err)
    }

    /// Compile from source text: the macro CSV plus three JSON documents.
    #[staticmethod]
    #[pyo3(signature = (macros, constants="{}", greek="{}", builtins="{}"))]
    fn compile(macros: &str, constants: &str, greek: &str, builtins: &str) -> PyResult<Self> {
        Lexicon::compile(LexiconSources {
            macro_csv: macros,
            constants_json: constants,
            greek_json: greek,
            builtins_json: builtins,
        })
        .map(|inner| PyLexicon { inner })
        .map_err(lexicon_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn names(&self) -> Vec<String> {
        self.inner.names().map(str::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("<Lexicon with {} entries>", self.inner.len())
    }
}

fn pick<'a>(lexicon: &'a Option<PyRef<'_, PyLexicon>>) -> &'a Lexicon {
    match lexicon {
        Some(l) => &l.inner,
        None => seed(),
    }
}

fn dialect(name: &str) -> PyResult<Dialect> {
    match name.to_ascii_lowercase().as_str() {
        "maple" => Ok(Dialect::Maple),
        "mathematica" => Ok(Dialect::Mathematica),
        _ => Err(PyValueError::new_err(format!("unknown dialect `{name}`"))),
    }
}

fn side(name: &str) -> PyResult<Side> {
    match name.to_ascii_lowercase().as_str() {
        "latex" => Ok(Side::SemanticLatex),
        "maple" => Ok(Side::Maple),
        _ => Err(PyValueError::new_err(format!("unknown side `{name}`, expected latex or maple"))),
    }
}

/// Translate semantic LaTeX. Returns the output and the info/warning lines.
#[pyfunction]
#[pyo3(signature = (latex, dialect="maple", lexicon=None))]
fn translate_forward(
    latex: &str,
    dialect: &str,
    lexicon: Option<PyRef<'_, PyLexicon>>,
) -> PyResult<(String, Vec<String>)> {
    let r = texcas_core::latex_to_cas(latex, pick(&lexicon), self::dialect(dialect)?).map_err(to_py)?;
    Ok((r.output, r.infos.iter().map(|i| i.to_string()).collect()))
}

/// Translate Maple syntax to semantic LaTeX.
#[pyfunction]
#[pyo3(signature = (maple, divide=true, lexicon=None))]
fn translate_backward(
    maple: &str,
    divide: bool,
    lexicon: Option<PyRef<'_, PyLexicon>>,
) -> PyResult<(String, Vec<String>)> {
    let r = texcas_core::maple_to_latex(maple, pick(&lexicon), PreprocessOptions { divide }).map_err(to_py)?;
    Ok((r.output, r.infos.iter().map(|i| i.to_string()).collect()))
}

/// Parse Maple text and return its inert form as nested-list text.
#[pyfunction]
#[pyo3(signature = (maple, compat_prefix=false))]
fn parse_maple(maple: &str, compat_prefix: bool) -> PyResult<String> {
    let tree = texcas_core::parse_maple(maple).map_err(|e| to_py(e.into()))?;
    Ok(tree.to_nested_list().to_text(compat_prefix))
}

/// Translate back and forth until both sides stop changing.
#[pyfunction]
#[pyo3(signature = (text, start="latex", max_steps=8, lexicon=None))]
fn round_trip<'py>(
    py: Python<'py>,
    text: &str,
    start: &str,
    max_steps: usize,
    lexicon: Option<PyRef<'_, PyLexicon>>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = Cycler::new(pick(&lexicon)).round_trip(text, side(start)?, max_steps);
    let steps: Vec<(usize, &str, String)> = report
        .steps
        .iter()
        .map(|s| (s.index, s.side.as_str(), s.text.clone()))
        .collect();
    let out = PyDict::new(py);
    out.set_item("steps", steps)?;
    out.set_item("fixed_point_reached", report.fixed_point_reached)?;
    out.set_item("cycles_to_fixed_point", report.cycles_to_fixed_point.map(|c| c.cycles()))?;
    out.set_item("latex_fixed_after", report.latex_fixed_after.map(|c| c.cycles()))?;
    out.set_item("maple_fixed_after", report.maple_fixed_after.map(|c| c.cycles()))?;
    out.set_item("error", report.error)?;
    Ok(out)
}

/// Compare two Maple expressions. Returns the outcome name and the largest
/// sampled difference.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, variables, points=20, tolerance=1e-10, seed=0))]
fn check_equivalence(
    lhs: &str,
    rhs: &str,
    variables: Vec<String>,
    points: usize,
    tolerance: f64,
    seed: u64,
) -> PyResult<(String, Option<f64>)> {
    let parse = |s: &str| texcas_core::parse_maple(s).map_err(|e| to_py(e.into()));
    let cfg = SamplingConfig {
        points,
        tolerance,
        seed,
        ..SamplingConfig::default()
    };
    let verdict = check(&parse(lhs)?, &parse(rhs)?, &variables, &cfg)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((verdict.outcome.as_str().to_string(), verdict.max_difference))
}

#[pymodule]
fn texcas(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyLexicon>()?;
    m.add("TranslationError", py.get_type::<TranslationError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("LexiconSchemaError", py.get_type::<LexiconSchemaError>())?;
    m.add_function(wrap_pyfunction!(translate_forward, m)?)?;
    m.add_function(wrap_pyfunction!(translate_backward, m)?)?;
    m.add_function(wrap_pyfunction!(parse_maple, m)?)?;
    m.add_function(wrap_pyfunction!(round_trip, m)?)?;
    m.add_function(wrap_pyfunction!(check_equivalence, m)?)?;
    Ok(())
}
