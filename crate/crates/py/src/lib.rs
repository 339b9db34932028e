//! Python bindings: digraphs, FDSs, the extremal searches, constructions
//! and the verification suites.

use std::sync::Arc;

use fdslab::coding::Code;
use fdslab::construct;
use fdslab::digraph::Girth;
use fdslab::fds::{FdsFile, LoadedFds};
use fdslab::guessgraph;
use fdslab::optimize::{self, ExtremalResult, Mode, SearchBudget, Value, Witness};
use fdslab::verify;
use fdslab::{Error, Field, Matrix};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyfdslab, CapExceeded, PyException);

fn err(e: Error) -> PyErr {
    if e.is_cap() {
        CapExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Digraph")]
#[derive(Clone)]
struct PyDigraph(fdslab::Digraph);

#[pymethods]
impl PyDigraph {
    #[new]
    fn new(n: usize, arcs: Vec<(usize, usize)>) -> PyResult<Self> {
        fdslab::Digraph::new(n, arcs).map(PyDigraph).map_err(err)
    }

    /// Named family such as `K:4`, `Cund:5`, `paley:7` or `power:Cdir:3^2`.
    #[staticmethod]
    fn family(spec: &str) -> PyResult<Self> {
        fdslab::Digraph::family(spec).map(PyDigraph).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        fdslab::Digraph::parse(text).map(PyDigraph).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.0.arcs().collect()
    }

    /// `None` for acyclic digraphs.
    fn girth(&self) -> Option<usize> {
        match self.0.girth() {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }

    fn feedback_vertex_number(&self) -> PyResult<(usize, Vec<usize>)> {
        self.0.feedback_vertex_number().map_err(err)
    }

    fn cycle_packing(&self) -> PyResult<(usize, Vec<Vec<usize>>)> {
        self.0.cycle_packing().map_err(err)
    }

    fn cycle_chromatic_index(&self) -> PyResult<usize> {
        self.0.cycle_chromatic_index().map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Digraph(n={}, arcs={})", self.0.n(), self.0.arc_count())
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Fds")]
#[derive(Clone)]
struct PyFds(fdslab::Fds);

fn metrics_dict<'py>(py: Python<'py>, g: u128, s: usize, i: usize) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("fixed_points", g)?;
    d.set_item("s", s)?;
    d.set_item("i", i)?;
    Ok(d)
}

#[pymethods]
impl PyFds {
    /// Table of `q^n` state ranks, coordinate 0 least significant.
    #[new]
    fn new(q: u32, n: usize, table: Vec<u32>) -> PyResult<Self> {
        fdslab::Fds::from_table(q, n, table).map(PyFds).map_err(err)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn table(&self) -> Vec<u32> {
        self.0.table().to_vec()
    }

    fn apply(&self, x: Vec<u32>) -> Vec<u32> {
        self.0.apply_digits(&x)
    }

    fn fixed_points(&self) -> Vec<usize> {
        self.0.fixed_points()
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.0.metrics();
        metrics_dict(py, m.g.count, m.s, m.i)
    }

    /// `|C_f|`
    fn guessing_code_size(&self) -> u128 {
        self.0.guessing_dimension().count
    }

    /// Minimum number of translates of `fix(f)` covering the space.
    fn coset_count(&self) -> PyResult<u128> {
        self.0.coset_dimension().map(|c| c.count).map_err(err)
    }

    fn interaction_graph(&self) -> PyDigraph {
        PyDigraph(self.0.interaction_graph())
    }

    fn belongs_to(&self, d: &PyDigraph) -> bool {
        self.0.belongs_to(&d.0)
    }

    fn to_json(&self) -> String {
        FdsFile::from(&self.0).to_json()
    }

    fn __repr__(&self) -> String {
        format!("Fds(q={}, n={})", self.0.q(), self.0.n())
    }
}

#[pyclass(frozen, skip_from_py_object, name = "AffineFds")]
#[derive(Clone)]
struct PyAffineFds(fdslab::AffineFds);

#[pymethods]
impl PyAffineFds {
    /// `f(x) = xM + y` over GF(q).
    #[new]
    fn new(q: u64, matrix: Vec<Vec<u32>>, offset: Vec<u32>) -> PyResult<Self> {
        let field = Arc::new(Field::new(q).map_err(err)?);
        fdslab::AffineFds::new(field, Matrix::from_rows(&matrix), offset).map(PyAffineFds).map_err(err)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<u32>> {
        let m = self.0.matrix();
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }

    fn offset(&self) -> Vec<u32> {
        self.0.offset().to_vec()
    }

    fn apply(&self, x: Vec<u32>) -> Vec<u32> {
        self.0.apply(&x)
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.0.structural_metrics().map_err(err)?;
        let d = metrics_dict(py, m.g.count, m.s, m.i)?;
        d.set_item("code_size", m.l.count)?;
        Ok(d)
    }

    fn tabulate(&self) -> PyResult<PyFds> {
        self.0.tabulate().map(PyFds).map_err(err)
    }

    fn to_json(&self) -> String {
        FdsFile::from(&self.0).to_json()
    }

    fn __repr__(&self) -> String {
        format!("AffineFds(q={}, n={})", self.0.q(), self.0.n())
    }
}

#[pyclass(frozen, name = "ExtremalResult")]
struct PyExtremalResult(ExtremalResult);

#[pymethods]
impl PyExtremalResult {
    #[getter]
    fn quantity(&self) -> &'static str {
        self.0.quantity.name()
    }

    /// Integer value, or the count `q^x` for logarithmic quantities.
    #[getter]
    fn value(&self) -> u128 {
        self.0.value.raw()
    }

    /// `log_q` of the count, or the integer value itself.
    #[getter]
    fn log_value(&self) -> f64 {
        match self.0.value {
            Value::Integer(v) => v as f64,
            Value::Count(c) => c.value(),
        }
    }

    #[getter]
    fn certified(&self) -> &'static str {
        self.0.certified.label()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.0.certified.is_exact()
    }

    #[getter]
    fn bound(&self) -> Option<u128> {
        self.0.bound
    }

    #[getter]
    fn candidates(&self) -> u64 {
        self.0.telemetry.candidates
    }

    fn witness(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        Ok(match &self.0.witness {
            None => None,
            Some(Witness::Table(f)) => Some(Py::new(py, PyFds(f.clone()))?.into_any()),
            Some(Witness::Affine(a)) => Some(Py::new(py, PyAffineFds(a.clone()))?.into_any()),
        })
    }

    fn __repr__(&self) -> String {
        format!("ExtremalResult({} = {}, {})", self.quantity(), self.value(), self.certified())
    }
}

fn budget(mode: &str, trials: u64, seed: u64) -> PyResult<SearchBudget> {
    let mode = match mode {
        "auto" => Mode::Auto,
        "exhaustive" => Mode::Exhaustive,
        "random" | "randomized" => Mode::Randomized,
        "construct" | "construction-only" => Mode::ConstructionOnly,
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    Ok(SearchBudget { mode, trials, seed, ..SearchBudget::default() })
}

type Search = fn(&fdslab::Digraph, u32, &SearchBudget) -> fdslab::Result<ExtremalResult>;

fn search(f: Search, d: &PyDigraph, q: u32, mode: &str, trials: u64, seed: u64) -> PyResult<PyExtremalResult> {
    f(&d.0, q, &budget(mode, trials, seed)?).map(PyExtremalResult).map_err(err)
}

macro_rules! searches {
    ($($name:ident => $path:path),* $(,)?) => {
        $(
            #[pyfunction]
            #[pyo3(signature = (d, q, mode = "auto", trials = 100_000, seed = 0))]
            fn $name(d: &PyDigraph, q: u32, mode: &str, trials: u64, seed: u64) -> PyResult<PyExtremalResult> {
                search($path, d, q, mode, trials, seed)
            }
        )*
    };
}

searches! {
    instability => optimize::instability,
    stability => optimize::stability,
    guessing_dimension => optimize::guessing_dimension_of_graph,
    coset_dimension => optimize::coset_dimension_of_graph,
    linear_guessing => optimize::linear_guessing,
    affine_instability => optimize::affine_instability,
    affine_stability => optimize::affine_stability,
}

/// `(alpha, witness)`: the maximum number of fixed points over `F(D, q)`.
#[pyfunction]
fn guessing_number(d: &PyDigraph, q: u32) -> PyResult<(u128, Vec<usize>)> {
    guessgraph::guessing_number(&d.0, q).map(|(c, w)| (c.count, w)).map_err(err)
}

/// The chromatic number of the guessing graph.
#[pyfunction]
fn public_entropy(d: &PyDigraph, q: u32) -> PyResult<u128> {
    guessgraph::public_entropy(&d.0, q).map(|(c, _)| c.count).map_err(err)
}

#[pyfunction]
fn ball_volume(q: u32, n: usize, t: i64) -> BigUint {
    fdslab::ball_volume(q, n, t)
}

#[pyfunction]
fn covering_radius(q: u32, n: usize, words: Vec<usize>) -> PyResult<usize> {
    Code::new(q, n, words).and_then(|c| c.covering_radius()).map_err(err)
}

#[pyfunction]
fn remoteness(q: u32, n: usize, words: Vec<usize>) -> PyResult<usize> {
    Code::new(q, n, words).and_then(|c| c.remoteness()).map_err(err)
}

#[pyfunction]
fn load_fds(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match FdsFile::from_json(text).and_then(|f| f.load()).map_err(err)? {
        LoadedFds::Table(f) => Py::new(py, PyFds(f))?.into_any(),
        LoadedFds::Affine(a) => Py::new(py, PyAffineFds(a))?.into_any(),
    })
}

#[pyfunction]
fn clique_guessing(n: usize, q: u32) -> PyResult<PyFds> {
    construct::clique_guessing(n, q).map(PyFds).map_err(err)
}

#[pyfunction]
fn winkler_clique(q: u32) -> PyResult<PyFds> {
    construct::winkler_clique(q).map(PyFds).map_err(err)
}

#[pyfunction]
fn clique_packing_stability(n: usize, q: u32) -> PyResult<PyFds> {
    construct::clique_packing_stability(n, q).map(PyFds).map_err(err)
}

#[pyfunction]
fn negation_cycle(n: usize, q: u32) -> PyResult<PyFds> {
    construct::negation_cycle(n, q).map(PyFds).map_err(err)
}

/// `(q, f)` with `q = 2^chi'` and `i(f) = tau`.
#[pyfunction]
fn chordless_cover_instability(d: &PyDigraph) -> PyResult<(u32, PyFds)> {
    construct::chordless_cover_instability(&d.0).map(|(q, f)| (q, PyFds(f))).map_err(err)
}

#[pyfunction]
fn undirected_degree_instability(d: &PyDigraph) -> PyResult<(u32, PyFds)> {
    construct::undirected_degree_instability(&d.0).map(|(q, f)| (q, PyFds(f))).map_err(err)
}

/// The circulant simplex map, offset by a remoteness centre.
#[pyfunction]
fn simplex_affine(r: u32) -> PyResult<PyAffineFds> {
    let f = construct::simplex_affine(r).map_err(err)?;
    let offset = construct::stablest_offset(&f).map_err(err)?;
    f.with_offset(offset).map(PyAffineFds).map_err(err)
}

/// `(passed, report_json)` for a named suite.
#[pyfunction]
fn run_suite(name: &str) -> PyResult<(bool, String)> {
    let suite = verify::Suite::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown suite `{name}`")))?;
    let out = verify::run(suite).map_err(err)?;
    let mut report = fdslab::Report::new("verify");
    report.checks = out.checks;
    report.bounds = out.bounds;
    report.settle();
    Ok((report.passed, report.to_json()))
}

#[pymodule]
fn pyfdslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CapExceeded", m.py().get_type::<CapExceeded>())?;
    m.add_class::<PyDigraph>()?;
    m.add_class::<PyFds>()?;
    m.add_class::<PyAffineFds>()?;
    m.add_class::<PyExtremalResult>()?;
    m.add_function(wrap_pyfunction!(instability, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(guessing_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(coset_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(linear_guessing, m)?)?;
    m.add_function(wrap_pyfunction!(affine_instability, m)?)?;
    m.add_function(wrap_pyfunction!(affine_stability, m)?)?;
    m.add_function(wrap_pyfunction!(guessing_number, m)?)?;
    m.add_function(wrap_pyfunction!(public_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(covering_radius, m)?)?;
    m.add_function(wrap_pyfunction!(remoteness, m)?)?;
    m.add_function(wrap_pyfunction!(load_fds, m)?)?;
    m.add_function(wrap_pyfunction!(clique_guessing, m)?)?;
    m.add_function(wrap_pyfunction!(winkler_clique, m)?)?;
    m.add_function(wrap_pyfunction!(clique_packing_stability, m)?)?;
    m.add_function(wrap_pyfunction!(negation_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(chordless_cover_instability, m)?)?;
    m.add_function(wrap_pyfunction!(undirected_degree_instability, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_affine, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
